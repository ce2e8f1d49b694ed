//! The conformal Lie algebra spanned by T_α, H, Ω_{αβ}, C_α and its graded representations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::gradedlinalg::{adjoint, nullspace, supercommutator, BlockMap, GradedSpace, Matrix};
use crate::polyharm::Mono;
use crate::report::{Check, Report, Status};

/// Basis generator; indices are 1-based and `O(a, b)` always has a < b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    T(usize),
    H,
    O(usize, usize),
    C(usize),
}

impl Gen {
    /// Doubled degree of the generator as an operator on V.
    pub fn degree2(&self) -> i64 {
        match self {
            Gen::T(_) => 2,
            Gen::C(_) => -2,
            _ => 0,
        }
    }

    pub fn all(dim: usize) -> Vec<Gen> {
        let mut v: Vec<Gen> = (1..=dim).map(Gen::T).collect();
        v.push(Gen::H);
        for a in 1..=dim {
            for b in a + 1..=dim {
                v.push(Gen::O(a, b));
            }
        }
        v.extend((1..=dim).map(Gen::C));
        v
    }

    fn max_index(&self) -> usize {
        match *self {
            Gen::T(a) | Gen::C(a) => a,
            Gen::O(_, b) => b,
            Gen::H => 0,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::T(a) => write!(f, "T{a}"),
            Gen::H => write!(f, "H"),
            Gen::O(a, b) if *a < 10 && *b < 10 => write!(f, "O{a}{b}"),
            Gen::O(a, b) => write!(f, "O{a}_{b}"),
            Gen::C(a) => write!(f, "C{a}"),
        }
    }
}

impl FromStr for Gen {
    type Err = Error;
    fn from_str(s: &str) -> Result<Gen> {
        let bad = || Error::Format(format!("unknown generator name {s:?}"));
        let idx = |t: &str| t.parse::<usize>().ok().filter(|&k| k >= 1).ok_or_else(bad);
        if s == "H" {
            return Ok(Gen::H);
        }
        if let Some(r) = s.strip_prefix('T') {
            return Ok(Gen::T(idx(r)?));
        }
        if let Some(r) = s.strip_prefix('C') {
            return Ok(Gen::C(idx(r)?));
        }
        if let Some(r) = s.strip_prefix('O') {
            let (a, b) = match r.split_once('_') {
                Some((a, b)) => (idx(a)?, idx(b)?),
                None if r.len() == 2 => (idx(&r[..1])?, idx(&r[1..])?),
                None => return Err(bad()),
            };
            if a >= b {
                return Err(bad());
            }
            return Ok(Gen::O(a, b));
        }
        Err(bad())
    }
}

/// Element of the Lie algebra as a combination of basis generators.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CLieElement {
    pub coeffs: BTreeMap<Gen, Scalar>,
}

impl CLieElement {
    pub fn zero() -> Self {
        CLieElement::default()
    }

    pub fn gen(g: Gen) -> Self {
        CLieElement::scaled(g, Scalar::one())
    }

    pub fn scaled(g: Gen, c: Scalar) -> Self {
        let mut e = CLieElement::zero();
        e.add_term(g, &c);
        e
    }

    /// Ω_{αβ} with antisymmetry, 1-based.
    pub fn omega(a: usize, b: usize) -> Self {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => CLieElement::gen(Gen::O(a, b)),
            std::cmp::Ordering::Greater => CLieElement::scaled(Gen::O(b, a), Scalar::from_int(-1)),
            std::cmp::Ordering::Equal => CLieElement::zero(),
        }
    }

    pub fn add_term(&mut self, g: Gen, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(g).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&g);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &CLieElement) -> CLieElement {
        let mut r = self.clone();
        for (g, c) in &o.coeffs {
            r.add_term(*g, c);
        }
        r
    }

    pub fn sub(&self, o: &CLieElement) -> CLieElement {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> CLieElement {
        if s.is_zero() {
            return CLieElement::zero();
        }
        CLieElement { coeffs: self.coeffs.iter().map(|(g, c)| (*g, c * s)).collect() }
    }

    pub fn coeff(&self, g: Gen) -> Scalar {
        self.coeffs.get(&g).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn max_index(&self) -> usize {
        self.coeffs.keys().map(Gen::max_index).max().unwrap_or(0)
    }
}

impl fmt::Display for CLieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(g, c)| format!("({c})*{g}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn delta(a: usize, b: usize) -> i64 {
    i64::from(a == b)
}

fn comb(terms: &[(i64, CLieElement)]) -> CLieElement {
    let mut r = CLieElement::zero();
    for (k, e) in terms {
        if *k != 0 {
            r = r.add(&e.scale(&Scalar::from_int(*k)));
        }
    }
    r
}

/// Bracket of two basis generators from the structure constants.
pub fn bracket_gens(x: Gen, y: Gen) -> CLieElement {
    use Gen::*;
    let t = |a| CLieElement::gen(T(a));
    let c = |a| CLieElement::gen(C(a));
    let h = CLieElement::gen(H);
    let om = CLieElement::omega;
    match (x, y) {
        (H, H) | (H, O(..)) | (O(..), H) | (T(_), T(_)) | (C(_), C(_)) => CLieElement::zero(),
        (H, T(a)) => t(a),
        (T(a), H) => t(a).scale(&Scalar::from_int(-1)),
        (H, C(a)) => c(a).scale(&Scalar::from_int(-1)),
        (C(a), H) => c(a),
        (O(a, b), T(g)) => comb(&[(delta(a, g), t(b)), (-delta(b, g), t(a))]),
        (T(_), O(..)) => bracket_gens(y, x).scale(&Scalar::from_int(-1)),
        (O(a, b), C(g)) => comb(&[(delta(a, g), c(b)), (-delta(b, g), c(a))]),
        (C(_), O(..)) => bracket_gens(y, x).scale(&Scalar::from_int(-1)),
        (T(a), C(b)) => comb(&[(2 * delta(a, b), h), (-2, om(a, b))]),
        (C(_), T(_)) => bracket_gens(y, x).scale(&Scalar::from_int(-1)),
        (O(a1, b1), O(a2, b2)) => comb(&[
            (delta(a1, a2), om(b1, b2)),
            (delta(b1, b2), om(a1, a2)),
            (-delta(a1, b2), om(b1, a2)),
            (-delta(b1, a2), om(a1, b2)),
        ]),
    }
}

pub fn bracket(x: &CLieElement, y: &CLieElement) -> CLieElement {
    let mut r = CLieElement::zero();
    for (g1, c1) in &x.coeffs {
        for (g2, c2) in &y.coeffs {
            let b = bracket_gens(*g1, *g2);
            if !b.is_zero() {
                r = r.add(&b.scale(&(c1 * c2)));
            }
        }
    }
    r
}

/// Antilinear anti-involution compatible with a positive-definite unitary structure:
/// H ↦ H, Ω ↦ −Ω, T_α ↦ −C_α, C_α ↦ −T_α.
pub fn star(x: &CLieElement) -> CLieElement {
    let mut r = CLieElement::zero();
    for (g, c) in &x.coeffs {
        let cc = c.conj();
        let (img, sign) = match *g {
            Gen::H => (Gen::H, 1),
            Gen::O(a, b) => (Gen::O(a, b), -1),
            Gen::T(a) => (Gen::C(a), -1),
            Gen::C(a) => (Gen::T(a), -1),
        };
        r.add_term(img, &cc.scale_int(sign));
    }
    r
}

/// Polynomial in z¹..z^D with Lie algebra coefficients, keyed by exponent vectors.
pub type LiePoly = BTreeMap<Mono, CLieElement>;

/// e^{−ad(z·T)} X as a polynomial in z.
pub fn exp_neg_ad_zt(x: &CLieElement, dim: usize) -> LiePoly {
    let mut out: LiePoly = BTreeMap::new();
    let mut term: LiePoly = BTreeMap::from([(vec![0; dim], x.clone())]);
    let mut k: i64 = 0;
    while !term.is_empty() {
        for (m, e) in &term {
            let slot = out.entry(m.clone()).or_default();
            *slot = slot.add(e);
        }
        out.retain(|_, e| !e.is_zero());
        k += 1;
        // next = −(1/k) ad(z·T) term
        let mut next: LiePoly = BTreeMap::new();
        let f = Scalar::from_frac(-1, k);
        for (m, e) in &term {
            for a in 1..=dim {
                let b = bracket(&CLieElement::gen(Gen::T(a)), e);
                if b.is_zero() {
                    continue;
                }
                let mut m2 = m.clone();
                m2[a - 1] += 1;
                let slot = next.entry(m2).or_default();
                *slot = slot.add(&b.scale(&f));
            }
        }
        next.retain(|_, e| !e.is_zero());
        term = next;
    }
    out
}

/// The one-variable restriction z = x·e₁ of e^{−ad(z·T)} X, keyed by the power of x.
pub fn exp_neg_ad_line(x: &CLieElement, dim: usize) -> BTreeMap<u32, CLieElement> {
    let mut out: BTreeMap<u32, CLieElement> = BTreeMap::new();
    for (m, e) in exp_neg_ad_zt(x, dim) {
        if m[1..].iter().all(|&k| k == 0) {
            out.insert(m[0], e);
        }
    }
    out
}

/// A representation on a graded space, given by the operators of the basis generators.
#[derive(Clone, Debug)]
pub struct CLieRep {
    pub dim: usize,
    pub space: GradedSpace,
    pub action: BTreeMap<Gen, BlockMap>,
}

impl CLieRep {
    pub fn new(dim: usize, space: GradedSpace, action: BTreeMap<Gen, BlockMap>) -> Result<Self> {
        for (g, m) in &action {
            if g.max_index() > dim {
                return Err(Error::Structural(format!("generator {g} outside dimension {dim}")));
            }
            if m.degree2 != g.degree2() {
                return Err(Error::Structural(format!("{g} has degree {} instead of {}", m.degree2, g.degree2())));
            }
            m.check_shape(&space).map_err(|e| Error::Structural(format!("{g}: {e}")))?;
        }
        Ok(CLieRep { dim, space, action })
    }

    pub fn op(&self, g: Gen) -> Option<&BlockMap> {
        self.action.get(&g)
    }

    /// Operator of a Lie algebra element; errors if a generator is missing or degrees are mixed.
    pub fn action_of(&self, x: &CLieElement) -> Result<BlockMap> {
        let mut acc: Option<BlockMap> = None;
        for (g, c) in &x.coeffs {
            let m = self.action.get(g).ok_or_else(|| Error::Precondition(format!("generator {g} not supplied")))?;
            let t = m.scale(c);
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        match acc {
            Some(a) => Ok(a),
            None => Ok(BlockMap::zero(&self.space, 0, 0)),
        }
    }

    /// The operator H + i(Ω₁₂ + Ω₃₄ + …).
    pub fn total_cartan(&self) -> CLieElement {
        let mut x = CLieElement::gen(Gen::H);
        for k in 0..self.dim / 2 {
            x.add_term(Gen::O(2 * k + 1, 2 * k + 2), &Scalar::i());
        }
        x
    }
}

fn witness_entry(g: &str, s: i64, i: usize, j: usize, lhs: &Scalar, rhs: &Scalar) -> serde_json::Value {
    json!({"operator": g, "source_2delta": s, "row": i, "col": j, "lhs": lhs.to_string(), "rhs": rhs.to_string()})
}

fn compare_maps(name: &str, lhs: &BlockMap, rhs: &BlockMap) -> Option<serde_json::Value> {
    lhs.first_difference(rhs).map(|(s, i, j)| {
        let a = lhs.blocks[&s].get(i, j);
        let b = rhs.blocks[&s].get(i, j);
        witness_entry(name, s, i, j, a, b)
    })
}

fn check_brackets(rep: &CLieRep) -> Check {
    let gens: Vec<Gen> = rep.action.keys().copied().collect();
    let pairs: Vec<(Gen, Gen)> =
        gens.iter().enumerate().flat_map(|(i, a)| gens[i + 1..].iter().map(move |b| (*a, *b))).collect();
    let results: Vec<(Status, Option<serde_json::Value>, String)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let br = bracket_gens(a, b);
            let lhs = match rep.action_of(&br) {
                Ok(m) => m,
                Err(_) => return (Status::Inconclusive, None, format!("[{a},{b}] involves a generator not supplied")),
            };
            let rhs = match supercommutator(&rep.action[&a], &rep.action[&b]) {
                Ok(m) => m,
                Err(e) => {
                    return (
                        Status::Fail,
                        Some(json!({"pair": [a.to_string(), b.to_string()], "error": e.to_string()})),
                        e.to_string(),
                    )
                }
            };
            let lhs = if br.is_zero() { BlockMap::zero(&rep.space, rhs.degree2, 0) } else { lhs };
            match compare_maps(&format!("[{a},{b}]"), &lhs, &rhs) {
                Some(w) => (Status::Fail, Some(w), format!("bracket [{a},{b}] not represented")),
                None => (Status::Pass, None, String::new()),
            }
        })
        .collect();
    if let Some((_, w, d)) = results.iter().find(|r| r.0 == Status::Fail) {
        return Check::fail("brackets", d.clone(), w.clone().unwrap_or_default());
    }
    let inconclusive = results.iter().filter(|r| r.0 == Status::Inconclusive).count();
    let window = format!("all blocks with source and target within 2Δ ≤ {}", rep.space.cutoff2);
    if inconclusive > 0 {
        return Check::inconclusive(
            "brackets",
            format!(
                "{} of {} generator pairs checked; others need generators not supplied",
                pairs.len() - inconclusive,
                pairs.len()
            ),
        )
        .with_window(window);
    }
    Check::pass("brackets", format!("{} generator pairs", pairs.len())).with_window(window)
}

fn is_half_integer(s: &Scalar) -> bool {
    s.is_real() && (s.re.clone() * num_rational::BigRational::from_integer(2.into())).is_integer()
}

fn check_positive_energy(rep: &CLieRep) -> Check {
    let Some(h) = rep.op(Gen::H) else {
        return Check::inconclusive("positive_energy", "H not supplied");
    };
    for (&s, m) in &h.blocks {
        if !m.is_diagonal() {
            let (i, j) = (0..m.rows)
                .flat_map(|i| (0..m.cols).map(move |j| (i, j)))
                .find(|&(i, j)| i != j && !m.get(i, j).is_zero())
                .unwrap_or((0, 0));
            return Check::fail(
                "positive_energy",
                "H is not diagonal in the weight basis",
                json!({"source_2delta": s, "row": i, "col": j, "value": m.get(i, j).to_string()}),
            );
        }
        for (i, x) in m.diag().iter().enumerate() {
            if !is_half_integer(x) || x.re < num_rational::BigRational::from_integer(0.into()) {
                return Check::fail(
                    "positive_energy",
                    format!("H eigenvalue {x} is not in ½ℤ≥0"),
                    json!({"source_2delta": s, "index": i, "eigenvalue": x.to_string()}),
                );
            }
            let expected = Scalar::from_frac(s, 2);
            if *x != expected {
                return Check::fail(
                    "positive_energy",
                    format!("H eigenvalue {x} disagrees with grading {expected}"),
                    json!({"source_2delta": s, "index": i, "eigenvalue": x.to_string()}),
                );
            }
        }
    }
    Check::pass("positive_energy", "H diagonal, eigenvalues equal the grading, all in ½ℤ≥0")
}

fn check_integrability(rep: &CLieRep) -> Check {
    let mut n = 0;
    for (g, m) in &rep.action {
        if let Gen::O(..) = g {
            n += 1;
            if m.degree2 != 0 || !m.truncated.is_empty() {
                return Check::fail(
                    "integrability",
                    format!("{g} does not preserve components"),
                    json!({"operator": g.to_string()}),
                );
            }
            for (s, b) in &m.blocks {
                if !b.is_square() || b.rows != rep.space.dim(*s) {
                    return Check::fail(
                        "integrability",
                        format!("{g} block at 2Δ={s} is not square"),
                        json!({"operator": g.to_string(), "source_2delta": s}),
                    );
                }
            }
        }
    }
    Check::pass("integrability", format!("{n} rotation generators close on every finite component"))
}

/// Gershgorin-type integer bound on |λ| for eigenvalues of m.
fn spectral_bound(m: &Matrix) -> i64 {
    let mut best = 0i64;
    for i in 0..m.rows {
        let mut r = num_rational::BigRational::from_integer(0.into());
        for x in m.row(i) {
            r += x.re.abs() + x.im.abs();
        }
        let c: i64 = r.ceil().to_integer().try_into().unwrap_or(i64::MAX / 4);
        best = best.max(c);
    }
    best
}

/// Eigenvalues in `step`-spaced real candidates with kernel dimensions; true if they exhaust the space.
pub(crate) fn scan_spectrum(m: &Matrix, doubled: bool) -> (Vec<(Scalar, Vec<Vec<Scalar>>)>, bool) {
    let n = m.rows;
    if m.is_diagonal() {
        let mut by: BTreeMap<Scalar, Vec<Vec<Scalar>>> = BTreeMap::new();
        for (i, x) in m.diag().into_iter().enumerate() {
            let mut e = vec![Scalar::zero(); n];
            e[i] = Scalar::one();
            by.entry(x).or_default().push(e);
        }
        return (by.into_iter().collect(), true);
    }
    let b = spectral_bound(m);
    let mut out = Vec::new();
    let mut total = 0;
    let (lo, hi, den) = if doubled { (-2 * b, 2 * b, 2) } else { (-b, b, 1) };
    for k in lo..=hi {
        let lam = Scalar::from_frac(k, den);
        let shifted = m.sub(&Matrix::identity(n).scale(&lam));
        let ker = nullspace(&shifted);
        if !ker.is_empty() {
            total += ker.len();
            out.push((lam, ker));
        }
    }
    (out, total == n)
}

fn check_strong_integrability(rep: &CLieRep) -> Check {
    if rep.dim % 2 == 1 {
        return Check::pass("strong_integrability", "only defined for even dimension");
    }
    let x = rep.total_cartan();
    let op = match rep.action_of(&x) {
        Ok(m) => m,
        Err(e) => return Check::inconclusive("strong_integrability", e.to_string()),
    };
    let mut seen: Vec<String> = Vec::new();
    for (&s, m) in &op.blocks {
        let (spec, complete) = scan_spectrum(m, false);
        for (lam, vecs) in &spec {
            let even = lam.as_integer().map(|k| (k % 2u8) == 0.into()).unwrap_or(false);
            if !even {
                return Check::fail(
                    "strong_integrability",
                    format!("eigenvalue {lam} of H + iΣΩ is not an even integer"),
                    json!({"source_2delta": s, "eigenvalue": lam.to_string(), "vector": vecs[0].iter().map(|v| v.to_string()).collect::<Vec<_>>()}),
                );
            }
            if !seen.contains(&lam.to_string()) {
                seen.push(lam.to_string());
            }
        }
        if !complete {
            return Check::fail(
                "strong_integrability",
                format!("H + iΣΩ on 2Δ={s} is not diagonalizable with even integer spectrum"),
                json!({"source_2delta": s}),
            );
        }
    }
    Check::pass("strong_integrability", format!("spectrum of H + iΣΩ is {{{}}}", seen.join(", ")))
}

fn check_unitarity(rep: &CLieRep) -> Check {
    if let Some((s, w)) = rep.space.gram_failure() {
        let norm = rep.space.inner(s, &w, &w);
        return Check::fail(
            "unitarity",
            format!("gram of 2Δ={s} is not positive definite"),
            json!({"source_2delta": s, "vector": w.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "norm": norm.to_string()}),
        );
    }
    let mut missing = Vec::new();
    for (g, m) in &rep.action {
        let st = star(&CLieElement::gen(*g));
        let target = match rep.action_of(&st) {
            Ok(t) => t,
            Err(_) => {
                missing.push(g.to_string());
                continue;
            }
        };
        let adj = match adjoint(m, &rep.space) {
            Ok(a) => a,
            Err(e) => return Check::fail("unitarity", e.to_string(), json!({"operator": g.to_string()})),
        };
        if let Some(w) = compare_maps(&format!("adjoint({g})"), &adj, &target) {
            return Check::fail("unitarity", format!("adjoint of {g} differs from star({g}) = {st}"), w);
        }
    }
    if !missing.is_empty() {
        return Check::inconclusive("unitarity", format!("star image not supplied for {}", missing.join(", ")));
    }
    Check::pass("unitarity", "gram positive definite and Hermitian conjugation equals the star")
}

fn check_weight_bound(rep: &CLieRep) -> Check {
    if rep.dim < 2 {
        return Check::pass("weight_bound", "no rotations");
    }
    let op = match rep.action_of(&CLieElement::scaled(Gen::O(1, 2), Scalar::i())) {
        Ok(m) => m,
        Err(e) => return Check::inconclusive("weight_bound", e.to_string()),
    };
    for (&s, m) in &op.blocks {
        let (spec, complete) = scan_spectrum(m, true);
        let delta = Scalar::from_frac(s, 2);
        for (j, vecs) in &spec {
            let aj = if j.re < num_rational::BigRational::from_integer(0.into()) { -j } else { j.clone() };
            if !j.is_real() || aj.re > delta.re {
                return Check::fail(
                    "weight_bound",
                    format!("eigenvalue j={j} of iΩ₁₂ exceeds Δ={delta}"),
                    json!({"source_2delta": s, "j": j.to_string(), "vector": vecs[0].iter().map(|v| v.to_string()).collect::<Vec<_>>()}),
                );
            }
        }
        if !complete {
            return Check::fail(
                "weight_bound",
                format!("iΩ₁₂ on 2Δ={s} has spectrum outside ½ℤ or is not diagonalizable"),
                json!({"source_2delta": s}),
            );
        }
    }
    Check::pass("weight_bound", "Δ ≥ |j| on all joint eigenvectors of H and iΩ₁₂")
}

/// Checks every hypothesis on the representation; failures are report values.
pub fn validate_rep(rep: &CLieRep) -> Report {
    let mut r = Report::new("validate");
    let checks: Vec<Check> = [
        check_brackets as fn(&CLieRep) -> Check,
        check_positive_energy,
        check_integrability,
        check_strong_integrability,
        check_unitarity,
        check_weight_bound,
    ]
    .par_iter()
    .map(|f| f(rep))
    .collect();
    for c in checks {
        r.push(c);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_constants() {
        let t1 = CLieElement::gen(Gen::T(1));
        let c1 = CLieElement::gen(Gen::C(1));
        let c2 = CLieElement::gen(Gen::C(2));
        let h = CLieElement::gen(Gen::H);
        assert_eq!(bracket(&t1, &c1), h.scale(&Scalar::from_int(2)));
        assert_eq!(bracket(&t1, &c2), CLieElement::omega(1, 2).scale(&Scalar::from_int(-2)));
        assert_eq!(bracket(&h, &t1), t1);
        assert!(bracket(&t1, &CLieElement::gen(Gen::T(2))).is_zero());
    }

    #[test]
    fn star_examples() {
        let io = CLieElement::scaled(Gen::O(1, 2), Scalar::i());
        assert_eq!(star(&io), io);
        assert_eq!(star(&CLieElement::gen(Gen::H)), CLieElement::gen(Gen::H));
        assert_eq!(star(&CLieElement::gen(Gen::T(1))), CLieElement::scaled(Gen::C(1), Scalar::from_int(-1)));
    }

    #[test]
    fn exponential_examples() {
        let h = exp_neg_ad_zt(&CLieElement::gen(Gen::H), 3);
        assert_eq!(h[&vec![0, 0, 0]], CLieElement::gen(Gen::H));
        assert_eq!(h[&vec![0, 1, 0]], CLieElement::gen(Gen::T(2)));
        let line = exp_neg_ad_line(&CLieElement::gen(Gen::C(1)), 2);
        assert_eq!(line[&1], CLieElement::scaled(Gen::H, Scalar::from_int(-2)));
        assert_eq!(line[&2], CLieElement::scaled(Gen::T(1), Scalar::from_int(-1)));
    }

    #[test]
    fn generator_names_round_trip() {
        for g in Gen::all(4) {
            assert_eq!(g.to_string().parse::<Gen>().unwrap(), g);
        }
        assert!("O21".parse::<Gen>().is_err());
        assert!("X1".parse::<Gen>().is_err());
    }
}
