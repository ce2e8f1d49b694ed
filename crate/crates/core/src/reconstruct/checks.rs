//! Post hoc verification of a reconstructed table: restriction, poles, covariance, Taylor shift, locality.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::series::{restrict_to_line, taylor_shift, Mixed, MixedZW, SeriesZ};
use super::{assemble_series, component_j2, pole_bound, MuDTable};
use crate::chiral::{n_range, ModeTable};
use crate::conflie::{CLieElement, CLieRep, Gen};
use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::gradedlinalg::{BlockMap, HVec};
use crate::report::{Check, Report, Status};

fn to_json_vec(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

/// Basis vectors whose degree lies within the reconstructed source window.
pub fn source_basis(mud: &MuDTable) -> Vec<HVec> {
    let mut out = Vec::new();
    for d in mud.space.degrees() {
        if d > mud.source_cutoff2 {
            continue;
        }
        let n = mud.space.dim(d);
        for i in 0..n {
            out.push(HVec::basis(d, n, i));
        }
    }
    out
}

fn parity_of(mud: &MuDTable, v: &HVec) -> u8 {
    mud.space.labels(v.delta2).iter().zip(&v.v).filter(|(_, c)| !c.is_zero()).fold(0, |acc, (l, _)| acc | l.parity)
}

/// Tally of conclusive and inconclusive items with the first failure.
#[derive(Default)]
struct Tally {
    conclusive: usize,
    inconclusive: usize,
    witness: Option<Value>,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.conclusive += o.conclusive;
        self.inconclusive += o.inconclusive;
        if self.witness.is_none() {
            self.witness = o.witness;
        }
        self
    }

    fn record(&mut self, r: Result<Option<Value>>) -> Result<()> {
        match r {
            Ok(None) => self.conclusive += 1,
            Ok(Some(w)) => {
                self.conclusive += 1;
                if self.witness.is_none() {
                    self.witness = Some(w);
                }
            }
            Err(Error::Inconclusive(_)) => self.inconclusive += 1,
            Err(e) => return Err(e),
        }
        Ok(())
    }

    fn into_check(self, name: &str, what: &str, window: String) -> Check {
        let c = match self.witness {
            Some(w) => Check::fail(name, format!("{what} violated"), w),
            None if self.conclusive == 0 && self.inconclusive > 0 => {
                Check::inconclusive(name, format!("no conclusive {what} coefficient in the window"))
            }
            None => {
                Check::pass(name, format!("{what}: {} conclusive, {} inconclusive", self.conclusive, self.inconclusive))
            }
        };
        c.with_window(window)
    }
}

fn window(mud: &MuDTable) -> String {
    format!("2Δ ≤ {}, sources 2Δ ≤ {}", mud.cutoff2(), mud.source_cutoff2)
}

/// restrict_to_line ∘ assemble_series = Y₁(a,x)b on every in-window basis pair.
pub fn check_restriction(mud: &MuDTable, table: &ModeTable) -> Check {
    if mud.space != table.space {
        return Check::fail("restriction", "table and chiral data live on different spaces", json!({}));
    }
    let basis = source_basis(mud);
    let pairs: Vec<(&HVec, &HVec)> = basis.iter().flat_map(|a| basis.iter().map(move |b| (a, b))).collect();
    let tally = pairs
        .par_iter()
        .map(|(a, b)| {
            let mut t = Tally::default();
            let r = (|| -> Result<Option<Value>> {
                let line = restrict_to_line(&assemble_series(mud, a, b)?);
                for n in n_range(a.delta2, b.delta2, mud.cutoff2()) {
                    let want = table.mu(a, n, b)?;
                    let got = line.get(&n).cloned().unwrap_or_else(|| HVec::zero(want.delta2, want.v.len()));
                    if got.v != want.v && !(got.is_zero() && want.is_zero()) {
                        return Ok(Some(json!({
                            "a": [a.delta2, to_json_vec(&a.v)], "b": [b.delta2, to_json_vec(&b.v)], "n": n,
                            "restricted": to_json_vec(&got.v), "chiral": to_json_vec(&want.v),
                        })));
                    }
                }
                Ok(None)
            })();
            if let Err(e) = t.record(r) {
                t.witness.get_or_insert(json!({"error": e.to_string()}));
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    tally.into_check("restriction", "restriction identity", window(mud))
}

/// Every nonzero block obeys (m − n)/2 ≤ ⌊½(Δ'+J'+Δ''+J'')⌋ with component-level J.
pub fn check_poles(mud: &MuDTable, rep: &CLieRep) -> Check {
    let mut j2 = BTreeMap::new();
    for d in mud.space.degrees() {
        match component_j2(rep, d) {
            Ok(j) => {
                j2.insert(d, j);
            }
            Err(e) => return Check::fail("poles", format!("weight data unavailable: {e}"), json!({"2delta": d})),
        }
    }
    let mut checked = 0;
    let mut deepest = 0i64;
    for (&(d1, d2, n, m, s), b) in &mud.blocks {
        if b.is_zero() {
            continue;
        }
        checked += 1;
        let bound = (d1 + j2[&d1] + d2 + j2[&d2]) / 4;
        let pole = (m as i64 - n) / 2;
        deepest = deepest.max(pole);
        if pole > bound {
            return Check::fail(
                "poles",
                "block below the pole bound",
                json!({"block": format!("({d1},{d2},{n},{m},{s})"), "pole": pole, "bound": bound}),
            )
            .with_window(window(mud));
        }
    }
    Check::pass("poles", format!("{checked} nonzero blocks within the bound; deepest pole (𝐳²)^-{deepest}"))
        .with_window(window(mud))
}

/// Realized pole order and pole_bound for one pair: (−min p, bound).
pub fn pole_tightness(mud: &MuDTable, rep: &CLieRep, a: &HVec, b: &HVec) -> Result<(i64, u32)> {
    let s = assemble_series(mud, a, b)?;
    Ok((-s.min_pole().unwrap_or(0).min(0), pole_bound(rep, a, b)?))
}

/// Series Y_D(x,z)y with vectors grouped by target degree.
struct Field<'a> {
    mud: &'a MuDTable,
    s: SeriesZ,
}

impl<'a> Field<'a> {
    fn new(mud: &'a MuDTable, x: &HVec, y: &HVec) -> Result<Self> {
        Ok(Field { mud, s: assemble_series(mud, x, y)? })
    }

    /// Terms whose vectors lie in V_t.
    fn at(&self, t: i64) -> Result<Mixed> {
        let vdim = self.mud.space.dim(t);
        let d = t - self.s.base2;
        if d.rem_euclid(2) != 0 || t < 0 {
            return Ok(Mixed::new(self.s.dim, vdim));
        }
        if t > self.mud.cutoff2() {
            return Err(Error::Inconclusive(format!("target 2Δ={t} beyond the cutoff")));
        }
        self.s.group(d / 2, vdim)
    }
}

fn apply_op(x: &BlockMap, g: &Mixed, t: i64, vdim: usize) -> Result<Mixed> {
    let mut out = Mixed::new(g.dim, vdim);
    for ((p, mono), v) in &g.terms {
        let w = x.apply(&HVec { delta2: t, v: v.clone() })?;
        out.add_term(*p, mono.clone(), &w.v, &Scalar::one());
    }
    Ok(out)
}

fn op_of(rep: &CLieRep, x: &CLieElement) -> Result<BlockMap> {
    rep.action_of(x)
}

fn witness_mixed(name: &str, a: &HVec, b: &HVec, t: i64, g: &Mixed) -> Value {
    let (k, v) = g.terms.iter().next().map(|(k, v)| (k.clone(), v.clone())).unwrap_or_default();
    json!({
        "relation": name, "a": [a.delta2, to_json_vec(&a.v)], "b": [b.delta2, to_json_vec(&b.v)],
        "target_2delta": t, "zsq_power": k.0, "monomial": k.1, "coefficient": to_json_vec(&v),
    })
}

/// One covariance relation for the pair (a, b): LHS − RHS at every target degree.
fn relation_pair(mud: &MuDTable, rep: &CLieRep, fam: &Family, a: &HVec, b: &HVec) -> Result<Tally> {
    let dim = mud.dim;
    let k2 = mud.cutoff2();
    let s = Field::new(mud, a, b)?;
    let mut tally = Tally::default();
    let x = op_of(rep, &fam.elem)?;
    let xa = x.apply(a);
    let xb = x.apply(b);
    let dx = fam.elem_degree2;
    let t0 = a.delta2 + b.delta2 + dx;
    let y_a_xb = match &xb {
        Ok(xb) => Some(Field::new(mud, a, xb)?),
        Err(_) => None,
    };
    let y_xa_b = match &xa {
        Ok(xa) => Some(Field::new(mud, xa, b)?),
        Err(_) => None,
    };
    let mut t = t0.rem_euclid(2);
    while t <= k2 {
        let vd = mud.space.dim(t);
        let r = (|| -> Result<Option<Value>> {
            let ya = y_xa_b.as_ref().ok_or_else(|| Error::Inconclusive("X a beyond the cutoff".into()))?;
            let diff = match fam.kind {
                Kind::TranslationDerivative(al) => s.at(t)?.derivative(al).sub(&ya.at(t)?),
                Kind::TranslationCommutator | Kind::Dilation | Kind::Rotation(..) | Kind::Special(_) => {
                    let yb = y_a_xb.as_ref().ok_or_else(|| Error::Inconclusive("X b beyond the cutoff".into()))?;
                    let lhs = apply_op(&x, &s.at(t - dx)?, t - dx, vd)?.sub(&yb.at(t)?);
                    let rhs = match fam.kind {
                        Kind::TranslationCommutator => ya.at(t)?,
                        Kind::Dilation => ya.at(t)?.add(&s.at(t)?.euler()),
                        Kind::Rotation(al, be) => {
                            let g = s.at(t)?;
                            let vf = g.derivative(be).times_var(al).sub(&g.derivative(al).times_var(be));
                            ya.at(t)?.add(&vf)
                        }
                        Kind::Special(al) => {
                            let g = s.at(t)?;
                            let mut r = ya.at(t)?;
                            let ha = op_of(rep, &CLieElement::gen(Gen::H))?.apply(a)?;
                            let yh = Field::new(mud, &ha, b)?.at(t)?;
                            r = r.axpy(&Scalar::from_int(-2), &yh.times_var(al));
                            for be in 0..dim {
                                if be == al {
                                    continue;
                                }
                                let oa = op_of(rep, &CLieElement::omega(al + 1, be + 1))?.apply(a)?;
                                let yo = Field::new(mud, &oa, b)?.at(t)?;
                                r = r.axpy(&Scalar::from_int(-2), &yo.times_var(be));
                            }
                            r = r.add(&g.derivative(al).times_zsq(1));
                            r.axpy(&Scalar::from_int(-2), &g.euler().times_var(al))
                        }
                        Kind::TranslationDerivative(_) => unreachable!(),
                    };
                    lhs.sub(&rhs)
                }
            };
            Ok((!diff.is_zero_function()).then(|| witness_mixed(&fam.name, a, b, t, &diff)))
        })();
        tally.record(r)?;
        t += 2;
    }
    Ok(tally)
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    TranslationDerivative(usize),
    TranslationCommutator,
    Dilation,
    Rotation(usize, usize),
    Special(usize),
}

struct Family {
    name: String,
    kind: Kind,
    elem: CLieElement,
    elem_degree2: i64,
}

fn families(dim: usize) -> Vec<(String, Vec<Family>)> {
    let mut out = Vec::new();
    let fam = |name: String, kind, elem, d| Family { name, kind, elem, elem_degree2: d };
    out.push((
        "translation_derivative".into(),
        (0..dim)
            .map(|a| {
                fam(
                    format!("dY/dz{} = Y(T{} a)", a + 1, a + 1),
                    Kind::TranslationDerivative(a),
                    CLieElement::gen(Gen::T(a + 1)),
                    2,
                )
            })
            .collect(),
    ));
    out.push((
        "translation".into(),
        (0..dim)
            .map(|a| fam(format!("[T{},Y]", a + 1), Kind::TranslationCommutator, CLieElement::gen(Gen::T(a + 1)), 2))
            .collect(),
    ));
    out.push(("dilation".into(), vec![fam("[H,Y]".into(), Kind::Dilation, CLieElement::gen(Gen::H), 0)]));
    let mut rots = Vec::new();
    for a in 0..dim {
        for b in a + 1..dim {
            rots.push(fam(
                format!("[O{}{},Y]", a + 1, b + 1),
                Kind::Rotation(a, b),
                CLieElement::gen(Gen::O(a + 1, b + 1)),
                0,
            ));
        }
    }
    out.push(("rotation".into(), rots));
    out.push((
        "special_conformal".into(),
        (0..dim)
            .map(|a| fam(format!("[C{},Y]", a + 1), Kind::Special(a), CLieElement::gen(Gen::C(a + 1)), -2))
            .collect(),
    ));
    out
}

/// The conformal covariance relations for T, H, Ω and C, coefficientwise on the window.
pub fn check_covariance_d(mud: &MuDTable, rep: &CLieRep) -> Report {
    let mut report = Report::new("covariance");
    if rep.dim != mud.dim || rep.space != mud.space {
        report.push(Check::fail(
            "covariance",
            "representation does not match the table",
            json!({"rep_dim": rep.dim, "table_dim": mud.dim}),
        ));
        return report;
    }
    let basis = source_basis(mud);
    let pairs: Vec<(&HVec, &HVec)> = basis.iter().flat_map(|a| basis.iter().map(move |b| (a, b))).collect();
    for (name, fams) in families(mud.dim) {
        let missing: Vec<String> = fams
            .iter()
            .flat_map(|f| {
                Gen::all(mud.dim).into_iter().filter(move |g| {
                    !f.elem.coeff(*g).is_zero() || (matches!(f.kind, Kind::Special(_)) && !matches!(g, Gen::T(_)))
                })
            })
            .filter(|g| rep.op(*g).is_none())
            .map(|g| g.to_string())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        if !missing.is_empty() {
            report.push(Check::inconclusive(&name, format!("generators not supplied: {}", missing.join(", "))));
            continue;
        }
        let mut total = Tally::default();
        let mut error = None;
        for f in &fams {
            let r: Vec<Result<Tally>> = pairs.par_iter().map(|(a, b)| relation_pair(mud, rep, f, a, b)).collect();
            for t in r {
                match t {
                    Ok(t) => total = total.merge(t),
                    Err(e) => {
                        error.get_or_insert(e);
                    }
                }
            }
        }
        let c = match error {
            Some(e) => Check::fail(&name, format!("relation could not be evaluated: {e}"), json!({})),
            None => total.into_check(&name, &name, window(mud)),
        };
        report.push(c);
    }
    report
}

/// Coefficients of u^e in Y_D(a, z+u)b restricted to z = x e₁ equal Y₁(T^e a / e!, x)b.
pub fn check_taylor(mud: &MuDTable, table: &ModeTable, rep: &CLieRep, order: u32) -> Check {
    if let Some(k) = (1..=mud.dim).find(|&k| rep.op(Gen::T(k)).is_none()) {
        return Check::inconclusive("taylor_shift", format!("generator T{k} not supplied"));
    }
    let basis = source_basis(mud);
    let pairs: Vec<(&HVec, &HVec)> = basis.iter().flat_map(|a| basis.iter().map(move |b| (a, b))).collect();
    let space = &mud.space;
    let t = |k: usize| rep.op(Gen::T(k + 1)).cloned();
    let tally = pairs
        .par_iter()
        .map(|(a, b)| {
            let mut tally = Tally::default();
            let shifted = match assemble_series(mud, a, b).and_then(|s| taylor_shift(&s, order, |d| space.dim(d))) {
                Ok(x) => x,
                Err(e) => {
                    let _ = tally.record(Err(e));
                    return tally;
                }
            };
            for (mono, s) in shifted {
                let r = (|| -> Result<Option<Value>> {
                    // T^e a / e!
                    let mut ta = (*a).clone();
                    for (al, &k) in mono.iter().enumerate() {
                        let op = t(al).ok_or_else(|| Error::Precondition(format!("T{} missing", al + 1)))?;
                        for _ in 0..k {
                            ta = op.apply(&ta)?;
                        }
                    }
                    ta = ta.scale(&super::series::inv_multifactorial(&mono));
                    let line = restrict_to_line(&s);
                    for n in n_range(ta.delta2, b.delta2, mud.cutoff2()) {
                        if n > s.max_n {
                            continue;
                        }
                        let want = table.mu(&ta, n, b)?;
                        let got = line.get(&n).cloned().unwrap_or_else(|| HVec::zero(want.delta2, want.v.len()));
                        if !(got.v == want.v || (got.is_zero() && want.is_zero())) {
                            return Ok(Some(json!({"monomial": mono, "n": n, "shifted": to_json_vec(&got.v), "chiral": to_json_vec(&want.v)})));
                        }
                    }
                    Ok(None)
                })();
                if let Err(e) = tally.record(r) {
                    tally.witness.get_or_insert(json!({"error": e.to_string()}));
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);
    tally.into_check("taylor_shift", "Taylor shift identity", window(mud))
}

/// Products Y_D(·,z)Y_D(·,w)c by bidegree, with lazily assembled series.
struct ZWContext<'a> {
    mud: &'a MuDTable,
    series: std::sync::Mutex<HashMap<(i64, Vec<String>, i64, usize), std::result::Result<SeriesZ, String>>>,
}

impl<'a> ZWContext<'a> {
    fn series(&self, x: &HVec, d: i64, k: usize) -> Result<SeriesZ> {
        let key = (x.delta2, x.v.iter().map(|s| s.to_string()).collect::<Vec<_>>(), d, k);
        if let Some(s) = self.series.lock().expect("poisoned").get(&key) {
            return s.clone().map_err(Error::Inconclusive);
        }
        let e = HVec::basis(d, self.mud.space.dim(d), k);
        let r = assemble_series(self.mud, x, &e).map_err(|e| e.to_string());
        self.series.lock().expect("poisoned").insert(key, r.clone());
        r.map_err(Error::Inconclusive)
    }

    /// Group of Y(x,u)[Y(y,v)c]_{n_v} at u-degree n_u; keys are (u-part, v-part).
    fn ordered(&self, x: &HVec, y: &HVec, c: &HVec, n_u: i64, n_v: i64) -> Result<MixedZW> {
        let dim = self.mud.dim;
        let mut out = MixedZW::new(dim);
        let mid = y.delta2 + c.delta2 + 2 * n_v;
        if mid < 0 {
            return Ok(out);
        }
        let inner = assemble_series(self.mud, y, c)?.group(n_v, self.mud.space.dim(mid))?;
        if inner.terms.is_empty() {
            return Ok(out);
        }
        let fin = x.delta2 + mid + 2 * n_u;
        if fin < 0 {
            return Ok(out);
        }
        for ((q, f), v) in &inner.terms {
            for (k, vk) in v.iter().enumerate() {
                if vk.is_zero() {
                    continue;
                }
                let g = self.series(x, mid, k)?.group(n_u, self.mud.space.dim(fin))?;
                for ((p, e), u) in &g.terms {
                    out.add_term((*p, e.clone(), *q, f.clone()), u, vk);
                }
            }
        }
        Ok(out)
    }

    fn commutator(&self, a: &HVec, b: &HVec, c: &HVec, nz: i64, nw: i64, eps: i64) -> Result<MixedZW> {
        let mut f = self.ordered(a, b, c, nz, nw)?;
        let ba = self.ordered(b, a, c, nw, nz)?;
        let mut swapped = MixedZW::new(self.mud.dim);
        for ((p, e, q, g), v) in ba.terms {
            swapped.add_term((q, g, p, e), &v, &Scalar::one());
        }
        f.axpy(&Scalar::from_int(-eps), &swapped);
        Ok(f)
    }
}

fn mul_zw(x: &MixedZW, poly: &MixedZW) -> MixedZW {
    let mut out = MixedZW::new(x.dim);
    for ((p, e, q, f), v) in &x.terms {
        for ((p2, e2, q2, f2), c) in &poly.terms {
            let e3 = e.iter().zip(e2).map(|(a, b)| a + b).collect();
            let f3 = f.iter().zip(f2).map(|(a, b)| a + b).collect();
            out.add_term((p + p2, e3, q + q2, f3), v, &c[0]);
        }
    }
    out
}

/// Bidegree pieces of ((z−w)²)^N.
fn sep_pieces(dim: usize, n: u32) -> BTreeMap<i64, MixedZW> {
    let mut s = MixedZW::new(dim);
    s.add_term((0, vec![0; dim], 0, vec![0; dim]), &[Scalar::one()], &Scalar::one());
    for _ in 0..n {
        s = s.times_sep_sq();
    }
    let mut out: BTreeMap<i64, MixedZW> = BTreeMap::new();
    for ((p, e, q, f), v) in s.terms {
        let dz = 2 * p + e.iter().map(|&k| k as i64).sum::<i64>();
        out.entry(dz).or_insert_with(|| MixedZW::new(dim)).add_term((p, e, q, f), &v, &Scalar::one());
    }
    out
}

/// Coefficients of ((z−w)²)^N [Y_D(a,z),Y_D(b,w)]c by bidegree: (conclusive, inconclusive, witness).
pub fn locality_d_triple(mud: &MuDTable, a: &HVec, b: &HVec, c: &HVec, n_pow: u32) -> (usize, usize, Option<Value>) {
    let ctx = ZWContext { mud, series: Default::default() };
    let eps = if parity_of(mud, a) & parity_of(mud, b) == 1 { -1 } else { 1 };
    let pieces = sep_pieces(mud.dim, n_pow);
    let n2 = 2 * n_pow as i64;
    let k2 = mud.cutoff2();
    let total2 = a.delta2 + b.delta2 + c.delta2;
    let span = (total2 + k2) / 2 + n2 + 2;
    let mut cache: HashMap<(i64, i64), std::result::Result<MixedZW, ()>> = HashMap::new();
    let (mut conclusive, mut inconclusive) = (0, 0);
    let mut witness = None;
    for pz in -span..=span {
        for qw in -span..=span {
            let t = total2 + 2 * (pz + qw - n2);
            if t < 0 || t > k2 {
                continue;
            }
            let mut acc = MixedZW::new(mud.dim);
            let mut ok = true;
            for (&dz, piece) in &pieces {
                let key = (pz - dz, qw - (n2 - dz));
                let f = cache
                    .entry(key)
                    .or_insert_with(|| ctx.commutator(a, b, c, key.0, key.1, eps).map_err(|_| ()))
                    .clone();
                match f {
                    Ok(f) => acc.axpy(&Scalar::one(), &mul_zw(&f, piece)),
                    Err(()) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                inconclusive += 1;
                continue;
            }
            conclusive += 1;
            if witness.is_none() {
                if let Some(v) = acc.nonzero_witness() {
                    witness = Some(json!({
                        "a": [a.delta2, to_json_vec(&a.v)], "b": [b.delta2, to_json_vec(&b.v)],
                        "c": [c.delta2, to_json_vec(&c.v)], "z_degree": pz, "w_degree": qw,
                        "N": n_pow, "coefficient": to_json_vec(&v),
                    }));
                }
            }
        }
    }
    (conclusive, inconclusive, witness)
}

/// ((z−w)²)^N [Y_D(a,z),Y_D(b,w)] c = 0 for every c in `cs`.
pub fn check_locality_d(mud: &MuDTable, a: &HVec, b: &HVec, n_pow: u32, cs: &[HVec]) -> Check {
    let results: Vec<_> = cs.par_iter().map(|c| locality_d_triple(mud, a, b, c, n_pow)).collect();
    let mut t = Tally::default();
    for (c, i, w) in results {
        t = t.merge(Tally { conclusive: c, inconclusive: i, witness: w });
    }
    let name = format!("locality N={n_pow}");
    t.into_check(&name, "D-dimensional locality", window(mud))
}

/// Smallest N ≤ `max` whose conclusive coefficients all vanish on `cs`.
pub fn minimal_locality_n(mud: &MuDTable, a: &HVec, b: &HVec, cs: &[HVec], max: u32) -> Option<u32> {
    (0..=max).find(|&n| check_locality_d(mud, a, b, n, cs).status == Status::Pass)
}

/// Locality at the pole-bound-derived N for all in-window basis pairs, tested on `cs`.
pub fn check_locality_suite(mud: &MuDTable, rep: &CLieRep, max_sum2: i64) -> Report {
    let mut report = Report::new("locality");
    let basis = source_basis(mud);
    let mut tally = Tally::default();
    let mut errors = Vec::new();
    for a in &basis {
        for b in &basis {
            let cs: Vec<HVec> = basis.iter().filter(|c| a.delta2 + b.delta2 + c.delta2 <= max_sum2).cloned().collect();
            if cs.is_empty() {
                continue;
            }
            let n = match pole_bound(rep, a, b) {
                Ok(n) => n,
                Err(e) => {
                    errors.push(e.to_string());
                    continue;
                }
            };
            let results: Vec<_> = cs.par_iter().map(|c| locality_d_triple(mud, a, b, c, n)).collect();
            for (c, i, w) in results {
                tally = tally.merge(Tally { conclusive: c, inconclusive: i, witness: w });
            }
        }
    }
    if let Some(e) = errors.first() {
        report.push(Check::fail("locality", format!("pole bound unavailable: {e}"), json!({})));
    }
    report.push(tally.into_check("locality", "D-dimensional locality at the pole-bound N", window(mud)));
    report
}

/// Empirically minimal N against the bound-derived N per basis pair; observational, fails only if the bound itself fails.
pub fn locality_minimal_report(mud: &MuDTable, rep: &CLieRep, max_sum2: i64) -> Check {
    let basis = source_basis(mud);
    let mut pairs = 0;
    let mut below = 0;
    let mut gaps: BTreeMap<u32, usize> = BTreeMap::new();
    for a in &basis {
        for b in &basis {
            let cs: Vec<HVec> = basis.iter().filter(|c| a.delta2 + b.delta2 + c.delta2 <= max_sum2).cloned().collect();
            let Ok(bound) = pole_bound(rep, a, b) else { continue };
            if cs.is_empty() || check_locality_d(mud, a, b, bound, &cs).status != Status::Pass {
                continue;
            }
            let mut n = bound;
            while n > 0 && check_locality_d(mud, a, b, n - 1, &cs).status == Status::Pass {
                n -= 1;
            }
            pairs += 1;
            below += (n < bound) as usize;
            *gaps.entry(bound - n).or_default() += 1;
        }
    }
    let hist: Vec<String> = gaps.iter().map(|(g, k)| format!("{k} pairs with bound − minimal = {g}")).collect();
    Check::pass(
        "locality_minimal",
        format!("{pairs} pairs; minimal N below the bound for {below}; {}", hist.join(", ")),
    )
    .with_window(window(mud))
}

/// Parity, restriction, poles, covariance and locality reports for one table.
pub fn run_suites(mud: &MuDTable, table: &ModeTable, rep: &CLieRep, suites: &[&str]) -> Report {
    let mut report = Report::new("checks");
    for s in suites {
        match *s {
            "parity" => report.push(mud.check_parity()),
            "restriction" => report.push(check_restriction(mud, table)),
            "poles" => report.push(check_poles(mud, rep)),
            "covariance" => {
                report.extend(check_covariance_d(mud, rep));
                report.push(check_taylor(mud, table, rep, 2));
            }
            "locality" => {
                report.extend(check_locality_suite(mud, rep, mud.cutoff2()));
                report.push(locality_minimal_report(mud, rep, mud.cutoff2()));
            }
            other => report.push(Check::new(other, Status::Fail, "unknown suite")),
        }
    }
    report
}
