//! Polynomials in z¹..z^D, the Laplacian, rotation vector fields and harmonic bases.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{binom, Scalar};
use crate::gradedlinalg::{inverse, nullspace, rref_rows, Matrix};

pub type Mono = Vec<u32>;

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<(Mono, Scalar)>,
}

/// Polynomial with exact coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct PolyD {
    pub dim: usize,
    pub terms: BTreeMap<Mono, Scalar>,
}

impl From<PolyD> for PolyRepr {
    fn from(p: PolyD) -> Self {
        PolyRepr { dim: p.dim, terms: p.terms.into_iter().collect() }
    }
}

impl TryFrom<PolyRepr> for PolyD {
    type Error = String;
    fn try_from(r: PolyRepr) -> std::result::Result<Self, String> {
        let mut p = PolyD::zero(r.dim);
        for (m, c) in r.terms {
            if m.len() != r.dim {
                return Err(format!("monomial {m:?} has wrong length for dimension {}", r.dim));
            }
            p.add_term(m, &c);
        }
        Ok(p)
    }
}

impl PolyD {
    pub fn zero(dim: usize) -> Self {
        PolyD { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        PolyD::monomial(dim, vec![0; dim], c)
    }

    pub fn one(dim: usize) -> Self {
        PolyD::constant(dim, Scalar::one())
    }

    pub fn monomial(dim: usize, exps: Mono, c: Scalar) -> Self {
        assert_eq!(exps.len(), dim);
        let mut p = PolyD::zero(dim);
        p.add_term(exps, &c);
        p
    }

    /// The coordinate z^{α+1} (0-based index).
    pub fn var(dim: usize, alpha: usize) -> Self {
        let mut e = vec![0; dim];
        e[alpha] = 1;
        PolyD::monomial(dim, e, Scalar::one())
    }

    /// 𝐳² = Σ (z^α)².
    pub fn z_sq(dim: usize) -> Self {
        let mut p = PolyD::zero(dim);
        for a in 0..dim {
            let mut e = vec![0; dim];
            e[a] = 2;
            p.add_term(e, &Scalar::one());
        }
        p
    }

    /// z¹ + s·i·z² for s = ±1, i.e. z⁺ or z⁻ in dimension 2.
    pub fn z_pm(dim: usize, sign: i64) -> Self {
        assert!(dim >= 2);
        PolyD::var(dim, 0).add(&PolyD::var(dim, 1).scale(&Scalar::complex(0, sign)))
    }

    pub fn add_term(&mut self, m: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, m: &[u32]) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &PolyD) -> PolyD {
        assert_eq!(self.dim, o.dim);
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c);
        }
        p
    }

    pub fn sub(&self, o: &PolyD) -> PolyD {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> PolyD {
        if s.is_zero() {
            return PolyD::zero(self.dim);
        }
        PolyD { dim: self.dim, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul(&self, o: &PolyD) -> PolyD {
        assert_eq!(self.dim, o.dim);
        let mut p = PolyD::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Mono = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                p.add_term(m, &(c1 * c2));
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> PolyD {
        let mut p = PolyD::one(self.dim);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    /// Degree if all terms share it; `None` for the zero polynomial or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, m: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == m)
    }

    /// Homogeneous part of a given degree.
    pub fn part(&self, m: u32) -> PolyD {
        PolyD {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == m)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self, alpha: usize) -> PolyD {
        let mut p = PolyD::zero(self.dim);
        for (m, c) in &self.terms {
            if m[alpha] == 0 {
                continue;
            }
            let mut e = m.clone();
            e[alpha] -= 1;
            p.add_term(e, &c.scale_int(m[alpha] as i64));
        }
        p
    }

    /// Multiplication by z^{α+1}.
    pub fn times_var(&self, alpha: usize) -> PolyD {
        PolyD {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.clone();
                    e[alpha] += 1;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    pub fn laplacian(&self) -> PolyD {
        let mut p = PolyD::zero(self.dim);
        for a in 0..self.dim {
            p = p.add(&self.derivative(a).derivative(a));
        }
        p
    }

    pub fn euler(&self) -> PolyD {
        let mut p = PolyD::zero(self.dim);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), &c.scale_int(m.iter().sum::<u32>() as i64));
        }
        p
    }

    /// Rotation vector field (z^α∂_β − z^β∂_α) p, 0-based indices.
    pub fn rotate(&self, alpha: usize, beta: usize) -> PolyD {
        self.derivative(beta).times_var(alpha).sub(&self.derivative(alpha).times_var(beta))
    }

    /// Value along the first axis: coefficients of x^k in p(x·e₁).
    pub fn on_line(&self) -> BTreeMap<u32, Scalar> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[1..].iter().all(|&e| e == 0) {
                out.insert(m[0], c.clone());
            }
        }
        out
    }

    /// p(e₁).
    pub fn at_e1(&self) -> Scalar {
        let mut s = Scalar::zero();
        for c in self.on_line().values() {
            s += c;
        }
        s
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.dim);
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    t = &t * &x.pow(e);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Coefficient vector on the given monomial list.
    pub fn coords_on(&self, monos: &[Mono]) -> Vec<Scalar> {
        monos.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn from_coords(dim: usize, monos: &[Mono], c: &[Scalar]) -> PolyD {
        let mut p = PolyD::zero(dim);
        for (m, x) in monos.iter().zip(c) {
            p.add_term(m.clone(), x);
        }
        p
    }
}

impl fmt::Display for PolyD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(a, &e)| if e == 1 { format!("z{}", a + 1) } else { format!("z{}^{}", a + 1, e) })
                    .collect();
                if vars.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exponent vectors of total degree m, in descending lexicographic order.
pub fn monomials(dim: usize, m: u32) -> Vec<Mono> {
    fn rec(dim: usize, rest: u32, prefix: &mut Mono, out: &mut Vec<Mono>) {
        if prefix.len() + 1 == dim {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=rest).rev() {
            prefix.push(e);
            rec(dim, rest - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, m, &mut Vec::new(), &mut out);
    out
}

/// dim of degree-m harmonic polynomials in D variables.
pub fn harmonic_dim(dim: usize, m: u32) -> usize {
    let count = |k: i64| -> usize {
        if k < 0 {
            0
        } else {
            let r = binom(k + dim as i64 - 1, dim as u32 - 1);
            r.to_integer().try_into().expect("small count")
        }
    };
    count(m as i64) - count(m as i64 - 2)
}

/// Writes a homogeneous p of degree m as Σ_n (𝐳²)^n f_n with f_n harmonic of degree m − 2n.
/// Entry `n` of the result is f_n, for n = 0..=m/2.
pub fn harmonic_decompose_deg(p: &PolyD, m: u32) -> Result<Vec<PolyD>> {
    if !p.is_homogeneous_of(m) {
        return Err(Error::Contract(format!("polynomial is not homogeneous of degree {m}")));
    }
    let dim = p.dim as i64;
    let top = (m / 2) as usize;
    let mut f = vec![PolyD::zero(p.dim); top + 1];
    if m >= 2 {
        let g = harmonic_decompose_deg(&p.laplacian(), m - 2)?;
        // Δ((𝐳²)^s h) = 2s(2m − 2s + D − 2) (𝐳²)^{s−1} h for harmonic h of degree m − 2s
        for (j, gj) in g.into_iter().enumerate() {
            let s = j as i64 + 1;
            let c = 2 * s * (2 * m as i64 - 2 * s + dim - 2);
            if c == 0 {
                if gj.is_zero() {
                    continue;
                }
                return Err(Error::Contract("degenerate harmonic decomposition".into()));
            }
            f[j + 1] = gj.scale(&Scalar::from_frac(1, c));
        }
    }
    let zsq = PolyD::z_sq(p.dim);
    let mut rest = p.clone();
    for (s, fs) in f.iter().enumerate().skip(1) {
        if !fs.is_zero() {
            rest = rest.sub(&zsq.pow(s as u32).mul(fs));
        }
    }
    f[0] = rest;
    Ok(f)
}

/// Harmonic decomposition of a homogeneous polynomial as (n, f_n) pairs.
pub fn harmonic_decompose(p: &PolyD) -> Result<Vec<(u32, PolyD)>> {
    let m = match p.homogeneous_degree() {
        Some(m) => m,
        None if p.is_zero() => 0,
        None => return Err(Error::Contract("polynomial is not homogeneous".into())),
    };
    Ok(harmonic_decompose_deg(p, m)?.into_iter().enumerate().map(|(n, f)| (n as u32, f)).collect())
}

/// Σ_n (𝐳²)^n f_n.
pub fn reassemble(parts: &[(u32, PolyD)], dim: usize) -> PolyD {
    let zsq = PolyD::z_sq(dim);
    let mut p = PolyD::zero(dim);
    for (n, f) in parts {
        p = p.add(&zsq.pow(*n).mul(f));
    }
    p
}

/// Normalized harmonic basis of degree m with the rotation action in it.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub dim: usize,
    pub degree: u32,
    pub polys: Vec<PolyD>,
    /// `rotation[(α, β)]`, 0-based α < β: column σ holds the coordinates of (z^α∂_β − z^β∂_α) h_σ.
    pub rotation: BTreeMap<(usize, usize), Matrix>,
    monos: Vec<Mono>,
    pivots: Vec<usize>,
    pivot_inv: Matrix,
}

impl HarmonicBasis {
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn monomials(&self) -> &[Mono] {
        &self.monos
    }

    /// Coordinates of a harmonic polynomial of this degree.
    pub fn coords(&self, p: &PolyD) -> Result<Vec<Scalar>> {
        if p.dim != self.dim || !p.is_homogeneous_of(self.degree) {
            return Err(Error::Contract(format!("not a homogeneous polynomial of degree {}", self.degree)));
        }
        let rhs: Vec<Scalar> = self.pivots.iter().map(|&k| p.coeff(&self.monos[k])).collect();
        let c = self.pivot_inv.apply(&rhs);
        if self.combine(&c) != *p {
            return Err(Error::Contract("polynomial is not harmonic".into()));
        }
        Ok(c)
    }

    pub fn combine(&self, c: &[Scalar]) -> PolyD {
        let mut p = PolyD::zero(self.dim);
        for (x, h) in c.iter().zip(&self.polys) {
            if !x.is_zero() {
                p = p.add(&h.scale(x));
            }
        }
        p
    }

    /// Rotation matrix for 0-based α ≠ β, with the antisymmetric sign.
    pub fn rotation_of(&self, alpha: usize, beta: usize) -> Matrix {
        if alpha < beta {
            self.rotation[&(alpha, beta)].clone()
        } else {
            self.rotation[&(beta, alpha)].neg()
        }
    }
}

fn laplacian_matrix(dim: usize, m: u32, src: &[Mono]) -> Matrix {
    let tgt = monomials(dim, m - 2);
    let index: HashMap<&Mono, usize> = tgt.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut l = Matrix::zeros(tgt.len(), src.len());
    for (j, e) in src.iter().enumerate() {
        let lp = PolyD::monomial(dim, e.clone(), Scalar::one()).laplacian();
        for (t, c) in &lp.terms {
            l.set(index[t], j, c.clone());
        }
    }
    l
}

fn construct(dim: usize, m: u32) -> HarmonicBasis {
    let monos = monomials(dim, m);
    let n = monos.len();
    let kernel: Vec<Vec<Scalar>> = if m < 2 {
        (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
    } else {
        nullspace(&laplacian_matrix(dim, m, &monos))
    };
    let x1m = PolyD::var(dim, 0).pow(m);
    let h1raw = harmonic_decompose_deg(&x1m, m).expect("homogeneous")[0].clone();
    let h1 = h1raw.scale(&h1raw.at_e1().inv().expect("projection of (z¹)^m is nonzero on e₁"));
    let h1c = h1.coords_on(&monos);
    let rows: Vec<Vec<Scalar>> = kernel
        .iter()
        .map(|v| {
            let e = PolyD::from_coords(dim, &monos, v).at_e1();
            v.iter().zip(&h1c).map(|(a, b)| a - &(&e * b)).collect()
        })
        .collect();
    let (rest, _) = rref_rows(&rows, n, n);
    let mut polys = vec![h1];
    polys.extend(rest.iter().map(|r| PolyD::from_coords(dim, &monos, r)));
    assert_eq!(polys.len(), harmonic_dim(dim, m), "harmonic basis size");

    // pivot columns of the basis matrix give a left inverse for coordinates
    let cols: Vec<Vec<Scalar>> = polys.iter().map(|p| p.coords_on(&monos)).collect();
    let (_, pivots) = rref_rows(&cols, n, n);
    let sq = Matrix::from_rows(pivots.iter().map(|&k| cols.iter().map(|c| c[k].clone()).collect()).collect());
    let pivot_inv = inverse(&sq).expect("independent harmonic basis");
    let mut basis = HarmonicBasis { dim, degree: m, polys, rotation: BTreeMap::new(), monos, pivots, pivot_inv };
    for a in 0..dim {
        for b in a + 1..dim {
            let cols: Vec<Vec<Scalar>> = basis
                .polys
                .iter()
                .map(|h| basis.coords(&h.rotate(a, b)).expect("rotations preserve harmonics"))
                .collect();
            basis.rotation.insert((a, b), Matrix::from_cols(basis.polys.len(), &cols));
        }
    }
    basis
}

type Cache = Mutex<HashMap<(usize, u32), Arc<HarmonicBasis>>>;

/// Harmonic basis h_{m,1}, …, h_{m,𝔥} with h_{m,σ}(x e₁) = δ_{σ,1} x^m, cached per (D, m).
pub fn build_harmonic_basis(dim: usize, m: u32) -> Arc<HarmonicBasis> {
    assert!(dim >= 1, "dimension must be positive");
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().expect("cache poisoned").get(&(dim, m)) {
        return b.clone();
    }
    let b = Arc::new(construct(dim, m));
    cache.lock().expect("cache poisoned").entry((dim, m)).or_insert(b).clone()
}

/// The so(D−1)-invariant harmonic h_m from the generating series of ((e₁+z)²)^{−(D−2)/2}.
pub fn gegenbauer_h(dim: usize, m: u32) -> Result<PolyD> {
    if dim % 2 == 1 {
        return Err(Error::Precondition("even dimension required".into()));
    }
    let lambda = (dim as i64 - 2) / 2;
    let norm = binom(-(dim as i64) + 2, m);
    if norm == num_rational::BigRational::from_integer(0.into()) {
        return Err(Error::Normalization(format!("binomial normalization vanishes for D={dim}, m={m}")));
    }
    // degree-m part of Σ_k binom(−λ, k) (2z¹ + 𝐳²)^k; only j = 2k − m factors of 2z¹ contribute
    let two_z1 = PolyD::var(dim, 0).scale(&Scalar::from_int(2));
    let zsq = PolyD::z_sq(dim);
    let mut acc = PolyD::zero(dim);
    for k in m.div_ceil(2)..=m {
        let j = 2 * k - m;
        let c = Scalar::from_rational(binom(-lambda, k) * binom(k as i64, j));
        acc = acc.add(&two_z1.pow(j).mul(&zsq.pow(k - j)).scale(&c));
    }
    Ok(acc.scale(&Scalar::from_rational(norm).inv()?))
}

/// Coordinates of (z⁺)^m and (z⁻)^m in the D = 2 harmonic basis.
pub fn d2_pm_coords(m: u32) -> (Vec<Scalar>, Vec<Scalar>) {
    let b = build_harmonic_basis(2, m);
    let plus = b.coords(&PolyD::z_pm(2, 1).pow(m)).expect("(z+)^m is harmonic");
    let minus = b.coords(&PolyD::z_pm(2, -1).pow(m)).expect("(z-)^m is harmonic");
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_of_square_norm() {
        for d in 1..=6 {
            assert_eq!(PolyD::z_sq(d).laplacian(), PolyD::constant(d, Scalar::from_int(2 * d as i64)));
        }
    }

    #[test]
    fn euler_of_cube() {
        let p = PolyD::var(3, 0).pow(3);
        assert_eq!(p.euler(), p.scale(&Scalar::from_int(3)));
    }

    #[test]
    fn powers_of_null_coordinate_are_harmonic() {
        for m in 0..=6 {
            assert!(PolyD::z_pm(2, 1).pow(m).laplacian().is_zero());
        }
    }

    #[test]
    fn decompose_square_norm() {
        let parts = harmonic_decompose(&PolyD::z_sq(4)).unwrap();
        assert_eq!(parts, vec![(0, PolyD::zero(4)), (1, PolyD::one(4))]);
    }

    #[test]
    fn decompose_x_squared_in_two_dims() {
        // (z¹)² = ¼(z⁺)² + ¼(z⁻)² + ½𝐳²
        let zp = PolyD::z_pm(2, 1);
        let zm = PolyD::z_pm(2, -1);
        let q = Scalar::from_frac(1, 4);
        let harm = zp.pow(2).scale(&q).add(&zm.pow(2).scale(&q));
        let parts = harmonic_decompose(&PolyD::var(2, 0).pow(2)).unwrap();
        assert_eq!(parts, vec![(0, harm), (1, PolyD::constant(2, Scalar::from_frac(1, 2)))]);
    }

    #[test]
    fn non_homogeneous_rejected() {
        let p = PolyD::one(2).add(&PolyD::var(2, 0));
        assert!(matches!(harmonic_decompose(&p), Err(Error::Contract(_))));
    }

    #[test]
    fn small_bases() {
        let b = build_harmonic_basis(2, 0);
        assert_eq!(b.polys, vec![PolyD::one(2)]);
        let b = build_harmonic_basis(2, 2);
        assert_eq!(b.len(), 2);
        let line = b.polys[0].on_line();
        assert_eq!(line, BTreeMap::from([(2, Scalar::one())]));
        assert!(b.polys[1].on_line().is_empty());
        assert_eq!(build_harmonic_basis(4, 1).len(), 4);
    }

    #[test]
    fn gegenbauer_low_degrees() {
        assert_eq!(gegenbauer_h(4, 0).unwrap(), PolyD::one(4));
        assert_eq!(gegenbauer_h(4, 1).unwrap(), PolyD::var(4, 0));
        let h2 = gegenbauer_h(4, 2).unwrap();
        assert!(h2.laplacian().is_zero());
        assert_eq!(h2.on_line(), BTreeMap::from([(2, Scalar::one())]));
        assert!(matches!(gegenbauer_h(2, 3), Err(Error::Normalization(_))));
    }
}
