//! Series in z with coefficients (𝐳²)^p h_{m,σ}(z), and their mixed monomial form.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactnum::{factorial, Rational, Scalar};
use crate::gradedlinalg::HVec;
use crate::polyharm::{build_harmonic_basis, harmonic_decompose_deg, Mono, PolyD};

/// Σ (𝐳²)^p h_{m,σ}(z) v_{p,m,σ}; conclusive for total degree n = 2p + m ≤ `max_n`.
/// The coefficient at (p, m, σ) lives in degree `base2 / 2 + 2p + m`; σ is 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesZ {
    pub dim: usize,
    pub base2: i64,
    pub max_n: i64,
    pub coeffs: BTreeMap<(i64, u32, usize), HVec>,
}

impl SeriesZ {
    pub fn new(dim: usize, base2: i64, max_n: i64) -> Self {
        SeriesZ { dim, base2, max_n, coeffs: BTreeMap::new() }
    }

    pub fn add_coeff(&mut self, p: i64, m: u32, sigma: usize, v: &HVec) {
        if v.is_zero() {
            return;
        }
        let key = (p, m, sigma);
        let sum = match self.coeffs.remove(&key) {
            Some(old) => old.add(v),
            None => v.clone(),
        };
        if !sum.is_zero() {
            self.coeffs.insert(key, sum);
        }
    }

    /// None means a zero coefficient; out-of-window lookups are inconclusive.
    pub fn get(&self, p: i64, m: u32, sigma: usize) -> Result<Option<&HVec>> {
        if 2 * p + m as i64 > self.max_n {
            return Err(Error::Inconclusive(format!("coefficient ({p},{m},{sigma}) beyond the window")));
        }
        Ok(self.coeffs.get(&(p, m, sigma)))
    }

    /// Smallest power of 𝐳² with a nonzero coefficient.
    pub fn min_pole(&self) -> Option<i64> {
        self.coeffs.keys().map(|k| k.0).min()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().map(|&(p, m, _)| 2 * p + m as i64).min()
    }

    /// First key where the two series differ inside both windows.
    pub fn first_difference(&self, o: &SeriesZ) -> Option<(i64, u32, usize)> {
        let max_n = self.max_n.min(o.max_n);
        let keys: std::collections::BTreeSet<_> = self.coeffs.keys().chain(o.coeffs.keys()).copied().collect();
        keys.into_iter().filter(|&(p, m, _)| 2 * p + m as i64 <= max_n).find(|k| self.coeffs.get(k) != o.coeffs.get(k))
    }

    /// Terms of total degree n in mixed monomial form.
    pub fn group(&self, n: i64, vdim: usize) -> Result<Mixed> {
        if n > self.max_n {
            return Err(Error::Inconclusive(format!("degree {n} beyond the window {}", self.max_n)));
        }
        let mut out = Mixed::new(self.dim, vdim);
        for (&(p, m, sigma), v) in &self.coeffs {
            if 2 * p + m as i64 != n {
                continue;
            }
            let h = &build_harmonic_basis(self.dim, m).polys[sigma - 1];
            for (mono, c) in &h.terms {
                out.add_term(p, mono.clone(), &v.v, c);
            }
        }
        Ok(out)
    }

    /// Builds a series from mixed groups; every group must have total degree equal to its key.
    pub fn from_groups(dim: usize, base2: i64, max_n: i64, groups: &BTreeMap<i64, Mixed>) -> Result<SeriesZ> {
        let mut s = SeriesZ::new(dim, base2, max_n);
        for (&n, g) in groups {
            let d2 = base2 + 2 * n;
            for ((p, m, sigma), v) in g.to_harmonic()? {
                s.add_coeff(p, m, sigma, &HVec { delta2: d2, v });
            }
        }
        Ok(s)
    }
}

/// Substitutes z = x·e₁: coefficient of x^n, for n within the window.
pub fn restrict_to_line(s: &SeriesZ) -> BTreeMap<i64, HVec> {
    let mut out: BTreeMap<i64, HVec> = BTreeMap::new();
    for (&(p, m, sigma), v) in &s.coeffs {
        let n = 2 * p + m as i64;
        if n > s.max_n {
            continue;
        }
        let e = build_harmonic_basis(s.dim, m).polys[sigma - 1].at_e1();
        if e.is_zero() {
            continue;
        }
        let t = v.scale(&e);
        let entry = out.entry(n).or_insert_with(|| HVec::zero(t.delta2, t.v.len()));
        *entry = entry.add(&t);
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// μ_{n;m,σ} read back from a series by re-decomposing its degree-n part.
pub fn residue_extract(s: &SeriesZ, n: i64, m: u32, sigma: usize, vdim: usize) -> Result<Vec<Scalar>> {
    if (n - m as i64).rem_euclid(2) == 1 {
        return Ok(vec![Scalar::zero(); vdim]);
    }
    let g = s.group(n, vdim)?;
    let h = g.to_harmonic()?;
    Ok(h.get(&((n - m as i64) / 2, m, sigma)).cloned().unwrap_or_else(|| vec![Scalar::zero(); vdim]))
}

/// Σ (𝐳²)^p z^mono v, homogeneous of one total degree, with vectors of a fixed length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mixed {
    pub dim: usize,
    pub vdim: usize,
    pub terms: BTreeMap<(i64, Mono), Vec<Scalar>>,
}

fn axpy_into(acc: &mut Vec<Scalar>, c: &Scalar, x: &[Scalar]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += &(c * b);
    }
}

impl Mixed {
    pub fn new(dim: usize, vdim: usize) -> Self {
        Mixed { dim, vdim, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, p: i64, mono: Mono, v: &[Scalar], c: &Scalar) {
        if c.is_zero() || v.iter().all(Scalar::is_zero) {
            return;
        }
        let key = (p, mono);
        let e = self.terms.entry(key.clone()).or_insert_with(|| vec![Scalar::zero(); v.len()]);
        axpy_into(e, c, v);
        if e.iter().all(Scalar::is_zero) {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &Mixed) -> Mixed {
        self.axpy(&Scalar::one(), o)
    }

    pub fn sub(&self, o: &Mixed) -> Mixed {
        self.axpy(&Scalar::from_int(-1), o)
    }

    pub fn axpy(&self, c: &Scalar, o: &Mixed) -> Mixed {
        let mut out = self.clone();
        out.vdim = self.vdim.max(o.vdim);
        for ((p, mono), v) in &o.terms {
            out.add_term(*p, mono.clone(), v, c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Mixed {
        Mixed::new(self.dim, self.vdim).axpy(c, self)
    }

    pub fn map_vectors(&self, vdim: usize, f: impl Fn(&[Scalar]) -> Vec<Scalar>) -> Mixed {
        let mut out = Mixed::new(self.dim, vdim);
        for ((p, mono), v) in &self.terms {
            out.add_term(*p, mono.clone(), &f(v), &Scalar::one());
        }
        out
    }

    pub fn times_var(&self, alpha: usize) -> Mixed {
        let mut out = Mixed::new(self.dim, self.vdim);
        for ((p, mono), v) in &self.terms {
            let mut e = mono.clone();
            e[alpha] += 1;
            out.add_term(*p, e, v, &Scalar::one());
        }
        out
    }

    pub fn times_zsq(&self, k: i64) -> Mixed {
        let mut out = Mixed::new(self.dim, self.vdim);
        for ((p, mono), v) in &self.terms {
            out.add_term(p + k, mono.clone(), v, &Scalar::one());
        }
        out
    }

    /// ∂_α, using ∂_α (𝐳²)^p = 2p z^α (𝐳²)^{p−1}.
    pub fn derivative(&self, alpha: usize) -> Mixed {
        let mut out = Mixed::new(self.dim, self.vdim);
        for ((p, mono), v) in &self.terms {
            if *p != 0 {
                let mut e = mono.clone();
                e[alpha] += 1;
                out.add_term(p - 1, e, v, &Scalar::from_int(2 * p));
            }
            if mono[alpha] > 0 {
                let mut e = mono.clone();
                e[alpha] -= 1;
                out.add_term(*p, e, v, &Scalar::from_int(mono[alpha] as i64));
            }
        }
        out
    }

    /// z·∂_z.
    pub fn euler(&self) -> Mixed {
        let mut out = Mixed::new(self.dim, self.vdim);
        for ((p, mono), v) in &self.terms {
            let deg = 2 * p + mono.iter().map(|&k| k as i64).sum::<i64>();
            out.add_term(*p, mono.clone(), v, &Scalar::from_int(deg));
        }
        out
    }

    fn min_p(&self) -> i64 {
        self.terms.keys().map(|k| k.0).min().unwrap_or(0)
    }

    /// Plain polynomial coefficients of (𝐳²)^shift times this, for shift ≥ −min p.
    fn flatten(&self, shift: i64) -> BTreeMap<Mono, Vec<Scalar>> {
        let zsq = PolyD::z_sq(self.dim);
        let mut pows: BTreeMap<i64, PolyD> = BTreeMap::new();
        let mut out: BTreeMap<Mono, Vec<Scalar>> = BTreeMap::new();
        for ((p, mono), v) in &self.terms {
            let k = p + shift;
            let pw = pows.entry(k).or_insert_with(|| zsq.pow(k as u32));
            for (e, c) in &pw.terms {
                let key: Mono = e.iter().zip(mono).map(|(a, b)| a + b).collect();
                let acc = out.entry(key).or_insert_with(|| vec![Scalar::zero(); v.len()]);
                axpy_into(acc, c, v);
            }
        }
        out.retain(|_, v| !v.iter().all(Scalar::is_zero));
        out
    }

    /// True if the sum vanishes as a function.
    pub fn is_zero_function(&self) -> bool {
        self.flatten(-self.min_p()).is_empty()
    }

    /// Unique decomposition into (𝐳²)^p h_{m,σ} coordinates: key (p, m, σ).
    pub fn to_harmonic(&self) -> Result<BTreeMap<(i64, u32, usize), Vec<Scalar>>> {
        let mut out = BTreeMap::new();
        if self.terms.is_empty() {
            return Ok(out);
        }
        let shift = -self.min_p();
        let flat = self.flatten(shift);
        if flat.is_empty() {
            return Ok(out);
        }
        let degs: std::collections::BTreeSet<u32> = flat.keys().map(|e| e.iter().sum()).collect();
        if degs.len() != 1 {
            return Err(Error::Invariant("mixed group is not homogeneous".into()));
        }
        let deg = *degs.iter().next().expect("nonempty");
        let vdim = flat.values().next().map_or(0, Vec::len);
        for comp in 0..vdim {
            let mut poly = PolyD::zero(self.dim);
            for (e, v) in &flat {
                poly.add_term(e.clone(), &v[comp]);
            }
            if poly.is_zero() {
                continue;
            }
            for (k, f) in harmonic_decompose_deg(&poly, deg)?.into_iter().enumerate() {
                if f.is_zero() {
                    continue;
                }
                let m = deg - 2 * k as u32;
                let c = build_harmonic_basis(self.dim, m).coords(&f)?;
                for (sigma, x) in c.into_iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let v = out.entry((k as i64 - shift, m, sigma + 1)).or_insert_with(|| vec![Scalar::zero(); vdim]);
                    v[comp] += &x;
                }
            }
        }
        Ok(out)
    }
}

/// ∂_α of a series; the window shrinks by one degree.
pub fn derivative(s: &SeriesZ, alpha: usize, vdim_of: impl Fn(i64) -> usize) -> Result<SeriesZ> {
    let mut groups = BTreeMap::new();
    for n in degrees(s) {
        if n > s.max_n {
            continue;
        }
        let g = s.group(n, vdim_of(s.base2 + 2 * n))?.derivative(alpha);
        groups.insert(n - 1, g);
    }
    SeriesZ::from_groups(s.dim, s.base2 + 2, s.max_n - 1, &groups)
}

fn degrees(s: &SeriesZ) -> std::collections::BTreeSet<i64> {
    s.coeffs.keys().map(|&(p, m, _)| 2 * p + m as i64).collect()
}

/// Formal Taylor expansion e^{u·∂_z}: coefficient series of u^mono for |mono| ≤ order.
pub fn taylor_shift(s: &SeriesZ, order: u32, vdim_of: impl Fn(i64) -> usize + Copy) -> Result<BTreeMap<Mono, SeriesZ>> {
    let mut out: BTreeMap<Mono, SeriesZ> = BTreeMap::new();
    out.insert(vec![0; s.dim], s.clone());
    let mut frontier = vec![vec![0u32; s.dim]];
    for _ in 0..order {
        let mut next = Vec::new();
        for mono in &frontier {
            // extend by the last variable used or later, so each multi-index is reached once
            let start = mono.iter().rposition(|&k| k > 0).unwrap_or(0);
            for alpha in start..s.dim {
                let base = &out[mono];
                let mut e = mono.clone();
                e[alpha] += 1;
                // ∂^e/e! from ∂^mono/mono! : multiply by 1/e_α
                let d = derivative(base, alpha, vdim_of)?;
                let c = Scalar::from_frac(1, e[alpha] as i64);
                let mut scaled = SeriesZ::new(d.dim, d.base2, d.max_n);
                for (k, v) in &d.coeffs {
                    scaled.add_coeff(k.0, k.1, k.2, &v.scale(&c));
                }
                out.insert(e.clone(), scaled);
                next.push(e);
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// 1 / mono!.
pub fn inv_multifactorial(mono: &[u32]) -> Scalar {
    let mut d = num_bigint::BigInt::from(1);
    for &k in mono {
        d *= factorial(k);
    }
    Scalar::from_rational(Rational::new(1.into(), d))
}

/// Two-variable mixed form Σ (𝐳²)^p z^e (𝐰²)^q w^f v for fixed total degrees in z and in w.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedZW {
    pub dim: usize,
    pub terms: BTreeMap<(i64, Mono, i64, Mono), Vec<Scalar>>,
}

impl MixedZW {
    pub fn new(dim: usize) -> Self {
        MixedZW { dim, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: (i64, Mono, i64, Mono), v: &[Scalar], c: &Scalar) {
        if c.is_zero() || v.iter().all(Scalar::is_zero) {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(|| vec![Scalar::zero(); v.len()]);
        axpy_into(e, c, v);
        if e.iter().all(Scalar::is_zero) {
            self.terms.remove(&key);
        }
    }

    /// Product of a z-group and a w-group with vectors combined by `f`.
    pub fn outer(z: &Mixed, w: &Mixed, f: impl Fn(&[Scalar], &[Scalar]) -> Vec<Scalar>) -> MixedZW {
        let mut out = MixedZW::new(z.dim);
        for ((p, e), u) in &z.terms {
            for ((q, g), v) in &w.terms {
                out.add_term((*p, e.clone(), *q, g.clone()), &f(u, v), &Scalar::one());
            }
        }
        out
    }

    pub fn axpy(&mut self, c: &Scalar, o: &MixedZW) {
        for (k, v) in &o.terms {
            self.add_term(k.clone(), v, c);
        }
    }

    /// Multiplication by (z − w)² = 𝐳² − 2 z·w + 𝐰².
    pub fn times_sep_sq(&self) -> MixedZW {
        let mut out = MixedZW::new(self.dim);
        for ((p, e, q, f), v) in &self.terms {
            out.add_term((p + 1, e.clone(), *q, f.clone()), v, &Scalar::one());
            out.add_term((*p, e.clone(), q + 1, f.clone()), v, &Scalar::one());
            for a in 0..self.dim {
                let (mut e2, mut f2) = (e.clone(), f.clone());
                e2[a] += 1;
                f2[a] += 1;
                out.add_term((*p, e2, *q, f2), v, &Scalar::from_int(-2));
            }
        }
        out
    }

    /// Plain-monomial coefficients after clearing denominators; empty iff zero as a function.
    pub fn nonzero_witness(&self) -> Option<Vec<Scalar>> {
        let pmin = self.terms.keys().map(|k| k.0).min()?;
        let qmin = self.terms.keys().map(|k| k.2).min()?;
        let zsq = PolyD::z_sq(self.dim);
        let mut out: BTreeMap<(Mono, Mono), Vec<Scalar>> = BTreeMap::new();
        for ((p, e, q, f), v) in &self.terms {
            let pz = zsq.pow((p - pmin) as u32);
            let pw = zsq.pow((q - qmin) as u32);
            for (a, ca) in &pz.terms {
                let ez: Mono = a.iter().zip(e).map(|(x, y)| x + y).collect();
                for (b, cb) in &pw.terms {
                    let fw: Mono = b.iter().zip(f).map(|(x, y)| x + y).collect();
                    let acc = out.entry((ez.clone(), fw)).or_insert_with(|| vec![Scalar::zero(); v.len()]);
                    axpy_into(acc, &(ca * cb), v);
                }
            }
        }
        out.into_values().find(|v| !v.iter().all(Scalar::is_zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_square_norm_power() {
        // ∂₁ (𝐳²)^{-1} = −2 z¹ (𝐳²)^{-2}
        let mut g = Mixed::new(2, 1);
        g.add_term(-1, vec![0, 0], &[Scalar::one()], &Scalar::one());
        let d = g.derivative(0);
        let mut want = Mixed::new(2, 1);
        want.add_term(-2, vec![1, 0], &[Scalar::one()], &Scalar::from_int(-2));
        assert_eq!(d, want);
    }

    #[test]
    fn mixed_zero_test_sees_relations() {
        // (𝐳²)^{-1}(z¹)² + (𝐳²)^{-1}(z²)² − 1 = 0
        let mut g = Mixed::new(2, 1);
        g.add_term(-1, vec![2, 0], &[Scalar::one()], &Scalar::one());
        g.add_term(-1, vec![0, 2], &[Scalar::one()], &Scalar::one());
        g.add_term(0, vec![0, 0], &[Scalar::one()], &Scalar::from_int(-1));
        assert!(g.is_zero_function());
        assert!(g.to_harmonic().unwrap().is_empty());
    }

    #[test]
    fn harmonic_round_trip_of_negative_power() {
        // (z⁺)^{-2} = (𝐳²)^{-2} (z⁻)²
        let (_, minus) = crate::polyharm::d2_pm_coords(2);
        let mut g = Mixed::new(2, 1);
        for (mono, c) in &PolyD::z_pm(2, -1).pow(2).terms {
            g.add_term(-2, mono.clone(), &[Scalar::one()], c);
        }
        let h = g.to_harmonic().unwrap();
        for (s, c) in minus.iter().enumerate() {
            if !c.is_zero() {
                assert_eq!(h[&(-2, 2, s + 1)], vec![c.clone()]);
            }
        }
    }
}
