//! Built-in models: the rank-one Heisenberg algebra and its two-dimensional tensor square.

use std::collections::BTreeMap;

use crate::chiral::{n_range, ModeTable};
use crate::conflie::{CLieRep, Gen};
use crate::error::{Error, Result};
use crate::exactnum::{binom, factorial, Rational, Scalar};
use crate::gradedlinalg::{BlockMap, GradedSpace, HVec, Matrix, WeightLabel};
use crate::polyharm::{d2_pm_coords, Mono, PolyD};
use crate::reconstruct::series::SeriesZ;

/// Exponent vectors (k₁, k₂, …) with Σ n·kₙ = w, in descending lexicographic order.
fn partitions(w: u32, nvars: usize) -> Vec<Mono> {
    fn go(part: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if part == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let n = part as u32 + 1;
        for k in (0..=left / n).rev() {
            cur[part] = k;
            go(part + 1, left - k * n, cur, out);
        }
        cur[part] = 0;
    }
    let mut out = Vec::new();
    go(0, w, &mut vec![0; nvars], &mut out);
    out
}

/// Fock space of one free boson: states are polynomials in xₙ = α₋ₙ.
#[derive(Clone, Debug)]
pub struct HeisenbergModel {
    pub cutoff: i64,
    pub nvars: usize,
    pub states: BTreeMap<i64, Vec<Mono>>,
    pub space: GradedSpace,
    pub table: ModeTable,
    pub l_minus1: BlockMap,
    pub l0: BlockMap,
    pub l1: BlockMap,
}

impl HeisenbergModel {
    pub fn index_of(&self, delta2: i64, mono: &[u32]) -> Option<usize> {
        self.states.get(&delta2)?.iter().position(|m| m.as_slice() == mono)
    }

    pub fn to_poly(&self, v: &HVec) -> PolyD {
        let mut p = PolyD::zero(self.nvars);
        if let Some(st) = self.states.get(&v.delta2) {
            for (m, c) in st.iter().zip(&v.v) {
                p.add_term(m.clone(), c);
            }
        }
        p
    }

    /// Coordinates of a homogeneous Fock polynomial of weight `delta2 / 2`.
    pub fn from_poly(&self, delta2: i64, p: &PolyD) -> HVec {
        let st = self.states.get(&delta2).map(Vec::as_slice).unwrap_or(&[]);
        HVec { delta2, v: st.iter().map(|m| p.coeff(m)).collect() }
    }

    /// The weight-one generator α₋₁𝟙.
    pub fn alpha(&self) -> HVec {
        let mut m = vec![0; self.nvars];
        m[0] = 1;
        let i = self.index_of(2, &m).expect("cutoff ≥ 1");
        HVec::basis(2, self.space.dim(2), i)
    }

    /// sl(2) as a one-dimensional conformal action: T₁ = L₋₁, H = L₀, C₁ = −L₁.
    pub fn rep(&self) -> CLieRep {
        let mut action = BTreeMap::new();
        action.insert(Gen::T(1), self.l_minus1.clone());
        action.insert(Gen::H, self.l0.clone());
        action.insert(Gen::C(1), self.l1.scale(&Scalar::from_int(-1)));
        CLieRep::new(1, self.space.clone(), action).expect("consistent by construction")
    }
}

fn alpha_neg(m: usize, p: &PolyD) -> PolyD {
    p.times_var(m - 1)
}

fn alpha_pos(m: usize, p: &PolyD) -> PolyD {
    if m > p.dim {
        return PolyD::zero(p.dim);
    }
    p.derivative(m - 1).scale(&Scalar::from_int(m as i64))
}

/// Mode tuples (m₁,…,m_r), mᵢ ≠ 0, lo ≤ mᵢ ≤ hi, with Σ mᵢ = total.
fn mode_tuples(r: usize, total: i64, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    fn go(r: usize, total: i64, lo: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == r {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let left = (r - cur.len() - 1) as i64;
        for m in lo..=hi {
            if m == 0 {
                continue;
            }
            let rest = total - m;
            if rest < left * lo || rest > left * hi {
                continue;
            }
            cur.push(m);
            go(r, rest, lo, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(r, total, lo, hi, &mut Vec::new(), &mut out);
    out
}

/// Y(a,x)b coefficient at x^n via the normal-ordered product of derivatives of α(x).
fn heisenberg_mu(a: &Mono, b: &PolyD, db: i64, n: i64) -> PolyD {
    let nvars = b.dim;
    let mut orders = Vec::new();
    for (i, &k) in a.iter().enumerate() {
        orders.extend(std::iter::repeat(i as u32).take(k as usize));
    }
    let da: i64 = a.iter().enumerate().map(|(i, &k)| (i as i64 + 1) * k as i64).sum();
    let target = da + db + n;
    let mut out = PolyD::zero(nvars);
    if target < 0 {
        return out;
    }
    if orders.is_empty() {
        return if n == 0 { b.clone() } else { out };
    }
    // Σ mᵢ = −n − Δa; creators bounded by the target weight, annihilators by Δb
    for modes in mode_tuples(orders.len(), -n - da, -target, db) {
        let mut c = Rational::from_integer(1.into());
        for (&m, &k) in modes.iter().zip(&orders) {
            c *= binom(-m - 1, k);
        }
        if c == Rational::from_integer(0.into()) {
            continue;
        }
        let mut p = b.clone();
        for &m in modes.iter().filter(|&&m| m > 0) {
            p = alpha_pos(m as usize, &p);
        }
        for &m in modes.iter().filter(|&&m| m < 0) {
            p = alpha_neg((-m) as usize, &p);
        }
        out = out.add(&p.scale(&Scalar::from_rational(c)));
    }
    out
}

pub fn build_heisenberg(cutoff: i64) -> HeisenbergModel {
    assert!(cutoff >= 0, "cutoff must be nonnegative");
    let nvars = cutoff.max(1) as usize;
    let mut states = BTreeMap::new();
    let mut components = BTreeMap::new();
    let mut gram = BTreeMap::new();
    for w in 0..=cutoff {
        let st = partitions(w as u32, nvars);
        let labels = (0..st.len()).map(|i| WeightLabel::new(2 * w, vec![], 0, i)).collect();
        // ⟨x^k, x^k⟩ = Π n^{kₙ} kₙ!
        let g: Vec<Scalar> = st
            .iter()
            .map(|m| {
                let mut v = num_bigint::BigInt::from(1);
                for (i, &k) in m.iter().enumerate() {
                    v *= num_bigint::BigInt::from(i + 1).pow(k) * factorial(k);
                }
                Scalar::from_rational(Rational::from_integer(v))
            })
            .collect();
        components.insert(2 * w, labels);
        gram.insert(2 * w, Matrix::diagonal(&g));
        states.insert(2 * w, st);
    }
    let space = GradedSpace::new(components, 2 * cutoff, gram).expect("Fock space is well formed");

    let coords = |delta2: i64, p: &PolyD| -> Vec<Scalar> {
        states.get(&delta2).map(|st: &Vec<Mono>| st.iter().map(|m| p.coeff(m)).collect()).unwrap_or_default()
    };
    let poly_of = |delta2: i64, i: usize| PolyD::monomial(nvars, states[&delta2][i].clone(), Scalar::one());
    let op_map = |degree2: i64, f: &dyn Fn(&PolyD) -> PolyD| {
        BlockMap::from_fn(&space, degree2, 0, |s| {
            let cols: Vec<Vec<Scalar>> = (0..space.dim(s)).map(|i| coords(s + degree2, &f(&poly_of(s, i)))).collect();
            Matrix::from_cols(space.dim(s + degree2), &cols)
        })
    };
    // L₋₁ = Σ n x_{n+1}∂ₙ, L₀ = Σ n xₙ∂ₙ, L₁ = Σ (n+1) xₙ∂_{n+1}
    let l_minus1 = op_map(2, &|p: &PolyD| {
        let mut acc = PolyD::zero(nvars);
        for n in 1..nvars {
            acc = acc.add(&p.derivative(n - 1).times_var(n).scale(&Scalar::from_int(n as i64)));
        }
        acc
    });
    let l0 = op_map(0, &|p: &PolyD| {
        let mut acc = PolyD::zero(nvars);
        for n in 1..=nvars {
            acc = acc.add(&p.derivative(n - 1).times_var(n - 1).scale(&Scalar::from_int(n as i64)));
        }
        acc
    });
    let l1 = op_map(-2, &|p: &PolyD| {
        let mut acc = PolyD::zero(nvars);
        for n in 1..nvars {
            acc = acc.add(&p.derivative(n).times_var(n - 1).scale(&Scalar::from_int(n as i64 + 1)));
        }
        acc
    });

    let mut blocks = BTreeMap::new();
    for (&da, sa) in &states {
        for (&db, sb) in &states {
            for n in n_range(da, db, 2 * cutoff) {
                let tg = da + db + 2 * n;
                let mut cols = Vec::with_capacity(sa.len() * sb.len());
                for a in sa {
                    for b in sb {
                        let bp = PolyD::monomial(nvars, b.clone(), Scalar::one());
                        cols.push(coords(tg, &heisenberg_mu(a, &bp, db / 2, n)));
                    }
                }
                let m = Matrix::from_cols(space.dim(tg), &cols);
                if !m.is_zero() {
                    blocks.insert((da, db, n), m);
                }
            }
        }
    }
    let table = ModeTable::new(space.clone(), 0, l_minus1.clone(), blocks).expect("mode table is well formed");
    HeisenbergModel { cutoff, nvars, states, space, table, l_minus1, l0, l1 }
}

/// Basis state of the tensor square: (2Δ⁺, index⁺, 2Δ⁻, index⁻).
pub type PairState = (i64, usize, i64, usize);

/// V⁺ ⊗ V⁻ with the two-dimensional conformal action assembled from two sl(2) copies.
#[derive(Clone, Debug)]
pub struct TensorModel2D {
    pub cutoff: i64,
    pub plus: HeisenbergModel,
    pub minus: HeisenbergModel,
    pub pairs: BTreeMap<i64, Vec<PairState>>,
    pub space: GradedSpace,
    pub table: ModeTable,
    pub rep: CLieRep,
}

impl TensorModel2D {
    /// Position of a pure tensor of basis states in its component.
    pub fn locate(&self, st: PairState) -> Option<(i64, usize)> {
        let d = st.0 + st.2;
        self.pairs.get(&d)?.iter().position(|p| *p == st).map(|i| (d, i))
    }

    pub fn pure(&self, st: PairState) -> HVec {
        let (d, i) = self.locate(st).expect("state within cutoff");
        HVec::basis(d, self.space.dim(d), i)
    }

    /// Embeds u⁺ ⊗ u⁻ into the tensor space; None if beyond cutoff.
    pub fn tensor(&self, up: &HVec, um: &HVec) -> Option<HVec> {
        let d = up.delta2 + um.delta2;
        if d > self.space.cutoff2 || up.delta2 < 0 || um.delta2 < 0 {
            return None;
        }
        let mut out = HVec::zero(d, self.space.dim(d));
        for (i, a) in up.v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in um.v.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (_, k) = self.locate((up.delta2, i, um.delta2, j))?;
                out.v[k] += &(a * b);
            }
        }
        Some(out)
    }

    pub fn alpha_plus(&self) -> HVec {
        self.tensor(&self.plus.alpha(), &self.minus.table.vacuum_vec()).expect("cutoff ≥ 1")
    }

    pub fn alpha_minus(&self) -> HVec {
        self.tensor(&self.plus.table.vacuum_vec(), &self.minus.alpha()).expect("cutoff ≥ 1")
    }

    pub fn basis_states(&self) -> Vec<PairState> {
        self.pairs.values().flatten().copied().collect()
    }
}

fn lift(
    space: &GradedSpace,
    pairs: &BTreeMap<i64, Vec<PairState>>,
    op: &BlockMap,
    on_plus: bool,
    factor_space: &GradedSpace,
) -> BlockMap {
    let locate = |st: PairState| -> Option<usize> { pairs.get(&(st.0 + st.2))?.iter().position(|p| *p == st) };
    BlockMap::from_fn(space, op.degree2, 0, |s| {
        let t = s + op.degree2;
        let mut m = Matrix::zeros(space.dim(t), space.dim(s));
        for (col, &(dp, ip, dm, im)) in pairs[&s].iter().enumerate() {
            let (src, idx) = if on_plus { (dp, ip) } else { (dm, im) };
            let v = HVec::basis(src, factor_space.dim(src), idx);
            let Ok(w) = op.apply(&v) else { continue };
            for (k, c) in w.v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let st = if on_plus { (w.delta2, k, dm, im) } else { (dp, ip, w.delta2, k) };
                let row = locate(st).expect("target within cutoff");
                m.set(row, col, c.clone());
            }
        }
        m
    })
}

pub fn build_tensor_2d(cutoff: i64) -> TensorModel2D {
    let plus = build_heisenberg(cutoff);
    let minus = plus.clone();
    let mut pairs: BTreeMap<i64, Vec<PairState>> = BTreeMap::new();
    let mut components = BTreeMap::new();
    let mut gram = BTreeMap::new();
    for d in (0..=2 * cutoff).step_by(2) {
        // order by cartan label j = Δ⁻ − Δ⁺, then by the factor indices
        let mut sts: Vec<(i64, PairState)> = Vec::new();
        for dp in (0..=d).step_by(2) {
            let dm = d - dp;
            for ip in 0..plus.space.dim(dp) {
                for im in 0..minus.space.dim(dm) {
                    sts.push(((dm - dp) / 2, (dp, ip, dm, im)));
                }
            }
        }
        sts.sort();
        let mut labels = Vec::new();
        let mut last_j = None;
        let mut idx = 0;
        for (j, _) in &sts {
            if last_j != Some(*j) {
                idx = 0;
                last_j = Some(*j);
            }
            labels.push(WeightLabel::new(d, vec![Scalar::from_int(*j)], 0, idx));
            idx += 1;
        }
        let g: Vec<Scalar> = sts
            .iter()
            .map(|(_, (dp, ip, dm, im))| plus.space.gram_of(*dp).get(*ip, *ip) * minus.space.gram_of(*dm).get(*im, *im))
            .collect();
        components.insert(d, labels);
        gram.insert(d, Matrix::diagonal(&g));
        pairs.insert(d, sts.into_iter().map(|(_, s)| s).collect());
    }
    let space = GradedSpace::new(components, 2 * cutoff, gram).expect("tensor space is well formed");

    let lp = |op: &BlockMap| lift(&space, &pairs, op, true, &plus.space);
    let lm = |op: &BlockMap| lift(&space, &pairs, op, false, &minus.space);
    let i = Scalar::i();
    let mi = Scalar::complex(0, -1);
    let neg = Scalar::from_int(-1);
    let (lm1p, lm1m) = (lp(&plus.l_minus1), lm(&minus.l_minus1));
    let (l0p, l0m) = (lp(&plus.l0), lm(&minus.l0));
    // the lowering generator of each sl(2) copy is −L₁
    let (l1p, l1m) = (lp(&plus.l1).scale(&neg), lm(&minus.l1).scale(&neg));
    let sum = |a: &BlockMap, b: &BlockMap| a.add(b).expect("same space");
    let diff = |a: &BlockMap, b: &BlockMap| a.sub(b).expect("same space");
    let mut action = BTreeMap::new();
    action.insert(Gen::T(1), sum(&lm1p, &lm1m));
    action.insert(Gen::T(2), diff(&lm1p, &lm1m).scale(&i));
    action.insert(Gen::H, sum(&l0p, &l0m));
    action.insert(Gen::O(1, 2), diff(&l0p, &l0m).scale(&i));
    action.insert(Gen::C(1), sum(&l1p, &l1m));
    action.insert(Gen::C(2), diff(&l1p, &l1m).scale(&mi));

    // μ_n(a⁺⊗a⁻, b⁺⊗b⁻) = Σ_{n⁺+n⁻=n} μ⁺_{n⁺}(a⁺⊗b⁺) ⊗ μ⁻_{n⁻}(a⁻⊗b⁻)
    let locate = |st: PairState| -> usize { pairs[&(st.0 + st.2)].iter().position(|p| *p == st).expect("in cutoff") };
    let mut blocks = BTreeMap::new();
    for (&da, sa) in &pairs {
        for (&db, sb) in &pairs {
            for n in n_range(da, db, 2 * cutoff) {
                let tg = da + db + 2 * n;
                let mut m = Matrix::zeros(space.dim(tg), sa.len() * sb.len());
                for (ia, &(ap, iap, am, iam)) in sa.iter().enumerate() {
                    for (ib, &(bp, ibp, bm, ibm)) in sb.iter().enumerate() {
                        let col = ia * sb.len() + ib;
                        let vap = HVec::basis(ap, plus.space.dim(ap), iap);
                        let vbp = HVec::basis(bp, plus.space.dim(bp), ibp);
                        let vam = HVec::basis(am, minus.space.dim(am), iam);
                        let vbm = HVec::basis(bm, minus.space.dim(bm), ibm);
                        for np in n_range(ap, bp, 2 * cutoff) {
                            let nm = n - np;
                            let tp = ap + bp + 2 * np;
                            let tm = am + bm + 2 * nm;
                            if tm < 0 || tp + tm != tg {
                                continue;
                            }
                            let up = plus.table.mu(&vap, np, &vbp).expect("within cutoff");
                            let um = minus.table.mu(&vam, nm, &vbm).expect("within cutoff");
                            for (kp, cp) in up.v.iter().enumerate() {
                                if cp.is_zero() {
                                    continue;
                                }
                                for (km, cm) in um.v.iter().enumerate() {
                                    if cm.is_zero() {
                                        continue;
                                    }
                                    let row = locate((tp, kp, tm, km));
                                    *m.at_mut(row, col) += &(cp * cm);
                                }
                            }
                        }
                    }
                }
                if !m.is_zero() {
                    blocks.insert((da, db, n), m);
                }
            }
        }
    }
    let t1 = action[&Gen::T(1)].clone();
    let table = ModeTable::new(space.clone(), 0, t1, blocks).expect("mode table is well formed");
    let rep = CLieRep::new(2, space.clone(), action).expect("consistent by construction");
    TensorModel2D { cutoff, plus, minus, pairs, space, table, rep }
}

/// Y⁺(a⁺,z⁺)b⁺ ⊗ Y⁻(a⁻,z⁻)b⁻ rewritten in the (𝐳²)^p h_{m,σ} basis via z⁺z⁻ = 𝐳².
pub fn chiral_factorization_oracle(model: &TensorModel2D, a: PairState, b: PairState) -> Result<SeriesZ> {
    if model.locate(a).is_none() || model.locate(b).is_none() {
        return Err(Error::Contract("oracle inputs must be pure tensors of basis states in cutoff".into()));
    }
    let k2 = model.space.cutoff2;
    let (ap, iap, am, iam) = a;
    let (bp, ibp, bm, ibm) = b;
    let base2 = ap + am + bp + bm;
    let mut s = SeriesZ::new(2, base2, (k2 - base2).div_euclid(2));
    let vap = HVec::basis(ap, model.plus.space.dim(ap), iap);
    let vbp = HVec::basis(bp, model.plus.space.dim(bp), ibp);
    let vam = HVec::basis(am, model.minus.space.dim(am), iam);
    let vbm = HVec::basis(bm, model.minus.space.dim(bm), ibm);
    for kp in n_range(ap, bp, k2) {
        for km in n_range(am, bm, k2) {
            if base2 + 2 * (kp + km) > k2 {
                continue;
            }
            let up = model.plus.table.mu(&vap, kp, &vbp)?;
            let um = model.minus.table.mu(&vam, km, &vbm)?;
            let Some(v) = model.tensor(&up, &um) else { continue };
            if v.is_zero() {
                continue;
            }
            // (z⁺)^k (z⁻)^l = (𝐳²)^{min} (z±)^{|k−l|}
            let p = kp.min(km);
            let m = (kp - km).unsigned_abs() as u32;
            let (cplus, cminus) = d2_pm_coords(m);
            let c = if kp >= km { cplus } else { cminus };
            for (sigma, coef) in c.iter().enumerate() {
                if !coef.is_zero() {
                    s.add_coeff(p, m, sigma + 1, &v.scale(coef));
                }
            }
        }
    }
    Ok(s)
}

/// Tensor model with a negative-norm component (gram = −identity at Δ = 1).
pub fn fixture_negative_norm(cutoff: i64) -> (CLieRep, ModeTable) {
    let m = build_tensor_2d(cutoff);
    let mut space = m.space.clone();
    let n = space.dim(2);
    let g = space.gram.get_mut(&2).expect("Δ = 1 present");
    *g = Matrix::identity(n).scale(&Scalar::from_int(-1));
    let rep = CLieRep { dim: 2, space: space.clone(), action: m.rep.action.clone() };
    let table = ModeTable { space, ..m.table };
    (rep, table)
}

/// Tensor model whose H has eigenvalue −1 on the vacuum.
pub fn fixture_negative_energy(cutoff: i64) -> (CLieRep, ModeTable) {
    let m = build_tensor_2d(cutoff);
    let mut rep = m.rep.clone();
    let h = rep.action.get_mut(&Gen::H).expect("H present");
    h.blocks.get_mut(&0).expect("vacuum block").set(0, 0, Scalar::from_int(-1));
    (rep, m.table)
}

/// Tensor model with Ω₁₂ replaced by 2Ω₁₂.
pub fn fixture_scaled_omega(cutoff: i64) -> (CLieRep, ModeTable) {
    let m = build_tensor_2d(cutoff);
    let mut rep = m.rep.clone();
    let o = rep.action.get_mut(&Gen::O(1, 2)).expect("Ω₁₂ present");
    *o = o.scale(&Scalar::from_int(2));
    (rep, m.table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let dims: Vec<usize> = (0..6).map(|w| partitions(w, 5).len()).collect();
        assert_eq!(dims, vec![1, 1, 2, 3, 5, 7]);
    }

    #[test]
    fn mode_tuples_respect_sum() {
        for t in mode_tuples(2, 0, -2, 2) {
            assert_eq!(t.iter().sum::<i64>(), 0);
            assert!(!t.contains(&0));
        }
        assert_eq!(mode_tuples(2, 0, -2, 2).len(), 4);
    }
}
