//! D-dimensional products μ^D_{n;m,σ} from the chiral products and the conformal action.

pub mod checks;
pub mod isotypic;
pub mod series;
pub mod synthetic;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::json;

use crate::chiral::{n_range, ModeTable};
use crate::conflie::{scan_spectrum, CLieElement, CLieRep, Gen};
use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::gradedlinalg::{inverse, nullspace, solve_exact, span_basis, vec_kron, GradedSpace, HVec, Matrix, Solution};
use crate::polyharm::{build_harmonic_basis, d2_pm_coords, monomials, Mono, PolyD};
use crate::report::Check;
use series::SeriesZ;

/// Key (2Δ', 2Δ'', n, m, σ) with 1-based σ.
pub type MuKey = (i64, i64, i64, u32, usize);

/// Blocks μ^D_{n;m,σ}: V_{Δ'} ⊗ V_{Δ''} → V_{Δ'+Δ''+n}; absent in-window blocks are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuDTable {
    pub dim: usize,
    pub space: GradedSpace,
    pub blocks: BTreeMap<MuKey, Matrix>,
    /// Which path produced the table.
    pub solver: String,
    /// Sources above this doubled degree were not reconstructed.
    pub source_cutoff2: i64,
    /// Solver instances solved, all with a unique solution.
    pub instances: usize,
    /// Slots with n − m odd that the solver carried and committed as zero.
    pub half_integer_slots: usize,
}

impl MuDTable {
    pub fn cutoff2(&self) -> i64 {
        self.space.cutoff2
    }

    pub fn blocks_at(&self, d1: i64, d2: i64, n: i64) -> impl Iterator<Item = (u32, usize, &Matrix)> {
        self.blocks.range((d1, d2, n, 0, 0)..=(d1, d2, n, u32::MAX, usize::MAX)).map(|(&(_, _, _, m, s), b)| (m, s, b))
    }

    /// μ^D_{n;m,σ}(a⊗b); inconclusive outside the reconstructed window.
    pub fn apply(&self, a: &HVec, n: i64, m: u32, sigma: usize, b: &HVec) -> Result<HVec> {
        let tg = a.delta2 + b.delta2 + 2 * n;
        if tg < 0 {
            return Ok(HVec::zero(tg, 0));
        }
        let dim = self.space.dim(tg);
        if a.is_zero() || b.is_zero() {
            return Ok(HVec::zero(tg, dim));
        }
        if tg > self.cutoff2() || a.delta2 > self.source_cutoff2 || b.delta2 > self.source_cutoff2 {
            return Err(Error::Inconclusive(format!("μ^D_{n} on ({}, {}) outside the window", a.delta2, b.delta2)));
        }
        Ok(match self.blocks.get(&(a.delta2, b.delta2, n, m, sigma)) {
            Some(blk) => HVec { delta2: tg, v: blk.apply(&vec_kron(&a.v, &b.v)) },
            None => HVec::zero(tg, dim),
        })
    }

    /// Largest n with conclusive coefficients for sources (d1, d2).
    pub fn max_n(&self, d1: i64, d2: i64) -> i64 {
        if d1 > self.source_cutoff2 || d2 > self.source_cutoff2 {
            return i64::MIN / 4;
        }
        (self.cutoff2() - d1 - d2).div_euclid(2)
    }

    /// Zero blocks whenever n − m is odd.
    pub fn check_parity(&self) -> Check {
        for (&(d1, d2, n, m, s), b) in &self.blocks {
            if (n - m as i64).rem_euclid(2) == 1 && !b.is_zero() {
                return Check::fail(
                    "parity",
                    "nonzero block with n − m odd",
                    json!({"block": format!("({d1},{d2},{n},{m},{s})")}),
                );
            }
        }
        Check::pass(
            "parity",
            format!(
                "{} blocks, all with n − m even; {} odd slots eliminated at commit",
                self.blocks.len(),
                self.half_integer_slots
            ),
        )
    }
}

/// Y_D(a,z)b = Σ μ^D_{2p+m;m,σ}(a⊗b) (𝐳²)^p h_{m,σ}(z).
pub fn assemble_series(mud: &MuDTable, a: &HVec, b: &HVec) -> Result<SeriesZ> {
    let k2 = mud.cutoff2();
    let mut s = SeriesZ::new(mud.dim, a.delta2 + b.delta2, mud.max_n(a.delta2, b.delta2));
    if a.delta2 > mud.source_cutoff2 || b.delta2 > mud.source_cutoff2 {
        return Ok(s);
    }
    let ab = vec_kron(&a.v, &b.v);
    for n in n_range(a.delta2, b.delta2, k2) {
        let tg = a.delta2 + b.delta2 + 2 * n;
        for (m, sigma, blk) in mud.blocks_at(a.delta2, b.delta2, n) {
            let v = blk.apply(&ab);
            if (n - m as i64).rem_euclid(2) == 1 {
                if v.iter().any(|x| !x.is_zero()) {
                    return Err(Error::Invariant(format!(
                        "block ({},{},{n},{m},{sigma}) violates parity",
                        a.delta2, b.delta2
                    )));
                }
                continue;
            }
            s.add_coeff((n - m as i64) / 2, m, sigma, &HVec { delta2: tg, v });
        }
    }
    Ok(s)
}

fn i_omega(rep: &CLieRep, a: usize, b: usize) -> Result<crate::gradedlinalg::BlockMap> {
    rep.action_of(&CLieElement::scaled(Gen::O(a, b), Scalar::i()))
        .map_err(|_| Error::Format(format!("weight data missing: Ω{a}{b} not supplied")))
}

fn max_abs_doubled(spec: &[(Scalar, Vec<Vec<Scalar>>)]) -> i64 {
    spec.iter().map(|(l, _)| (l.scale_int(2).as_i64().unwrap_or(0)).abs()).max().unwrap_or(0)
}

/// 2J for the so(D)-submodule generated by v: twice the largest |iΩ₁₂| eigenvalue.
pub fn cyclic_j2(rep: &CLieRep, v: &HVec) -> Result<i64> {
    if rep.dim < 2 || v.is_zero() {
        return Ok(0);
    }
    let rots: Vec<_> = rep.action.iter().filter(|(g, _)| matches!(g, Gen::O(..))).map(|(_, m)| m).collect();
    let n = v.v.len();
    let mut basis = span_basis(std::slice::from_ref(&v.v), n);
    let mut queue = basis.clone();
    while let Some(x) = queue.pop() {
        for r in &rots {
            let y = r.apply(&HVec { delta2: v.delta2, v: x.clone() })?.v;
            let mut cand = basis.clone();
            cand.push(y.clone());
            if span_basis(&cand, n).len() > basis.len() {
                basis.push(y.clone());
                queue.push(y);
            }
        }
    }
    let iom = i_omega(rep, 1, 2)?;
    let bm = Matrix::from_cols(n, &basis);
    let mut cols = Vec::new();
    for x in &basis {
        let y = iom.apply(&HVec { delta2: v.delta2, v: x.clone() })?.v;
        match solve_exact(&bm, &y) {
            Solution::Unique(c) => cols.push(c),
            _ => return Err(Error::Invariant("cyclic submodule is not iΩ₁₂-stable".into())),
        }
    }
    let x = Matrix::from_cols(basis.len(), &cols);
    let (spec, complete) = scan_spectrum(&x, true);
    if !complete {
        return Err(Error::Hypothesis("iΩ₁₂ is not diagonalizable with spectrum in ½ℤ".into()));
    }
    Ok(max_abs_doubled(&spec))
}

/// 2J for a whole component.
pub fn component_j2(rep: &CLieRep, d2: i64) -> Result<i64> {
    if rep.dim < 2 || rep.space.dim(d2) == 0 {
        return Ok(0);
    }
    let iom = i_omega(rep, 1, 2)?;
    let blk = iom.block(d2).ok_or_else(|| Error::Format(format!("iΩ₁₂ has no block at 2Δ={d2}")))?;
    let (spec, complete) = scan_spectrum(blk, true);
    if !complete {
        return Err(Error::Hypothesis(format!("iΩ₁₂ on 2Δ={d2} is not diagonalizable with spectrum in ½ℤ")));
    }
    Ok(max_abs_doubled(&spec))
}

/// ⌊½(Δ'+J'+Δ''+J'')⌋ with J the top |iΩ₁₂| weight of the submodules generated by a and b.
pub fn pole_bound(rep: &CLieRep, a: &HVec, b: &HVec) -> Result<u32> {
    let ja = cyclic_j2(rep, a)?;
    let jb = cyclic_j2(rep, b)?;
    Ok(((a.delta2 + ja + b.delta2 + jb).max(0) / 4) as u32)
}

/// Simultaneous eigenbasis of the Cartan operators on one component.
#[derive(Clone, Debug)]
struct Frame {
    p: Matrix,
    p_inv: Matrix,
    weights: Option<Vec<Vec<Scalar>>>,
}

impl Frame {
    fn identity(n: usize) -> Self {
        Frame { p: Matrix::identity(n), p_inv: Matrix::identity(n), weights: None }
    }

    fn to_frame(&self, op: &Matrix) -> Matrix {
        self.p_inv.mul(op).mul(&self.p)
    }
}

/// Diagonalizes commuting operators by successive restriction; None if one is not diagonalizable.
fn weight_frame(ops: &[&Matrix]) -> Option<Frame> {
    let n = ops.first().map_or(0, |m| m.rows);
    if ops.iter().all(|m| m.is_diagonal()) {
        let weights = (0..n).map(|i| ops.iter().map(|m| m.get(i, i).clone()).collect()).collect();
        return Some(Frame { weights: Some(weights), ..Frame::identity(n) });
    }
    // (basis of a joint eigenspace, its weights so far)
    let mut spaces: Vec<(Vec<Vec<Scalar>>, Vec<Scalar>)> =
        vec![((0..n).map(|i| HVec::basis(0, n, i).v).collect(), Vec::new())];
    for op in ops {
        let mut next = Vec::new();
        for (basis, w) in spaces {
            let b = Matrix::from_cols(n, &basis);
            let mut cols = Vec::new();
            for x in &basis {
                match solve_exact(&b, &op.apply(x)) {
                    Solution::Unique(c) => cols.push(c),
                    _ => return None,
                }
            }
            let (spec, complete) = scan_spectrum(&Matrix::from_cols(basis.len(), &cols), true);
            if !complete {
                return None;
            }
            for (lam, vecs) in spec {
                let mut w2 = w.clone();
                w2.push(lam);
                next.push((vecs.iter().map(|y| b.apply(y)).collect(), w2));
            }
        }
        spaces = next;
    }
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    for (basis, w) in spaces {
        for x in basis {
            cols.push(x);
            weights.push(w.clone());
        }
    }
    let p = Matrix::from_cols(n, &cols);
    let p_inv = inverse(&p)?;
    Some(Frame { p, p_inv, weights: Some(weights) })
}

fn frames(rep: &CLieRep, degrees: &[i64]) -> Result<BTreeMap<i64, Frame>> {
    let mut cartans = Vec::new();
    for k in 0..rep.dim / 2 {
        cartans.push(i_omega(rep, 2 * k + 1, 2 * k + 2)?);
    }
    let mut out = BTreeMap::new();
    for &d in degrees {
        let n = rep.space.dim(d);
        let blocks: Option<Vec<&Matrix>> = cartans.iter().map(|c| c.block(d)).collect();
        let f = blocks.and_then(|b| weight_frame(&b)).unwrap_or_else(|| Frame::identity(n));
        out.insert(d, f);
    }
    Ok(out)
}

fn half(m: &Matrix) -> Matrix {
    m.scale(&Scalar::from_frac(1, 2))
}

/// Lagrange projectors of a diagonalizable operator with integer spectrum in 0..=top.
fn integer_projectors(op: &Matrix, top: i64, what: &str, d2: i64) -> Result<Vec<(i64, Matrix)>> {
    let n = op.rows;
    let id = Matrix::identity(n);
    let mut out = Vec::new();
    let mut sum = Matrix::zeros(n, n);
    for lam in 0..=top {
        let mut p = id.clone();
        for mu in 0..=top {
            if mu == lam {
                continue;
            }
            let f = op.sub(&id.scale(&Scalar::from_int(mu))).scale(&Scalar::from_frac(1, lam - mu));
            p = p.mul(&f);
        }
        if p.is_zero() {
            continue;
        }
        if op.mul(&p) != p.scale(&Scalar::from_int(lam)) {
            return Err(Error::Hypothesis(format!("{what} on 2Δ={d2} has spectrum outside 0..={top}")));
        }
        sum = sum.add(&p);
        out.push((lam, p));
    }
    if sum != id {
        return Err(Error::Hypothesis(format!("{what} on 2Δ={d2} is not diagonalizable with integer spectrum")));
    }
    Ok(out)
}

/// Joint eigenprojectors of (L₀⁺, L₀⁻) per component: ((λ⁺, λ⁻), projector).
type JointProjectors = BTreeMap<i64, Vec<((i64, i64), Matrix)>>;

fn d2_projectors(rep: &CLieRep) -> Result<JointProjectors> {
    let h = rep.op(Gen::H).ok_or_else(|| Error::Format("H not supplied".into()))?;
    let iom = i_omega(rep, 1, 2)?;
    let mut out = BTreeMap::new();
    for d in rep.space.degrees() {
        if d % 2 != 0 {
            return Err(Error::Hypothesis(format!("half-integer component 2Δ={d} has no integral L₀± spectrum")));
        }
        let (hb, ob) = (h.block(d).expect("degree 0"), iom.block(d).expect("degree 0"));
        let lp = half(&hb.sub(ob));
        let lm = half(&hb.add(ob));
        let pp = integer_projectors(&lp, d / 2, "L₀⁺", d)?;
        let pm = integer_projectors(&lm, d / 2, "L₀⁻", d)?;
        let mut joint = Vec::new();
        for (a, p) in &pp {
            for (b, q) in &pm {
                let j = p.mul(q);
                if !j.is_zero() {
                    joint.push(((*a, *b), j));
                }
            }
        }
        out.insert(d, joint);
    }
    Ok(out)
}

fn add_block(blocks: &mut BTreeMap<MuKey, Matrix>, key: MuKey, m: &Matrix) {
    match blocks.get_mut(&key) {
        Some(b) => *b = b.add(m),
        None => {
            blocks.insert(key, m.clone());
        }
    }
}

/// D = 2: μ²_{n;m} is the projection of μ¹_n onto the (L₀⁺, L₀⁻) bigrade shifted by n± = (n ± m)/2.
pub fn reconstruct_d2(table: &ModeTable, rep: &CLieRep) -> Result<MuDTable> {
    if rep.dim != 2 {
        return Err(Error::Precondition("the projection formula needs D = 2".into()));
    }
    if rep.space != table.space {
        return Err(Error::Structural("table and representation live on different spaces".into()));
    }
    let proj = d2_projectors(rep)?;
    let k2 = table.cutoff2();
    let mut keys: Vec<(i64, i64, i64)> = Vec::new();
    for d1 in table.space.degrees() {
        for d2 in table.space.degrees() {
            for n in n_range(d1, d2, k2) {
                if table.block(d1, d2, n).is_some() {
                    keys.push((d1, d2, n));
                }
            }
        }
    }
    let parts: Vec<BTreeMap<MuKey, Matrix>> = keys
        .par_iter()
        .map(|&(d1, d2, n)| {
            let mut blocks = BTreeMap::new();
            let m1 = table.block(d1, d2, n).expect("listed");
            let tg = d1 + d2 + 2 * n;
            for ((p1, q1), a) in &proj[&d1] {
                for ((p2, q2), b) in &proj[&d2] {
                    let mp = m1.mul(&Matrix::kron(a, b));
                    if mp.is_zero() {
                        continue;
                    }
                    for ((tp, tq), t) in &proj[&tg] {
                        let blk = t.mul(&mp);
                        if blk.is_zero() {
                            continue;
                        }
                        let (np, nm) = (tp - p1 - p2, tq - q1 - q2);
                        debug_assert_eq!(np + nm, n);
                        // (z⁺)^{n⁺}(z⁻)^{n⁻} = (𝐳²)^{min}(z±)^{|n⁺−n⁻|}
                        let m = (np - nm).unsigned_abs() as u32;
                        let (cp, cm) = d2_pm_coords(m);
                        let c = if np >= nm { cp } else { cm };
                        for (s, x) in c.iter().enumerate() {
                            if !x.is_zero() {
                                add_block(&mut blocks, (d1, d2, n, m, s + 1), &blk.scale(x));
                            }
                        }
                    }
                }
            }
            blocks
        })
        .collect();
    let mut blocks = BTreeMap::new();
    for p in parts {
        for (k, b) in p {
            add_block(&mut blocks, k, &b);
        }
    }
    blocks.retain(|_, b| !b.is_zero());
    Ok(MuDTable {
        dim: 2,
        space: table.space.clone(),
        blocks,
        solver: "d2-projection".into(),
        source_cutoff2: k2,
        instances: keys.len(),
        half_integer_slots: 0,
    })
}

/// Linear coordinates w_k± = z^{2k−1} ± i z^{2k}; variable 2k is w⁺, 2k+1 is w⁻ (0-based k).
struct WeightCoords {
    dim: usize,
    /// z = P w
    p: Matrix,
    /// w = Q z
    q: Matrix,
}

impl WeightCoords {
    fn new(dim: usize) -> Self {
        let mut p = Matrix::zeros(dim, dim);
        let mut q = Matrix::zeros(dim, dim);
        for k in 0..dim / 2 {
            let (a, b) = (2 * k, 2 * k + 1);
            p.set(a, a, Scalar::from_frac(1, 2));
            p.set(a, b, Scalar::from_frac(1, 2));
            p.set(b, a, Scalar::new(crate::exactnum::rat_int(0), crate::exactnum::rat(-1, 2)));
            p.set(b, b, Scalar::new(crate::exactnum::rat_int(0), crate::exactnum::rat(1, 2)));
            q.set(a, a, Scalar::one());
            q.set(a, b, Scalar::i());
            q.set(b, a, Scalar::one());
            q.set(b, b, Scalar::complex(0, -1));
        }
        WeightCoords { dim, p, q }
    }

    /// B with V(w_j) = Σ_i B_{ij} w_i for V = z^α∂_β − z^β∂_α (0-based).
    fn rotation(&self, alpha: usize, beta: usize) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        m.set(alpha, beta, Scalar::one());
        m.set(beta, alpha, Scalar::from_int(-1));
        // B_{ij} = Σ_{a,c} P_{ai} M_{ac} Q_{jc}
        self.p.transpose().mul(&m).mul(&self.q.transpose())
    }

    /// Weight of w^e under the vector field of iΩ_{2k+1,2k+2}.
    fn mono_weight(&self, e: &[u32], k: usize) -> i64 {
        e[2 * k + 1] as i64 - e[2 * k] as i64
    }

    fn to_z(&self, e: &[u32]) -> PolyD {
        let mut out = PolyD::one(self.dim);
        for (j, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut lin = PolyD::zero(self.dim);
            for c in 0..self.dim {
                let mut mono = vec![0; self.dim];
                mono[c] = 1;
                lin.add_term(mono, self.q.get(j, c));
            }
            out = out.mul(&lin.pow(k));
        }
        out
    }

    fn at_e1(&self, e: &[u32]) -> bool {
        e.iter().enumerate().all(|(j, &k)| k == 0 || j < 2)
    }
}

/// Applies the linear vector field Σ B_{ij} w_i ∂_{w_j} to w^e.
fn vf_on_mono(b: &Matrix, e: &Mono) -> Vec<(Mono, Scalar)> {
    let mut out: BTreeMap<Mono, Scalar> = BTreeMap::new();
    for j in 0..e.len() {
        if e[j] == 0 {
            continue;
        }
        for i in 0..e.len() {
            let c = b.get(i, j);
            if c.is_zero() {
                continue;
            }
            let mut f = e.clone();
            f[j] -= 1;
            f[i] += 1;
            *out.entry(f).or_insert_with(Scalar::zero) += &c.scale_int(e[j] as i64);
        }
    }
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// 4 Σ_k ∂_{w_k⁺}∂_{w_k⁻} w^e.
fn laplacian_on_mono(e: &Mono) -> Vec<(Mono, Scalar)> {
    let mut out = Vec::new();
    for k in 0..e.len() / 2 {
        let (a, b) = (2 * k, 2 * k + 1);
        if e[a] > 0 && e[b] > 0 {
            let mut f = e.clone();
            f[a] -= 1;
            f[b] -= 1;
            out.push((f, Scalar::from_int(4 * e[a] as i64 * e[b] as i64)));
        }
    }
    out
}

struct Instance<'a> {
    wc: &'a WeightCoords,
    frames: [&'a Frame; 3],
    d1: i64,
    d2: i64,
    rows: usize,
    cols: usize,
    /// Per rotation generator (0-based α<β): (ρ_W block, S = Ω'⊗1 + 1⊗Ω'', vector-field matrix).
    rots: Vec<(Matrix, Matrix, Matrix)>,
    /// Cartan weights of Hom entries, when every Cartan block is diagonal.
    entry_weights: Option<Vec<Vec<Scalar>>>,
}

impl<'a> Instance<'a> {
    fn new(
        rep: &'a CLieRep,
        wc: &'a WeightCoords,
        fr: &'a BTreeMap<i64, Frame>,
        d1: i64,
        d2: i64,
        tg: i64,
    ) -> Result<Self> {
        let sp = &rep.space;
        let (rows, cols) = (sp.dim(tg), sp.dim(d1) * sp.dim(d2));
        let (f1, f2, ft) = (&fr[&d1], &fr[&d2], &fr[&tg]);
        let mut rots = Vec::new();
        for a in 1..rep.dim {
            let g = Gen::O(a, a + 1);
            let op = rep.op(g).ok_or_else(|| Error::Precondition(format!("{g} not supplied")))?;
            let blk = |d: i64, f: &Frame| {
                op.block(d).map(|m| f.to_frame(m)).ok_or_else(|| Error::Structural(format!("{g} missing at 2Δ={d}")))
            };
            let (w, o1, o2) = (blk(tg, ft)?, blk(d1, f1)?, blk(d2, f2)?);
            let s =
                Matrix::kron(&o1, &Matrix::identity(sp.dim(d2))).add(&Matrix::kron(&Matrix::identity(sp.dim(d1)), &o2));
            rots.push((w, s, wc.rotation(a - 1, a)));
        }
        let entry_weights = match (&f1.weights, &f2.weights, &ft.weights) {
            (Some(x), Some(y), Some(w)) => {
                let mut wts = vec![Vec::new(); rows * cols];
                for t in 0..rows {
                    for i in 0..x.len() {
                        for j in 0..y.len() {
                            wts[t * cols + i * y.len() + j] =
                                (0..rep.dim / 2).map(|k| &(&w[t][k] - &x[i][k]) - &y[j][k]).collect();
                        }
                    }
                }
                Some(wts)
            }
            _ => None,
        };
        Ok(Instance { wc, frames: [f1, f2, ft], d1, d2, rows, cols, rots, entry_weights })
    }

    /// μ in the original bases from μ̃ in the weight frames.
    fn from_frame(&self, m: &Matrix) -> Matrix {
        let [f1, f2, ft] = self.frames;
        ft.p.mul(m).mul(&Matrix::kron(&f1.p_inv, &f2.p_inv))
    }

    fn into_frame(&self, m: &Matrix) -> Matrix {
        let [f1, f2, ft] = self.frames;
        ft.p_inv.mul(m).mul(&Matrix::kron(&f1.p, &f2.p))
    }

    fn n_entries(&self) -> usize {
        self.rows * self.cols
    }

    fn admissible(&self, e: usize, mono: &[u32]) -> bool {
        match &self.entry_weights {
            None => true,
            Some(w) => w[e].iter().enumerate().all(|(k, x)| *x == Scalar::from_int(self.wc.mono_weight(mono, k))),
        }
    }

    /// Image of E_e ⊗ w^mono under ρ_Hom(Ω) ⊗ 1 − 1 ⊗ vf(Ω).
    fn equation_image(&self, r: usize, e: usize, mono: &Mono) -> Vec<((usize, Mono), Scalar)> {
        let (w, s, b) = &self.rots[r];
        let (t, c) = (e / self.cols, e % self.cols);
        let mut out = Vec::new();
        for u in 0..self.rows {
            let x = w.get(u, t);
            if !x.is_zero() {
                out.push(((u * self.cols + c, mono.clone()), x.clone()));
            }
        }
        for k in 0..self.cols {
            let x = s.get(c, k);
            if !x.is_zero() {
                out.push(((t * self.cols + k, mono.clone()), -x));
            }
        }
        for (f, x) in vf_on_mono(b, mono) {
            out.push(((e, f), -x));
        }
        out
    }

    /// Basis of equivariant harmonic Hom-valued polynomials of degree m.
    fn equivariant_basis(&self, m: u32) -> Vec<BTreeMap<(usize, Mono), Scalar>> {
        let monos = monomials(self.wc.dim, m);
        let mut unknowns: Vec<(usize, Mono)> = Vec::new();
        for e in 0..self.n_entries() {
            for mono in &monos {
                if self.admissible(e, mono) {
                    unknowns.push((e, mono.clone()));
                }
            }
        }
        if unknowns.is_empty() {
            return Vec::new();
        }
        // sparse columns: equation rows keyed by (kind, entry, monomial)
        let mut rows: BTreeMap<(usize, usize, Mono), Vec<(usize, Scalar)>> = BTreeMap::new();
        for (col, (e, mono)) in unknowns.iter().enumerate() {
            for r in 0..self.rots.len() {
                for ((e2, f), x) in self.equation_image(r, *e, mono) {
                    rows.entry((r, e2, f)).or_default().push((col, x));
                }
            }
            for (f, x) in laplacian_on_mono(mono) {
                rows.entry((usize::MAX, *e, f)).or_default().push((col, x));
            }
        }
        let rows: Vec<Vec<(usize, Scalar)>> = rows
            .into_values()
            .map(|mut r| {
                r.sort_by_key(|x| x.0);
                let mut merged: Vec<(usize, Scalar)> = Vec::new();
                for (c, x) in r {
                    match merged.last_mut() {
                        Some(last) if last.0 == c => last.1 += &x,
                        _ => merged.push((c, x)),
                    }
                }
                merged.retain(|x| !x.1.is_zero());
                merged
            })
            .filter(|r| !r.is_empty())
            .collect();
        // connected components of the column graph
        let n = unknowns.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for r in &rows {
            let a = find(&mut parent, r[0].0);
            for x in &r[1..] {
                let b = find(&mut parent, x.0);
                if a != b {
                    parent[b] = a;
                }
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in 0..n {
            let root = find(&mut parent, c);
            comps.entry(root).or_default().push(c);
        }
        let mut comp_rows: BTreeMap<usize, Vec<&Vec<(usize, Scalar)>>> = BTreeMap::new();
        for r in &rows {
            let root = find(&mut parent, r[0].0);
            comp_rows.entry(root).or_default().push(r);
        }
        let mut out = Vec::new();
        for (root, cols) in comps {
            let local: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let rs = comp_rows.get(&root).map(Vec::as_slice).unwrap_or(&[]);
            let mut a = Matrix::zeros(rs.len(), cols.len());
            for (i, r) in rs.iter().enumerate() {
                for (c, x) in r.iter() {
                    a.set(i, local[c], x.clone());
                }
            }
            let ker = if rs.is_empty() {
                (0..cols.len())
                    .map(|i| (0..cols.len()).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
                    .collect()
            } else {
                nullspace(&a)
            };
            for v in ker {
                let mut f = BTreeMap::new();
                for (i, x) in v.into_iter().enumerate() {
                    if !x.is_zero() {
                        f.insert(unknowns[cols[i]].clone(), x);
                    }
                }
                out.push(f);
            }
        }
        out
    }

    /// Hom-valued polynomial → per-σ blocks in the harmonic basis.
    fn to_blocks(&self, m: u32, f: &BTreeMap<(usize, Mono), Scalar>) -> Result<Vec<Matrix>> {
        let hb = build_harmonic_basis(self.wc.dim, m);
        let mut per_entry: BTreeMap<usize, PolyD> = BTreeMap::new();
        let mut zcache: BTreeMap<&Mono, PolyD> = BTreeMap::new();
        for ((e, mono), x) in f {
            let z = zcache.entry(mono).or_insert_with(|| self.wc.to_z(mono)).scale(x);
            let acc = per_entry.entry(*e).or_insert_with(|| PolyD::zero(self.wc.dim));
            *acc = acc.add(&z);
        }
        let mut out = vec![Matrix::zeros(self.rows, self.cols); hb.len()];
        for (e, p) in per_entry {
            if p.is_zero() {
                continue;
            }
            let c = hb.coords(&p).map_err(|_| Error::Invariant("solver produced a non-harmonic coefficient".into()))?;
            for (s, x) in c.into_iter().enumerate() {
                out[s].set(e / self.cols, e % self.cols, x);
            }
        }
        Ok(out)
    }
}

/// Solved instance: blocks keyed by (m, σ) and the count of odd-parity slots carried.
type InstanceOut = (Vec<((u32, usize), Matrix)>, usize);

fn solve_instance(inst: &Instance, table: &ModeTable, n: i64, m_max: i64) -> Result<InstanceOut> {
    let ctx = format!("(2Δ'={}, 2Δ''={}, n={n})", inst.d1, inst.d2);
    let rhs: Vec<Scalar> = match table.block(inst.d1, inst.d2, n) {
        Some(b) => {
            let b = inst.into_frame(b);
            (0..b.rows).flat_map(|t| b.row(t).to_vec()).collect()
        }
        None => vec![Scalar::zero(); inst.n_entries()],
    };
    let mut family: Vec<(u32, BTreeMap<(usize, Mono), Scalar>)> = Vec::new();
    let mut odd_slots = 0;
    for m in 0..=m_max.max(-1) {
        let m = m as u32;
        if (n - m as i64).rem_euclid(2) == 1 {
            odd_slots += 1;
        }
        for f in inst.equivariant_basis(m) {
            family.push((m, f));
        }
    }
    if family.is_empty() {
        if rhs.iter().any(|x| !x.is_zero()) {
            return Err(Error::Hypothesis(format!("{ctx}: no equivariant extension within m ≤ {m_max}")));
        }
        return Ok((Vec::new(), odd_slots));
    }
    // restriction to e₁
    let mut cols = Vec::with_capacity(family.len());
    for (_, f) in &family {
        let mut v = vec![Scalar::zero(); inst.n_entries()];
        for ((e, mono), x) in f {
            if inst.wc.at_e1(mono) {
                v[*e] += x;
            }
        }
        cols.push(v);
    }
    let a = Matrix::from_cols(inst.n_entries(), &cols);
    let nu = match solve_exact(&a, &rhs) {
        Solution::Unique(nu) => nu,
        Solution::Inconsistent => {
            return Err(Error::Hypothesis(format!(
                "{ctx}: restriction equation has no equivariant solution with m ≤ {m_max}"
            )))
        }
        Solution::Underdetermined { nullspace, .. } => {
            return Err(Error::Uniqueness(format!(
                "{ctx}: {} free parameters in the equivariant extension",
                nullspace.len()
            )))
        }
    };
    let mut per_m: BTreeMap<u32, BTreeMap<(usize, Mono), Scalar>> = BTreeMap::new();
    for ((m, f), c) in family.iter().zip(&nu) {
        if c.is_zero() {
            continue;
        }
        let acc = per_m.entry(*m).or_default();
        for (k, x) in f {
            *acc.entry(k.clone()).or_insert_with(Scalar::zero) += &(c * x);
        }
    }
    let mut out = Vec::new();
    for (m, mut f) in per_m {
        f.retain(|_, x| !x.is_zero());
        if f.is_empty() {
            continue;
        }
        if (n - m as i64).rem_euclid(2) == 1 {
            return Err(Error::Invariant(format!("{ctx}: half-integer power of 𝐳² survived at m={m}")));
        }
        for (s, blk) in inst.to_blocks(m, &f)?.into_iter().enumerate() {
            if !blk.is_zero() {
                out.push(((m, s + 1), inst.from_frame(&blk)));
            }
        }
    }
    Ok((out, odd_slots))
}

/// General even D: the unique so(D)-equivariant harmonic extension restricting to μ¹ on the line.
pub fn reconstruct_general(
    table: &ModeTable,
    rep: &CLieRep,
    dim: usize,
    source_cutoff2: Option<i64>,
) -> Result<MuDTable> {
    if dim % 2 == 1 || dim == 0 {
        return Err(Error::Precondition(format!("dimension must be even, got {dim}")));
    }
    if rep.dim != dim {
        return Err(Error::Precondition(format!("representation is for D={}, requested D={dim}", rep.dim)));
    }
    if rep.space != table.space {
        return Err(Error::Structural("table and representation live on different spaces".into()));
    }
    let k2 = table.cutoff2();
    let src = source_cutoff2.unwrap_or(k2).min(k2);
    let degrees: Vec<i64> = table.space.degrees();
    let mut j2 = BTreeMap::new();
    for &d in &degrees {
        j2.insert(d, component_j2(rep, d)?);
    }
    let wc = WeightCoords::new(dim);
    let fr = frames(rep, &degrees)?;
    let mut work = Vec::new();
    for &d1 in degrees.iter().filter(|&&d| d <= src) {
        for &d2 in degrees.iter().filter(|&&d| d <= src) {
            for n in n_range(d1, d2, k2) {
                let tg = d1 + d2 + 2 * n;
                if table.space.dim(tg) == 0 || table.space.dim(d1) == 0 || table.space.dim(d2) == 0 {
                    continue;
                }
                // m ≤ Δ'+Δ''+n+J'+J''
                let m_max = (d1 + d2 + 2 * n + j2[&d1] + j2[&d2]).div_euclid(2);
                work.push((d1, d2, n, tg, m_max));
            }
        }
    }
    let results: Vec<Result<(MuKey, InstanceOut)>> = work
        .par_iter()
        .map(|&(d1, d2, n, tg, m_max)| {
            let inst = Instance::new(rep, &wc, &fr, d1, d2, tg)?;
            let out = solve_instance(&inst, table, n, m_max)?;
            Ok(((d1, d2, n, 0, 0), out))
        })
        .collect();
    let mut blocks = BTreeMap::new();
    let mut half_slots = 0;
    for r in results {
        let ((d1, d2, n, _, _), (bl, odd)) = r?;
        half_slots += odd;
        for ((m, s), b) in bl {
            blocks.insert((d1, d2, n, m, s), b);
        }
    }
    Ok(MuDTable {
        dim,
        space: table.space.clone(),
        blocks,
        solver: "equivariant-general".into(),
        source_cutoff2: src,
        instances: work.len(),
        half_integer_slots: half_slots,
    })
}

/// Keys where two tables differ, restricted to sources within both windows.
pub fn first_table_difference(a: &MuDTable, b: &MuDTable) -> Option<MuKey> {
    let src = a.source_cutoff2.min(b.source_cutoff2);
    let keys: BTreeSet<&MuKey> = a.blocks.keys().chain(b.blocks.keys()).collect();
    keys.into_iter()
        .filter(|k| k.0 <= src && k.1 <= src)
        .find(|k| {
            let (x, y) = (a.blocks.get(k), b.blocks.get(k));
            match (x, y) {
                (Some(x), Some(y)) => x != y,
                (Some(x), None) | (None, Some(x)) => !x.is_zero(),
                (None, None) => false,
            }
        })
        .copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_coordinates_invert() {
        let wc = WeightCoords::new(4);
        assert_eq!(wc.p.mul(&wc.q), Matrix::identity(4));
    }

    #[test]
    fn vector_field_weights_in_w_coordinates() {
        // iΩ₁₂ acts on w⁺ with −1 and on w⁻ with +1
        let wc = WeightCoords::new(2);
        let b = wc.rotation(0, 1).scale(&Scalar::i());
        assert_eq!(vf_on_mono(&b, &vec![1, 0]), vec![(vec![1, 0], Scalar::from_int(-1))]);
        assert_eq!(vf_on_mono(&b, &vec![0, 1]), vec![(vec![0, 1], Scalar::one())]);
    }
}
