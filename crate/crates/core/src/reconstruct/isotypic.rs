//! Independent recomputation of μ^D through so(D−1)-invariants and the quadratic Casimir.

use std::collections::BTreeMap;

use serde_json::json;

use super::{component_j2, MuDTable};
use crate::chiral::{n_range, ModeTable};
use crate::conflie::{CLieRep, Gen};
use crate::error::{Error, Result};
use crate::exactnum::{factorial, Scalar};
use crate::gradedlinalg::{inverse, nullspace, solve_exact, span_basis, Matrix, Solution};
use crate::polyharm::build_harmonic_basis;
use crate::report::{Check, Report};

/// Outcome of one (Δ', Δ'', n) instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Crosscheck {
    Agree,
    Disagree(MuKeyDiff),
    Inapplicable(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuKeyDiff {
    pub m: u32,
    pub sigma: usize,
}

/// ρ_Hom(Ω) on row-major vec(μ): Ω_W ⊗ 1 − 1 ⊗ Sᵀ with S = Ω'⊗1 + 1⊗Ω''.
fn hom_action(rep: &CLieRep, a: usize, b: usize, d1: i64, d2: i64, tg: i64) -> Result<Matrix> {
    let g = Gen::O(a, b);
    let op = rep.op(g).ok_or_else(|| Error::Precondition(format!("{g} not supplied")))?;
    let blk = |d: i64| op.block(d).cloned().ok_or_else(|| Error::Structural(format!("{g} missing at 2Δ={d}")));
    let (w, o1, o2) = (blk(tg)?, blk(d1)?, blk(d2)?);
    let sp = &rep.space;
    let (n1, n2) = (sp.dim(d1), sp.dim(d2));
    let s = Matrix::kron(&o1, &Matrix::identity(n2)).add(&Matrix::kron(&Matrix::identity(n1), &o2));
    Ok(Matrix::kron(&w, &Matrix::identity(n1 * n2)).sub(&Matrix::kron(&Matrix::identity(sp.dim(tg)), &s.transpose())))
}

/// Fischer form B(p,q) = Σ p_e q_e e! on the harmonic basis of degree m.
fn fischer_gram(dim: usize, m: u32) -> Matrix {
    let hb = build_harmonic_basis(dim, m);
    let n = hb.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Scalar::zero();
            for (e, c) in &hb.polys[i].terms {
                let d = hb.polys[j].coeff(e);
                if d.is_zero() {
                    continue;
                }
                let mut f = num_bigint::BigInt::from(1);
                for &k in e {
                    f *= factorial(k);
                }
                acc += &(&(c * &d) * &Scalar::from_rational(num_rational::BigRational::from_integer(f)));
            }
            g.set(i, j, acc);
        }
    }
    g
}

fn columns_to_vec(m: &Matrix) -> Vec<Scalar> {
    (0..m.rows).flat_map(|t| m.row(t).to_vec()).collect()
}

fn vec_to_matrix(v: &[Scalar], rows: usize, cols: usize) -> Matrix {
    Matrix::from_rows((0..rows).map(|t| v[t * cols..(t + 1) * cols].to_vec()).collect())
}

/// Blocks μ_{m,σ} for one instance via the isotypic route, keyed by (m, σ).
pub fn isotypic_blocks(
    rep: &CLieRep,
    table: &ModeTable,
    d1: i64,
    d2: i64,
    n: i64,
    m_cap: u32,
) -> std::result::Result<BTreeMap<(u32, usize), Matrix>, String> {
    let dim = rep.dim;
    let sp = &rep.space;
    let tg = d1 + d2 + 2 * n;
    let (rows, cols) = (sp.dim(tg), sp.dim(d1) * sp.dim(d2));
    let ne = rows * cols;
    let mut out = BTreeMap::new();
    let mu1 = match table.block(d1, d2, n) {
        Some(b) => columns_to_vec(b),
        None => return Ok(out),
    };
    if ne > 400 {
        return Err(format!("Hom space of dimension {ne} is too large for the crosscheck"));
    }
    let mut acts: BTreeMap<(usize, usize), Matrix> = BTreeMap::new();
    for a in 1..=dim {
        for b in a + 1..=dim {
            acts.insert((a, b), hom_action(rep, a, b, d1, d2, tg).map_err(|e| e.to_string())?);
        }
    }
    // so(D−1)-invariants: common kernel of Ω_{αβ}, 2 ≤ α < β
    let stab: Vec<&Matrix> = acts.iter().filter(|((a, _), _)| *a >= 2).map(|(_, m)| m).collect();
    let inv_basis = if stab.is_empty() {
        (0..ne).map(|i| crate::gradedlinalg::HVec::basis(0, ne, i).v).collect()
    } else {
        nullspace(&Matrix::vstack(&stab.into_iter().cloned().collect::<Vec<_>>()))
    };
    if inv_basis.is_empty() {
        return if mu1.iter().all(Scalar::is_zero) { Ok(out) } else { Err("μ¹ is not so(D−1)-invariant".into()) };
    }
    let b = Matrix::from_cols(ne, &inv_basis);
    let coords = |v: &[Scalar]| match solve_exact(&b, v) {
        Solution::Unique(c) => Some(c),
        _ => None,
    };
    let mut casimir = Matrix::zeros(ne, ne);
    for m in acts.values() {
        casimir = casimir.add(&m.mul(m));
    }
    let mut cols_c = Vec::new();
    for v in &inv_basis {
        cols_c.push(coords(&casimir.apply(v)).ok_or("Casimir leaves the invariant subspace")?);
    }
    let cas = Matrix::from_cols(inv_basis.len(), &cols_c);
    let mu1c = coords(&mu1).ok_or("μ¹ is not so(D−1)-invariant")?;
    // eigenspaces for −m(m+D−2), m = 0, 1, …
    let k = inv_basis.len();
    let mut pieces: Vec<(u32, Vec<Vec<Scalar>>)> = Vec::new();
    let mut found = 0;
    let mut m = 0u32;
    while found < k {
        if m > m_cap {
            return Err("Casimir spectrum not exhausted by −m(m+D−2)".into());
        }
        let lam = Scalar::from_int(-(m as i64) * (m as i64 + dim as i64 - 2));
        let ker = nullspace(&cas.sub(&Matrix::identity(k).scale(&lam)));
        if !ker.is_empty() {
            found += ker.len();
            pieces.push((m, ker));
        }
        m += 1;
    }
    let all: Vec<Vec<Scalar>> = pieces.iter().flat_map(|(_, v)| v.clone()).collect();
    let split = match solve_exact(&Matrix::from_cols(k, &all), &mu1c) {
        Solution::Unique(c) => c,
        _ => return Err("Casimir is not diagonalizable on the invariants".into()),
    };
    let mut off = 0;
    for (m, vecs) in &pieces {
        let mut fm = vec![Scalar::zero(); ne];
        for (j, v) in vecs.iter().enumerate() {
            let c = &split[off + j];
            if !c.is_zero() {
                let full = b.apply(v);
                for (x, y) in fm.iter_mut().zip(&full) {
                    *x += &(c * y);
                }
            }
        }
        off += vecs.len();
        if fm.iter().all(Scalar::is_zero) {
            continue;
        }
        for ((m2, s), blk) in propagate(dim, *m, &fm, &acts, rows, cols)? {
            out.insert((m2, s), blk);
        }
    }
    Ok(out)
}

/// μ_{m,σ} = Σ_τ (G⁻¹)_{τσ} Ψ(h_τ) with Ψ the intertwiner sending the zonal kernel to f_m.
fn propagate(
    dim: usize,
    m: u32,
    fm: &[Scalar],
    acts: &BTreeMap<(usize, usize), Matrix>,
    rows: usize,
    cols: usize,
) -> std::result::Result<Vec<((u32, usize), Matrix)>, String> {
    let hb = build_harmonic_basis(dim, m);
    let h = hb.len();
    let g = fischer_gram(dim, m);
    let ginv = inverse(&g).ok_or("degenerate Fischer form")?;
    let k0: Vec<Scalar> = (0..h).map(|t| ginv.get(t, 0).clone()).collect();
    // polynomial representation ρ_P = −vector field
    let rho_p: BTreeMap<(usize, usize), Matrix> =
        acts.keys().map(|&(a, b)| ((a, b), hb.rotation_of(a - 1, b - 1).neg())).collect();
    let mut span: Vec<Vec<Scalar>> = vec![k0.clone()];
    let mut images: Vec<Vec<Scalar>> = vec![fm.to_vec()];
    let mut queue = vec![0usize];
    while let Some(i) = queue.pop() {
        for (key, rp) in &rho_p {
            let v = rp.apply(&span[i]);
            let mut cand = span.clone();
            cand.push(v.clone());
            if span_basis(&cand, h).len() > span.len() {
                span.push(v);
                images.push(acts[key].apply(&images[i]));
                queue.push(span.len() - 1);
            }
        }
    }
    if span.len() != h {
        return Err(format!("zonal kernel does not generate ℂ_{m}^har"));
    }
    // Ψ on the basis h_τ
    let sm = Matrix::from_cols(h, &span);
    let sinv = inverse(&sm).ok_or("singular cyclic basis")?;
    let ne = fm.len();
    let psi: Vec<Vec<Scalar>> = (0..h)
        .map(|t| {
            let mut acc = vec![Scalar::zero(); ne];
            for j in 0..h {
                let c = sinv.get(j, t);
                if !c.is_zero() {
                    for (x, y) in acc.iter_mut().zip(&images[j]) {
                        *x += &(c * y);
                    }
                }
            }
            acc
        })
        .collect();
    // intertwining
    for (key, rp) in &rho_p {
        for t in 0..h {
            let lhs = acts[key].apply(&psi[t]);
            let mut rhs = vec![Scalar::zero(); ne];
            for s in 0..h {
                let c = rp.get(s, t);
                if !c.is_zero() {
                    for (x, y) in rhs.iter_mut().zip(&psi[s]) {
                        *x += &(c * y);
                    }
                }
            }
            if lhs != rhs {
                return Err(format!("f_{m} does not generate a copy of ℂ_{m}^har"));
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..h {
        let mut acc = vec![Scalar::zero(); ne];
        for t in 0..h {
            let c = ginv.get(t, s);
            if !c.is_zero() {
                for (x, y) in acc.iter_mut().zip(&psi[t]) {
                    *x += &(c * y);
                }
            }
        }
        if acc.iter().any(|x| !x.is_zero()) {
            out.push(((m, s + 1), vec_to_matrix(&acc, rows, cols)));
        }
    }
    Ok(out)
}

/// Compares the isotypic route with `mud` on every in-window instance with sources ≤ `source_cutoff2`.
pub fn isotypic_crosscheck(mud: &MuDTable, table: &ModeTable, rep: &CLieRep, source_cutoff2: i64) -> Report {
    let mut report = Report::new("isotypic");
    let src = source_cutoff2.min(mud.source_cutoff2);
    let k2 = mud.cutoff2();
    let (mut agree, mut inapplicable) = (0, Vec::new());
    let degrees = mud.space.degrees();
    for &d1 in degrees.iter().filter(|&&d| d <= src) {
        for &d2 in degrees.iter().filter(|&&d| d <= src) {
            let j = match (component_j2(rep, d1), component_j2(rep, d2)) {
                (Ok(a), Ok(b)) => a + b,
                _ => {
                    inapplicable.push(format!("({d1},{d2}): weight data"));
                    continue;
                }
            };
            for n in n_range(d1, d2, k2) {
                let m_cap = ((d1 + d2 + 2 * n + j).max(0) / 2 + 8) as u32;
                match isotypic_blocks(rep, table, d1, d2, n, m_cap) {
                    Err(why) => inapplicable.push(format!("({d1},{d2},{n}): {why}")),
                    Ok(blocks) => {
                        let theirs: BTreeMap<(u32, usize), &Matrix> =
                            mud.blocks_at(d1, d2, n).map(|(m, s, b)| ((m, s), b)).collect();
                        let mut keys: Vec<(u32, usize)> = blocks.keys().copied().collect();
                        keys.extend(theirs.keys().copied());
                        keys.sort();
                        keys.dedup();
                        let bad = keys.into_iter().find(|k| {
                            let (x, y) = (blocks.get(k), theirs.get(k));
                            match (x, y) {
                                (Some(x), Some(y)) => x != *y,
                                (Some(x), None) => !x.is_zero(),
                                (None, Some(y)) => !y.is_zero(),
                                (None, None) => false,
                            }
                        });
                        if let Some((m, s)) = bad {
                            report.push(Check::fail(
                                "isotypic",
                                "isotypic route disagrees with the solver",
                                json!({"block": format!("({d1},{d2},{n},{m},{s})")}),
                            ));
                            return report;
                        }
                        agree += 1;
                    }
                }
            }
        }
    }
    let detail = format!("{agree} instances agree; {} inapplicable", inapplicable.len());
    let c = if agree == 0 && !inapplicable.is_empty() {
        Check::inconclusive("isotypic", detail)
    } else {
        Check::pass("isotypic", detail)
    };
    report.push(match inapplicable.first() {
        Some(first) => c.with_witness(json!({"first_inapplicable": first})),
        None => c,
    });
    report
}
