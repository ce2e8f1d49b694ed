//! Harmonic benchmark: V₀ = ℂ𝟙, V_m = ℂ_m^har, μ¹_m(𝟙⊗𝟙) = harmonic part of (z¹)^m.

use std::collections::BTreeMap;

use serde_json::json;

use super::MuDTable;
use crate::chiral::ModeTable;
use crate::conflie::{CLieRep, Gen};
use crate::error::Result;
use crate::exactnum::Scalar;
use crate::gradedlinalg::{BlockMap, GradedSpace, Matrix, WeightLabel};
use crate::polyharm::{build_harmonic_basis, gegenbauer_h, harmonic_decompose_deg, PolyD};
use crate::report::Check;

/// Spec data for the benchmark: only H and the rotations act; T is zero.
pub fn gegenbauer_spec(dim: usize, max_m: u32) -> Result<(CLieRep, ModeTable)> {
    let mut components = BTreeMap::new();
    let mut gram = BTreeMap::new();
    for m in 0..=max_m {
        let n = build_harmonic_basis(dim, m).len();
        let d2 = 2 * m as i64;
        components.insert(d2, (0..n).map(|i| WeightLabel::new(d2, Vec::new(), 0, i)).collect::<Vec<_>>());
        gram.insert(d2, Matrix::identity(n));
    }
    let space = GradedSpace::new(components, 2 * max_m as i64, gram)?;
    let mut action = BTreeMap::new();
    action.insert(
        Gen::H,
        BlockMap::from_fn(&space, 0, 0, |d| Matrix::identity(space.dim(d)).scale(&Scalar::from_frac(d, 2))),
    );
    for a in 1..=dim {
        for b in a + 1..=dim {
            // the polynomial representation is minus the vector field
            let op = BlockMap::from_fn(&space, 0, 0, |d| {
                build_harmonic_basis(dim, (d / 2) as u32).rotation_of(a - 1, b - 1).neg()
            });
            action.insert(Gen::O(a, b), op);
        }
    }
    let rep = CLieRep::new(dim, space.clone(), action)?;
    let mut blocks = BTreeMap::new();
    for m in 0..=max_m {
        let basis = build_harmonic_basis(dim, m);
        let proj = harmonic_decompose_deg(&PolyD::var(dim, 0).pow(m), m)?[0].clone();
        let c = basis.coords(&proj)?;
        blocks.insert((0, 0, m as i64), Matrix::from_cols(c.len(), &[c]));
    }
    let table = ModeTable::new(space.clone(), 0, BlockMap::zero(&space, 2, 0), blocks)?;
    Ok((rep, table))
}

/// Σ_σ (μ_{m;m,σ})₁ h_{m,σ}, normalized to 1 at e₁; None if it vanishes there.
pub fn gegenbauer_readout(mud: &MuDTable, m: u32) -> Option<PolyD> {
    let basis = build_harmonic_basis(mud.dim, m);
    let mut p = PolyD::zero(mud.dim);
    for (_, sigma, blk) in mud.blocks_at(0, 0, m as i64).filter(|(mm, _, _)| *mm == m) {
        p = p.add(&basis.polys[sigma - 1].scale(blk.get(0, 0)));
    }
    let e = p.at_e1();
    (!e.is_zero()).then(|| p.scale(&e.inv().expect("nonzero")))
}

/// The extension of u ↦ (u¹)^m matches the Gegenbauer generating series for every m in the table.
pub fn check_gegenbauer(mud: &MuDTable, max_m: u32) -> Check {
    for m in 0..=max_m {
        let want = match gegenbauer_h(mud.dim, m) {
            Ok(p) => p,
            Err(e) => return Check::fail("gegenbauer", e.to_string(), json!({"m": m})),
        };
        let got = gegenbauer_readout(mud, m);
        if got.as_ref() != Some(&want) {
            return Check::fail(
                "gegenbauer",
                "equivariant extension differs from the Gegenbauer harmonic",
                json!({"m": m, "solver": got.map(|p| p.to_string()), "gegenbauer": want.to_string()}),
            );
        }
    }
    Check::pass("gegenbauer", format!("D={}, m ≤ {max_m}: extension equals the Gegenbauer harmonic", mud.dim))
}
