use recon_core::chiral::{
    check_c1d_action, check_commutator_formula, check_locality_1d, check_pseudoderivation, check_translation,
    make_local_endo,
};
use recon_core::conflie::{validate_rep, Gen};
use recon_core::exactnum::Scalar;
use recon_core::gradedlinalg::HVec;
use recon_core::models::{
    build_heisenberg, build_tensor_2d, chiral_factorization_oracle, fixture_negative_energy, fixture_negative_norm,
    fixture_scaled_omega,
};
use recon_core::reconstruct::{assemble_series, reconstruct_d2, reconstruct_general};

#[test]
fn heisenberg_dimensions() {
    let m = build_heisenberg(4);
    let dims: Vec<usize> = (0..=4).map(|d| m.space.dim(2 * d)).collect();
    assert_eq!(dims, vec![1, 1, 2, 3, 5]);
}

#[test]
fn heisenberg_products_of_the_generator() {
    let m = build_heisenberg(3);
    let a = m.alpha();
    let vac = m.table.vacuum_vec();
    // a_{(1)}a = μ_{-2}(a⊗a)
    assert_eq!(m.table.mu(&a, -2, &a).unwrap(), vac);
    assert!(m.table.mu(&a, -1, &a).unwrap().is_zero());
    assert_eq!(m.space.inner(2, &a.v, &a.v), Scalar::one());
    let lm = m.l_minus1.apply(&vac).unwrap();
    assert!(m.l1.apply(&lm).unwrap().is_zero());
}

#[test]
fn heisenberg_chiral_axioms() {
    let m = build_heisenberg(4);
    let r = check_translation(&m.table);
    assert!(r.passed(), "{:?}", r.to_json());
    let a = m.alpha();
    let loc = check_locality_1d(&m.table, &a, &a);
    assert_eq!(loc.minimal_n, Some(2));
    assert!(loc.witness_below.is_some());
    for (mm, nn) in [(0, 0), (1, -1), (1, 1), (-1, 2), (2, -3)] {
        let c = check_commutator_formula(&m.table, &a, &a, mm, nn);
        assert_eq!(c.status, recon_core::report::Status::Pass, "{c:?}");
    }
}

#[test]
fn heisenberg_local_endomorphisms() {
    let m = build_heisenberg(4);
    let rep = m.rep();
    for g in [Gen::H, Gen::C(1)] {
        let x = rep.op(g).unwrap().clone();
        let endo = make_local_endo(&m.table, &x).unwrap();
        let r = check_pseudoderivation(&endo, &m.table);
        assert!(r.passed(), "{g}: {:?}", r.to_json());
    }
    let r = check_c1d_action(&m.table, &rep).unwrap();
    assert!(r.passed(), "{:?}", r.to_json());
}

#[test]
fn tensor_model_hypotheses() {
    let m = build_tensor_2d(3);
    let r = validate_rep(&m.rep);
    assert!(r.passed(), "{:?}", r.to_json());
    let r = check_c1d_action(&m.table, &m.rep).unwrap();
    assert!(r.passed(), "{:?}", r.to_json());
}

#[test]
fn corrupted_fixtures_fail() {
    for (rep, _) in [fixture_negative_norm(2), fixture_negative_energy(2), fixture_scaled_omega(2)] {
        let r = validate_rep(&rep);
        assert!(r.has_failure(), "{:?}", r.to_json());
        assert!(r.failures().any(|c| c.witness.is_some()));
    }
}

#[test]
fn d2_projection_matches_oracle() {
    let m = build_tensor_2d(3);
    let mud = reconstruct_d2(&m.table, &m.rep).unwrap();
    for a in m.basis_states() {
        for b in m.basis_states() {
            let s = assemble_series(&mud, &m.pure(a), &m.pure(b)).unwrap();
            let o = chiral_factorization_oracle(&m, a, b).unwrap();
            assert_eq!(s.first_difference(&o), None, "{a:?} {b:?}");
        }
    }
}

#[test]
fn general_solver_agrees_with_projection() {
    let m = build_tensor_2d(2);
    let fast = reconstruct_d2(&m.table, &m.rep).unwrap();
    let gen = reconstruct_general(&m.table, &m.rep, 2, None).unwrap();
    assert_eq!(recon_core::reconstruct::first_table_difference(&fast, &gen), None);
    assert!(gen.instances > 0);
}

#[test]
fn generator_pair_leading_pole() {
    let m = build_tensor_2d(2);
    let mud = reconstruct_d2(&m.table, &m.rep).unwrap();
    let a = m.alpha_plus();
    let s = assemble_series(&mud, &a, &a).unwrap();
    assert_eq!(s.min_pole(), Some(-2));
    let _ = HVec::zero(0, 1);
}

#[test]
fn d2_table_passes_all_suites() {
    use recon_core::reconstruct::checks::run_suites;
    let m = build_tensor_2d(3);
    let mud = reconstruct_d2(&m.table, &m.rep).unwrap();
    let r = run_suites(&mud, &m.table, &m.rep, &["parity", "restriction", "poles", "covariance"]);
    assert!(r.passed(), "{}", serde_json::to_string_pretty(&r.to_json()).unwrap());
}

#[test]
fn d_locality_at_bound_and_below() {
    use recon_core::reconstruct::checks::check_locality_d;
    use recon_core::reconstruct::pole_bound;
    let m = build_tensor_2d(3);
    let mud = reconstruct_d2(&m.table, &m.rep).unwrap();
    let a = m.alpha_plus();
    let vac = m.table.vacuum_vec();
    let n = pole_bound(&m.rep, &a, &a).unwrap();
    assert_eq!(n, 2);
    let ok = check_locality_d(&mud, &a, &a, n, std::slice::from_ref(&vac));
    assert_eq!(ok.status, recon_core::report::Status::Pass, "{ok:?}");
    let bad = check_locality_d(&mud, &a, &a, n - 1, std::slice::from_ref(&vac));
    assert_eq!(bad.status, recon_core::report::Status::Fail, "{bad:?}");
}

#[test]
fn corrupted_block_breaks_covariance() {
    use recon_core::reconstruct::checks::{check_covariance_d, check_restriction};
    let m = build_tensor_2d(3);
    let mut mud = reconstruct_d2(&m.table, &m.rep).unwrap();
    let key = *mud.blocks.keys().find(|k| k.0 == 2 && k.1 == 2 && k.3 == 2).unwrap();
    let b = mud.blocks.get_mut(&key).unwrap();
    *b = b.scale(&Scalar::from_int(-1));
    assert!(mud.check_parity().status == recon_core::report::Status::Pass);
    let r = check_covariance_d(&mud, &m.rep);
    println!("{}", serde_json::to_string_pretty(&r.to_json()).unwrap());
    assert!(r.has_failure());
    let _ = check_restriction(&mud, &m.table);
}

#[test]
fn gegenbauer_benchmark_d4() {
    use recon_core::reconstruct::synthetic::{check_gegenbauer, gegenbauer_spec};
    let t = std::time::Instant::now();
    let (rep, table) = gegenbauer_spec(4, 6).unwrap();
    let mud = reconstruct_general(&table, &rep, 4, Some(0)).unwrap();
    println!("solved in {:?}", t.elapsed());
    let c = check_gegenbauer(&mud, 6);
    assert_eq!(c.status, recon_core::report::Status::Pass, "{c:?}");
}

#[test]
fn isotypic_route_agrees() {
    use recon_core::reconstruct::isotypic::isotypic_crosscheck;
    use recon_core::reconstruct::synthetic::gegenbauer_spec;
    let (rep, table) = gegenbauer_spec(4, 4).unwrap();
    let mud = reconstruct_general(&table, &rep, 4, Some(0)).unwrap();
    let r = isotypic_crosscheck(&mud, &table, &rep, 0);
    println!("{}", serde_json::to_string(&r.to_json()).unwrap());
    assert!(r.passed());
    let m = build_tensor_2d(2);
    let mud = reconstruct_d2(&m.table, &m.rep).unwrap();
    let r = isotypic_crosscheck(&mud, &m.table, &m.rep, 2);
    println!("{}", serde_json::to_string(&r.to_json()).unwrap());
    assert!(r.passed());
}
