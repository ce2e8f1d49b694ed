use proptest::prelude::*;

use recon_core::conflie::{bracket, star, CLieElement, Gen};
use recon_core::exactnum::{rat, Scalar};
use recon_core::gradedlinalg::{inverse, nullspace, rank, solve_exact, Matrix, Solution};
use recon_core::polyharm::{gegenbauer_h, harmonic_decompose, monomials, reassemble, PolyD};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| Scalar::new(rat(a, b), rat(c, d)))
}

fn small_int() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, -2i64..=2).prop_map(|(a, b)| Scalar::complex(a, b))
}

fn matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(small_int(), c), r).prop_map(Matrix::from_rows)
    })
}

fn element(dim: usize) -> impl Strategy<Value = CLieElement> {
    let gens = Gen::all(dim);
    proptest::collection::vec(small_int(), gens.len()).prop_map(move |cs| {
        let mut e = CLieElement::zero();
        for (g, c) in gens.iter().zip(&cs) {
            e.add_term(*g, c);
        }
        e
    })
}

fn homogeneous(dim: usize, m: u32) -> impl Strategy<Value = PolyD> {
    let monos = monomials(dim, m);
    proptest::collection::vec(small_int(), monos.len()).prop_map(move |cs| PolyD::from_coords(dim, &monos, &cs))
}

proptest! {
    #[test]
    fn scalar_field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        }
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
    }

    #[test]
    fn scalar_text_round_trip(a in scalar()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Scalar>().unwrap(), a.clone());
        let j = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Scalar>(&j).unwrap(), a);
    }

    #[test]
    fn nullspace_is_annihilated_and_complements_rank(a in matrix(5)) {
        let ns = nullspace(&a);
        prop_assert_eq!(ns.len() + rank(&a), a.cols);
        for v in &ns {
            prop_assert!(a.apply(v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn consistent_systems_are_solved(a in matrix(5), x in proptest::collection::vec(small_int(), 5)) {
        let x0 = &x[..a.cols];
        let b = a.apply(x0);
        match solve_exact(&a, &b) {
            Solution::Unique(y) => {
                prop_assert_eq!(rank(&a), a.cols);
                prop_assert_eq!(y.as_slice(), x0);
            }
            Solution::Underdetermined { particular, nullspace } => {
                prop_assert!(rank(&a) < a.cols);
                prop_assert_eq!(a.apply(&particular), b);
                prop_assert_eq!(nullspace.len(), a.cols - rank(&a));
            }
            Solution::Inconsistent => prop_assert!(false, "consistent system reported inconsistent"),
        }
    }

    #[test]
    fn inverse_when_full_rank(a in matrix(4)) {
        if a.rows == a.cols {
            match inverse(&a) {
                Some(inv) => prop_assert_eq!(a.mul(&inv), Matrix::identity(a.rows)),
                None => prop_assert!(rank(&a) < a.rows),
            }
        }
    }

    #[test]
    fn kron_mixed_product(a in matrix(3), b in matrix(3), c in matrix(3), d in matrix(3)) {
        if a.cols == c.rows && b.cols == d.rows {
            let lhs = Matrix::kron(&a, &b).mul(&Matrix::kron(&c, &d));
            prop_assert_eq!(lhs, Matrix::kron(&a.mul(&c), &b.mul(&d)));
        }
    }

    #[test]
    fn bracket_is_a_lie_bracket(x in element(3), y in element(3), z in element(3)) {
        prop_assert_eq!(bracket(&x, &y), bracket(&y, &x).scale(&Scalar::from_int(-1)));
        let jac = bracket(&x, &bracket(&y, &z)).add(&bracket(&y, &bracket(&z, &x))).add(&bracket(&z, &bracket(&x, &y)));
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn star_is_an_antilinear_anti_involution(x in element(4), y in element(4), c in small_int()) {
        prop_assert_eq!(star(&star(&x)), x.clone());
        prop_assert_eq!(star(&bracket(&x, &y)), bracket(&star(&y), &star(&x)));
        prop_assert_eq!(star(&x.scale(&c)), star(&x).scale(&c.conj()));
    }

    #[test]
    fn harmonic_decomposition_reassembles(
        (dim, p) in (2usize..=4, 0u32..=4).prop_flat_map(|(d, m)| homogeneous(d, m).prop_map(move |p| (d, p)))
    ) {
        let parts = harmonic_decompose(&p).unwrap();
        for (_, f) in &parts {
            prop_assert!(f.laplacian().is_zero());
        }
        prop_assert_eq!(reassemble(&parts, dim), p);
    }

    #[test]
    fn laplacian_commutes_with_rotations(p in homogeneous(3, 3), a in 0usize..3, b in 0usize..3) {
        if a != b {
            prop_assert_eq!(p.rotate(a, b).laplacian(), p.laplacian().rotate(a, b));
        }
    }
}

/// Homogenized three-term recurrence for C_m^{(λ)}, normalized at e₁.
fn gegenbauer_by_recurrence(dim: usize, m: u32) -> PolyD {
    let lambda = Scalar::from_frac(dim as i64 - 2, 2);
    let z1 = PolyD::var(dim, 0);
    let zsq = PolyD::z_sq(dim);
    let mut prev = PolyD::one(dim);
    let mut cur = z1.scale(&lambda.scale_int(2));
    if m == 0 {
        return prev;
    }
    for k in 2..=m {
        let kk = Scalar::from_int(k as i64);
        let a = (&(&kk + &lambda) - &Scalar::one()).scale_int(2);
        let b = &(&kk + &lambda.scale_int(2)) - &Scalar::from_int(2);
        let next = z1.mul(&cur).scale(&a).sub(&zsq.mul(&prev).scale(&b)).scale(&kk.inv().unwrap());
        prev = cur;
        cur = next;
    }
    cur.scale(&cur.at_e1().inv().unwrap())
}

#[test]
fn gegenbauer_matches_recurrence() {
    for dim in [4, 6, 8] {
        for m in 0..=7 {
            assert_eq!(gegenbauer_h(dim, m).unwrap(), gegenbauer_by_recurrence(dim, m), "D={dim}, m={m}");
        }
    }
}

#[test]
fn gegenbauer_frozen_values() {
    // D = 4: Chebyshev U_m(t)/U_m(1)
    let h2 = gegenbauer_h(4, 2).unwrap();
    assert_eq!(h2.coeff(&[2, 0, 0, 0]), Scalar::one());
    for a in 1..4 {
        let mut e = vec![0; 4];
        e[a] = 2;
        assert_eq!(h2.coeff(&e), Scalar::from_frac(-1, 3));
    }
    let h3 = gegenbauer_h(4, 3).unwrap();
    assert_eq!(h3.coeff(&[3, 0, 0, 0]), Scalar::one());
    assert_eq!(h3.coeff(&[1, 2, 0, 0]), Scalar::from_int(-1));
    assert_eq!(h3.coeff(&[1, 0, 1, 1]), Scalar::zero());
    // D = 6, m = 2: C_2^{(2)}(t) = 12t² − 2, normalized by 10
    let h = gegenbauer_h(6, 2).unwrap();
    assert_eq!(h.coeff(&[2, 0, 0, 0, 0, 0]), Scalar::one());
    assert_eq!(h.coeff(&[0, 0, 0, 0, 0, 2]), Scalar::from_frac(-1, 5));
}
