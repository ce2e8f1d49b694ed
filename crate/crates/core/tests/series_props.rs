use std::sync::OnceLock;

use proptest::prelude::*;

use recon_core::chiral::n_range;
use recon_core::exactnum::Scalar;
use recon_core::gradedlinalg::HVec;
use recon_core::models::{build_tensor_2d, TensorModel2D};
use recon_core::reconstruct::series::restrict_to_line;
use recon_core::reconstruct::{assemble_series, reconstruct_d2, MuDTable};

fn fixture() -> &'static (TensorModel2D, MuDTable) {
    static F: OnceLock<(TensorModel2D, MuDTable)> = OnceLock::new();
    F.get_or_init(|| {
        let m = build_tensor_2d(3);
        let mud = reconstruct_d2(&m.table, &m.rep).unwrap();
        (m, mud)
    })
}

fn state(delta2: i64) -> impl Strategy<Value = HVec> {
    let n = fixture().0.space.dim(delta2);
    proptest::collection::vec((-3i64..=3, -2i64..=2), n)
        .prop_map(move |v| HVec { delta2, v: v.into_iter().map(|(a, b)| Scalar::complex(a, b)).collect() })
}

fn pair() -> impl Strategy<Value = (HVec, HVec)> {
    (0i64..=3, 0i64..=3)
        .prop_filter("in window", |(a, b)| a + b <= 3)
        .prop_flat_map(|(a, b)| (state(2 * a), state(2 * b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn restriction_reproduces_chiral_modes((a, b) in pair()) {
        let (m, mud) = fixture();
        let line = restrict_to_line(&assemble_series(mud, &a, &b).unwrap());
        for n in n_range(a.delta2, b.delta2, mud.cutoff2()) {
            let want = m.table.mu(&a, n, &b).unwrap();
            match line.get(&n) {
                Some(got) => prop_assert_eq!(&got.v, &want.v),
                None => prop_assert!(want.is_zero()),
            }
        }
    }

    #[test]
    fn assembly_is_bilinear((a, b) in pair(), c in (-2i64..=2, -2i64..=2)) {
        let (_, mud) = fixture();
        let c = Scalar::complex(c.0, c.1);
        let s = assemble_series(mud, &a.scale(&c), &b).unwrap();
        let t = assemble_series(mud, &a, &b.scale(&c)).unwrap();
        prop_assert_eq!(s.first_difference(&t), None);
    }
}
