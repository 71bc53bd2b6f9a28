use conic_walks::geometry::{is_face, project_onto_cone, ConeSample};
use conic_walks::{ExactRational, Formulas, Model, StirlingKind, StirlingTables};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = Model> {
    (1usize..=6, 0usize..40, any::<bool>()).prop_map(|(d, extra, bridge)| {
        if bridge {
            Model::bridge(d + 1 + extra, d).unwrap()
        } else {
            Model::walk(d + extra, d).unwrap()
        }
    })
}

fn cone(n: usize, d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * d).prop_map(move |v| DMatrix::from_row_slice(n, d, &v))
}

proptest! {
    #[test]
    fn rational_text_round_trip(num in any::<i64>(), den in 1i64..i64::MAX) {
        let r = ExactRational::new(num, den);
        let back: ExactRational = r.to_string().parse().unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn first_and_second_kind_recurrences(n in 1i64..45, k in 1i64..45) {
        let t = StirlingTables::new(46);
        let s1 = |n, k| t.stirling(StirlingKind::First, n, k).unwrap();
        let s2 = |n, k| t.stirling(StirlingKind::Second, n, k).unwrap();
        let m = num_bigint::BigUint::from(n as u64);
        prop_assert_eq!(s1(n + 1, k), &m * s1(n, k) + s1(n, k - 1));
        prop_assert_eq!(s2(n + 1, k), num_bigint::BigUint::from(k as u64) * s2(n, k) + s2(n, k - 1));
    }

    #[test]
    fn probabilities_and_intrinsic_volumes(m in model(), conditioned in any::<bool>()) {
        let f = Formulas::for_model(&m);
        let p = f.nonabsorption_probability(&m).unwrap();
        prop_assert!(p.in_unit_interval());
        let mut total = ExactRational::zero();
        for k in 0..=m.d {
            let v = f.expected_vk(&m, k, conditioned).unwrap();
            prop_assert!(v.in_unit_interval());
            total = total + v;
        }
        prop_assert_eq!(total, ExactRational::one());
    }

    #[test]
    fn face_test_ignores_positive_scaling(g in cone(5, 3), s in prop::collection::vec(0.05f64..20.0, 5)) {
        let a = ConeSample::new(g.clone()).unwrap();
        let mut scaled = g;
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= s[i];
        }
        let b = ConeSample::new(scaled).unwrap();
        for i in 0..5 {
            prop_assert_eq!(is_face(&a, &[i]).unwrap(), is_face(&b, &[i]).unwrap());
        }
    }

    #[test]
    fn projection_satisfies_moreau(g in cone(6, 3), x in prop::collection::vec(-3.0f64..3.0, 3)) {
        let c = ConeSample::new(g).unwrap();
        let x = DVector::from_vec(x);
        let p = project_onto_cone(&x, &c).unwrap();
        let r = &x - &p.point;
        prop_assert!(p.point.dot(&r).abs() < 1e-8);
        // The residual lies in the polar cone.
        for i in 0..c.len() {
            prop_assert!(c.generator(i).dot(&r) < 1e-8);
        }
    }
}
