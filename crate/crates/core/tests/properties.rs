use proptest::prelude::*;

use otcert::ball::{Complex, Real};
use otcert::embedder::{include, verify_subfield};
use otcert::exact::IntPolynomial;
use otcert::field::{build_field, NumberField};
use otcert::form::{eval_form, omega_at, pullback};
use otcert::inoue::{char_poly, inoue_from_matrix, InoueError};
use otcert::ot::{GroupElement, OtData, Point};
use otcert::precision::PrecisionPolicy;
use otcert::units::UnitSystem;

fn plastic() -> NumberField {
    build_field(IntPolynomial::from_ints(&[-1, -1, 0, 1]), PrecisionPolicy::default()).unwrap()
}

fn coord() -> impl Strategy<Value = (f64, f64)> {
    (-3.0..3.0f64, 0.1..3.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn form_is_semipositive(z in coord(), w in (-3.0..3.0f64, -3.0..3.0f64), v in prop::collection::vec(-5.0..5.0f64, 4)) {
        let k = plastic();
        let p = Point::from_f64(&k, &[z, w]).unwrap();
        let v: Vec<Complex> = v.chunks(2).map(|c| Complex::new(Real::from_f64(c[0], 128), Real::from_f64(c[1], 128))).collect();
        let val = eval_form(&k, &p, &v).unwrap();
        prop_assert!(val.mid_f64() + val.rad() >= 0.0);
        let expected = (v[0].norm_sqr().mid_f64()) / (2.0 * z.1 * z.1);
        prop_assert!((val.mid_f64() - expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn pullback_invariance(z in coord(), w in (-3.0..3.0f64, -3.0..3.0f64), e in -3i64..=3, a in prop::collection::vec(-4i64..=4, 3)) {
        let k = plastic();
        let ot = OtData::new(UnitSystem::new(&k, vec![k.generator()]).unwrap()).unwrap();
        let g = GroupElement::new(k.generator().pow(e).unwrap(), k.from_ints(&a));
        let p = Point::from_f64(ot.field(), &[z, w]).unwrap();
        let lhs = pullback(&k, &g, &p).unwrap();
        prop_assert!(lhs.max_deviation(&omega_at(&k, &p).unwrap()) < 2f64.powi(-64));
    }

    // Companion matrices of t^3 + a t^2 + b t - 1 all have determinant 1.
    #[test]
    fn unimodular_companions(a in -6i64..=6, b in -6i64..=6) {
        let m = [[0, 0, 1], [1, 0, -b], [0, 1, -a]];
        prop_assert_eq!(char_poly(&m), IntPolynomial::from_ints(&[-1, b, a, 1]));
        let policy = PrecisionPolicy::default();
        match inoue_from_matrix(&m, policy) {
            Ok(d) => {
                prop_assert!(d.unimodularity_residual_f64 < 10.0 * policy.tolerance());
                prop_assert!(d.c.is_positive());
                prop_assert!(d.alpha.im.is_positive());
            }
            Err(InoueError::CEqualsOne) => prop_assert_eq!(a + b, 0),
            Err(InoueError::AllRealSpectrum) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn inclusion_is_a_ring_homomorphism(x in prop::collection::vec(-9i64..=9, 3), y in prop::collection::vec(-9i64..=9, 3)) {
        let k = build_field(IntPolynomial::from_ints(&[-2, 0, 0, 0, 0, 0, 1]), PrecisionPolicy::default()).unwrap();
        let w = verify_subfield(&k, &k.from_ints(&[0, 0, 1])).unwrap();
        let (x, y) = (w.k1.from_ints(&x), w.k1.from_ints(&y));
        prop_assert_eq!(include(&w, &(&x * &y)), &include(&w, &x) * &include(&w, &y));
        prop_assert_eq!(include(&w, &(&x - &y)), &include(&w, &x) - &include(&w, &y));
        prop_assert_eq!(k.norm(&include(&w, &x)).unwrap(), w.k1.norm(&x).unwrap().pow(2));
    }
}
