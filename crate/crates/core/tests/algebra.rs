use coxpoly::algebra::{AlgebraicNumber, Interval};
use coxpoly::gram::{fit_closed_form, SurdField};
use proptest::prelude::*;

fn number(a: i64, b: i64, c: i64) -> AlgebraicNumber {
    AlgebraicNumber::from_int(a)
        + AlgebraicNumber::sqrt_of(5).unwrap() * AlgebraicNumber::from_ratio(b, 3)
        + AlgebraicNumber::sqrt_of(2).unwrap() * AlgebraicNumber::from_ratio(c, 7)
}

proptest! {
    #[test]
    fn field_ops_track_floats(a in -20i64..20, b in -20i64..20, c in -20i64..20,
                              x in -20i64..20, y in -20i64..20, z in -20i64..20) {
        let p = number(a, b, c);
        let q = number(x, y, z);
        let tol = 1e-9 * (1.0 + p.to_f64().abs() * q.to_f64().abs());
        prop_assert!(((&p * &q).to_f64() - p.to_f64() * q.to_f64()).abs() < tol);
        prop_assert!(((&p + &q).to_f64() - (p.to_f64() + q.to_f64())).abs() < 1e-9);
        if !q.to_f64().abs().lt(&1e-6) {
            let r = &p / &q;
            prop_assert_eq!(&r * &q, p.clone());
        }
        prop_assert_eq!(p.signum(), p.to_f64().partial_cmp(&0.0).unwrap());
    }

    #[test]
    fn interval_products_enclose(a in -10.0f64..10.0, b in 0.0f64..2.0,
                                 c in -10.0f64..10.0, d in 0.0f64..2.0, t in 0.0f64..1.0) {
        let x = Interval::new(a, a + b);
        let y = Interval::new(c, c + d);
        let px = a + t * b;
        let py = c + (1.0 - t) * d;
        prop_assert!((x * y).contains(px * py));
        prop_assert!((x + y).contains(px + py));
        prop_assert!((x - y).contains(px - py));
    }

    #[test]
    fn closed_forms_round_trip(a in 1i64..12, b in 0i64..6) {
        let v = AlgebraicNumber::from_ratio(a, 4) + AlgebraicNumber::sqrt_of(5).unwrap() * AlgebraicNumber::from_ratio(b, 4);
        let f = fit_closed_form(v.to_f64()).expect("fit");
        prop_assert!((f.to_f64() - v.to_f64()).abs() < 1e-9);
        let root = fit_closed_form(v.to_f64().sqrt()).expect("fit root");
        prop_assert!((root.to_f64() - v.to_f64().sqrt()).abs() < 1e-9);
    }
}

#[test]
fn nested_radicals_evaluate() {
    let mut field = SurdField::new();
    let five = AlgebraicNumber::sqrt_of(5).unwrap();
    let base = AlgebraicNumber::from_int(5) + AlgebraicNumber::from_int(2) * five;
    let s = field.sqrt(&base).unwrap();
    assert!((field.to_f64(&s) - (5.0 + 2.0 * 5f64.sqrt()).sqrt()).abs() < 1e-12);
    let sq = field.mul(&s, &s);
    assert!(sq.closed_form(&field).is_some());
}
