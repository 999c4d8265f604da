use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use rlab::curve::{Curve, TypeTuple};
use rlab::engine::{extension_eval, lorentz_norm, lp_norm, Modulation, Segment, TestFunction};
use rlab::exponents::{beta, kappa};

fn seg(s: f64, e: f64, re: f64, im: f64) -> Segment {
    Segment { s, e, amp: Complex64::new(re, im), modulation: None, sign: 1.0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extension_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, split in 0.2..0.8f64, lambda in 1.0..200.0f64,
                           x in prop::array::uniform3(-1.0..1.0f64)) {
        let c = Curve::moment(3);
        let f = TestFunction::new(vec![seg(0.0, split, a, 0.0)]).unwrap();
        let g = TestFunction::new(vec![seg(split, 1.0, 0.0, b)]).unwrap();
        let lhs = extension_eval(&c, lambda, &f.plus(&g).unwrap(), &x).unwrap();
        let rhs = extension_eval(&c, lambda, &f, &x).unwrap() + extension_eval(&c, lambda, &g, &x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn modulation_translates(x0 in prop::array::uniform2(-1.0..1.0f64), x in prop::array::uniform2(-1.0..1.0f64),
                             lambda in 1.0..300.0f64) {
        let c = Curve::moment(2);
        let m = Segment { modulation: Some(Modulation { x0: x0.to_vec(), lambda }), ..Segment::indicator(0.0, 1.0) };
        let lhs = extension_eval(&c, lambda, &TestFunction::new(vec![m]).unwrap(), &x).unwrap();
        let shifted = [x[0] - x0[0], x[1] - x0[1]];
        let rhs = extension_eval(&c, lambda, &TestFunction::indicator(0.0, 1.0).unwrap(), &shifted).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9);
    }

    #[test]
    fn bounded_by_l1_norm(s in 0.0..0.5f64, len in 0.01..0.5f64, amp in 0.1..3.0f64, lambda in 1.0..500.0f64,
                          x in prop::array::uniform2(-2.0..2.0f64)) {
        let c = Curve::moment(2);
        let f = TestFunction::new(vec![seg(s, s + len, amp, 0.0)]).unwrap();
        let v = extension_eval(&c, lambda, &f, &x).unwrap();
        prop_assert!(v.norm() <= lp_norm(&f, 1.0).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn lorentz_diagonal_is_lebesgue(p in 1.0..8.0f64, a in 0.1..3.0f64, b in 0.1..3.0f64, l1 in 0.05..0.4f64, l2 in 0.05..0.4f64) {
        let f = TestFunction::new(vec![seg(0.0, l1, a, 0.0), seg(0.5, 0.5 + l2, 0.0, b)]).unwrap();
        let lz = lorentz_norm(&f, p, p).unwrap();
        let lp = lp_norm(&f, p).unwrap();
        prop_assert!((lz - lp).abs() <= 1e-12 * lp);
    }

    #[test]
    fn kappa_dominates_beta(d in 2usize..7, raw in prop::collection::btree_set(1u32..20, 6)) {
        let v: Vec<u32> = raw.into_iter().take(d).collect();
        prop_assume!(v.len() == d);
        let a = TypeTuple::new(v.clone()).unwrap();
        for num in 1..=(2 * d as i64) {
            let alpha = Rational64::new(num, 2);
            if alpha > Rational64::from_integer(d as i64) {
                break;
            }
            prop_assert!(kappa(&a, alpha).unwrap() >= beta(d, alpha).unwrap());
        }
    }
}
