use std::collections::HashMap;

use num_complex::Complex64;
use proptest::prelude::*;
use qaffine_core::field::{exact_linalg, leading_form_ratio, rat, Degeneration, Dense, MPoly, RatFun, Var};

fn poly_strategy(vars: &'static [Var]) -> impl Strategy<Value = MPoly> {
    poly_with_degree(vars, 3)
}

fn poly_with_degree(vars: &'static [Var], max_exp: u32) -> impl Strategy<Value = MPoly> {
    prop::collection::vec((prop::collection::vec(0u32..max_exp, vars.len()), -4i64..=4), 1..4).prop_map(move |terms| {
        let mut p = MPoly::zero();
        for (e, c) in terms {
            let powers: Vec<(Var, u32)> = vars.iter().copied().zip(e).collect();
            p = p.add(&MPoly::monomial(rat(c, 1), &powers));
        }
        p
    })
}

fn ratfun_strategy() -> impl Strategy<Value = RatFun> {
    const QZ: &[Var] = &[Var::Q, Var::Z];
    (poly_strategy(QZ), poly_strategy(QZ))
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| RatFun::new(n, d).unwrap())
}

fn small_ratfun() -> impl Strategy<Value = RatFun> {
    const QZ: &[Var] = &[Var::Q, Var::Z];
    (poly_with_degree(QZ, 2), poly_with_degree(QZ, 2), any::<bool>())
        .prop_filter("nonzero denominator", |(_, d, _)| !d.is_zero())
        .prop_map(|(n, d, poly)| if poly { RatFun::from_poly(n) } else { RatFun::new(n, d).unwrap() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_is_structural(f in ratfun_strategy(), g in ratfun_strategy()) {
        prop_assume!(!g.is_zero());
        let back = (&f * &g).div_ref(&g).unwrap();
        prop_assert_eq!(&back, &f);
        let reparsed: RatFun = f.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn field_axioms(a in ratfun_strategy(), b in ratfun_strategy(), c in ratfun_strategy()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a - &a), &RatFun::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), RatFun::one());
        }
    }

    #[test]
    fn numeric_eval_matches_parts(f in ratfun_strategy(), zr in -2.0f64..2.0, zi in -2.0f64..2.0, qr in 0.5f64..2.0) {
        let pt = HashMap::from([(Var::Z, Complex64::new(zr, zi)), (Var::Q, Complex64::new(qr, 0.3))]);
        let d = f.den().eval_complex(&pt).unwrap();
        prop_assume!(d.norm() > 1e-3);
        let direct = f.num().eval_complex(&pt).unwrap() / d;
        let v = f.eval_complex(&pt, 1e-12).unwrap();
        prop_assert!((v - direct).norm() <= 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn leading_form_stable_under_order(f in ratfun_strategy(), k in 3usize..6) {
        for subs in [Degeneration::Exponential, Degeneration::Linear] {
            let a = leading_form_ratio(&f, subs, k);
            let b = leading_form_ratio(&f, subs, k + 1);
            if let Ok(a) = a {
                prop_assert_eq!(a, b.unwrap());
            }
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_inverse_4x4(entries in prop::collection::vec(small_ratfun(), 16)) {
        let m = Dense::new(4, 4, entries).unwrap();
        prop_assume!(!exact_linalg::determinant(&m).unwrap().is_zero());
        let inv = exact_linalg::inverse(&m).unwrap();
        prop_assert_eq!(m.mul(&inv).unwrap(), Dense::identity(4));
    }
}
