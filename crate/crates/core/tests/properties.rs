use covdc::cpoly::{char_e, CPoly1, C64};
use covdc::oscint::{integrate, BumpSpec, QuadRule, QuadSpec};
use covdc::psbound::{h_value, ps_bound};
use covdc::tarry::{h_at_most, h_exact, taylor_map, Cubic};
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| C64::new(x, y))
}

fn poly(max_degree: usize) -> impl Strategy<Value = CPoly1> {
    prop::collection::vec(c64(), 3..=max_degree + 1).prop_filter_map("degree >= 2", |mut v| {
        let n = v.len();
        v[n - 1] += C64::new(0.5, 0.0);
        CPoly1::new(v).ok().filter(|p| p.degree() >= 2)
    })
}

fn quad() -> QuadSpec {
    QuadSpec { rule: QuadRule::TensorTrapezoid, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_term_modulates(p in poly(3), c in c64()) {
        let phi = BumpSpec::plateau(0.5, 1.0);
        let a = integrate(&p.clone().into(), &phi, &quad()).unwrap().value;
        let b = integrate(&p.add_const(c).into(), &phi, &quad()).unwrap().value;
        prop_assert!((b - char_e(c) * a).norm() < 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn translated_bump_matches_shifted_phase(p in poly(3), c in c64()) {
        let c = c * 0.5;
        let moved = BumpSpec { center: vec![c], ..BumpSpec::plateau(0.5, 1.0) };
        let a = integrate(&p.clone().into(), &moved, &quad()).unwrap().value;
        let b = integrate(&p.taylor_shift(c).into(), &BumpSpec::plateau(0.5, 1.0), &quad()).unwrap().value;
        prop_assert!((a - b).norm() < 1e-7 * (1.0 + a.norm()), "{a} {b}");
    }

    #[test]
    fn ps_bound_ignores_translation_and_constants(p in poly(5), c in c64()) {
        let base = ps_bound(&p).unwrap().overall;
        let moved = ps_bound(&p.taylor_shift(c).add_const(c)).unwrap().overall;
        prop_assert!((moved / base - 1.0).abs() < 1e-6, "{base} {moved}");
    }

    #[test]
    fn h_value_commutes_with_translation(p in poly(6), c in c64(), z in c64()) {
        let a = h_value(&p.taylor_shift(c), z);
        let b = h_value(&p, z + c);
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0));
    }

    #[test]
    fn taylor_map_is_unimodular(d in 1usize..6, z in c64()) {
        let e: Vec<u32> = (1..=d as u32).collect();
        prop_assert!((taylor_map(&e, z).determinant() - 1.0).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sublevel_test_is_monotone(a in prop::array::uniform3(c64()), s in 0.5..20.0f64, q in 0.1..10.0f64) {
        let p = Cubic([C64::new(0.0, 0.0), a[0] * s, a[1] * s * s, a[2] * s * s * s]);
        if h_at_most(&p, q) {
            prop_assert!(h_at_most(&p, 1.5 * q));
        }
        let h = h_exact(&p);
        prop_assert!(h_at_most(&p, h * (1.0 + 1e-9) + 1e-300));
        prop_assert!(h <= p.g(C64::new(0.0, 0.0)) * (1.0 + 1e-12));
    }
}
