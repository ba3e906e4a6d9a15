use std::f64::consts::PI;

use proptest::prelude::*;
use widom::extremal::Order;
use widom::measures::{jacobi_measure, sharpness_measure_eps, FiniteGapSet};
use widom::potential::equilibrium;
use widom::szego::{conjecture_constant, eq_bound_constant, eq_bound_order, szego_entropy, verify_bounds, BoundKind};

#[test]
fn conjecture_constant_values() {
    assert!((conjecture_constant(2.0).unwrap() - 2.0).abs() < 1e-13);
    assert!((conjecture_constant(1.0).unwrap() - 4.0 / PI).abs() < 1e-13);
    for p in [400.0f64, 1000.0] {
        let c = conjecture_constant(p).unwrap();
        let asymptotic = p * std::f64::consts::LN_2 + 0.5 * (2.0 / (PI * p)).ln();
        assert!((c.ln() - asymptotic).abs() < 1.0 / p);
    }
    assert!((conjecture_constant(1000.0).unwrap().powf(1e-3) - 2.0).abs() < 1e-2);
    assert!(conjecture_constant(0.5).is_err());
}

#[test]
fn eq_bound_constant_range() {
    for i in 1..=100 {
        let p = 1.0 + i as f64 / 100.0;
        let c = eq_bound_constant(p).unwrap();
        assert!(c > 1.0 && c <= 2f64.sqrt() + 1e-15, "p = {p}: {c}");
    }
    assert!((eq_bound_constant(4.0 / 3.0).unwrap() - 1.27789).abs() < 1e-5);
    assert_eq!(eq_bound_order(2.0), 1);
    assert_eq!(eq_bound_order(4.0 / 3.0), 2);
}

#[test]
fn eq_bound_constant_decreases_with_m() {
    let mut prev = f64::INFINITY;
    for m in 1..=12u32 {
        let p = 2.0 * m as f64 / (2.0 * m as f64 - 1.0);
        assert_eq!(eq_bound_order(p), m);
        let c = eq_bound_constant(p).unwrap();
        assert!(c <= prev);
        prev = c;
    }
}

#[test]
fn sharpness_entropy_is_normalization() {
    let eq = equilibrium(&FiniteGapSet::interval(-2.0, 2.0).unwrap()).unwrap();
    for eps in [1e-1, 1e-2, 1e-3] {
        let mu = sharpness_measure_eps(2, 1.5, eps).unwrap();
        let c = mu.ac().unwrap().scale();
        assert!((szego_entropy(&mu, &eq).unwrap() / c - 1.0).abs() < 1e-8);
    }
}

#[test]
fn jacobi_two_two_bound_up_to_two_hundred() {
    let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0).unwrap()).unwrap();
    let r = verify_bounds(&jacobi_measure(2.0, 2.0).unwrap(), &eq, Order::Finite(2.0), 200, BoundKind::Jacobi).unwrap();
    assert!((r.bound / (2.0 * r.entropy) - 1.0).abs() < 1e-14);
    assert!(r.pass, "{}", r.margin);
}

#[test]
fn ineligible_bounds_are_rejected() {
    let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0).unwrap()).unwrap();
    let mu = jacobi_measure(0.3, 0.3).unwrap();
    assert!(verify_bounds(&mu, &eq, Order::Finite(2.0), 3, BoundKind::Equilibrium).is_err());
    assert!(verify_bounds(&mu, &eq, Order::Finite(3.0), 3, BoundKind::Jacobi).is_err());
    assert!(verify_bounds(&mu, &eq, Order::Finite(2.0), 3, BoundKind::Isotorus).is_err());
    assert!(verify_bounds(&mu, &eq, Order::Sup, 3, BoundKind::Universal).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn universal_and_jacobi_bounds_hold(a in -0.95f64..5.0, b in -0.95f64..5.0) {
        let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0).unwrap()).unwrap();
        let mu = jacobi_measure(a, b).unwrap();
        for kind in [BoundKind::Universal, BoundKind::Jacobi] {
            let r = verify_bounds(&mu, &eq, Order::Finite(2.0), 30, kind).unwrap();
            prop_assert!(r.pass, "{kind:?}: {}", r.margin);
        }
    }

    #[test]
    fn universal_bound_for_other_orders(a in -0.9f64..3.0, b in -0.9f64..3.0, p in prop_oneof![Just(1.0), Just(4.0)]) {
        let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0).unwrap()).unwrap();
        let r = verify_bounds(&jacobi_measure(a, b).unwrap(), &eq, Order::Finite(p), 6, BoundKind::Universal).unwrap();
        prop_assert!(r.pass, "{}", r.margin);
    }
}
