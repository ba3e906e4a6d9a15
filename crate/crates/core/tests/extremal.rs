use proptest::prelude::*;
use widom::extremal::{lp_norm, minimal_monic_lp, minimal_monic_sup, widom_wp, MonicPolynomial, Order};
use widom::measures::{jacobi_measure, FiniteGapSet};
use widom::potential::equilibrium;
use widom::szego::conjecture_constant;

#[test]
fn chebyshev_polynomials_are_lp_extremal_on_an_interval() {
    let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0).unwrap()).unwrap();
    for p in [1.0, 1.5, 3.0, 4.0] {
        let c = conjecture_constant(p).unwrap();
        for n in 1..=8 {
            let w = widom_wp(eq.measure(), &eq, n, Order::Finite(p)).unwrap();
            assert!(w.certified);
            assert!((w.value.powf(p) / c - 1.0).abs() < 1e-8, "p = {p}, n = {n}: {} vs {c}", w.value.powf(p));
        }
    }
}

#[test]
fn sup_norm_equioscillates_on_interval() {
    let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0).unwrap()).unwrap();
    let n = 7;
    let r = minimal_monic_sup(&eq, n).unwrap();
    let xs: Vec<f64> = (0..=4000).map(|i| -1.0 + 2.0 * i as f64 / 4000.0).collect();
    let mut signs = vec![];
    for &x in &xs {
        let v = r.polynomial.eval(x);
        if v.abs() >= r.norm * (1.0 - 1e-6) {
            let s = v.signum();
            if signs.last() != Some(&s) {
                signs.push(s);
            }
        }
    }
    assert!(signs.len() > n, "{} alternations", signs.len());
}

#[test]
fn small_p_candidates_are_flagged() {
    let mu = jacobi_measure(0.5, 0.5).unwrap();
    let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0).unwrap()).unwrap();
    let w = widom_wp(&mu, &eq, 3, Order::Finite(0.5)).unwrap();
    assert!(!w.certified);
    let l1 = widom_wp(&mu, &eq, 3, Order::Finite(1.0)).unwrap();
    assert!(w.value <= l1.value * (1.0 + 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn minimizer_beats_perturbations(
        a in -0.8f64..3.0,
        b in -0.8f64..3.0,
        p in 1.0f64..4.0,
        n in 1usize..6,
        dir in prop::collection::vec(-1.0f64..1.0, 6),
        t in 1e-3f64..1e-1,
    ) {
        let mu = jacobi_measure(a, b).unwrap();
        let r = minimal_monic_lp(&mu, n, p).unwrap();
        let mut c = r.polynomial.to_monomial();
        for k in 0..n {
            c[k] += t * dir[k];
        }
        let other = lp_norm(&MonicPolynomial::from_monomial(&c[..n]), &mu, p).unwrap();
        prop_assert!(other >= r.norm * (1.0 - 1e-10), "{other} < {}", r.norm);
    }

    #[test]
    fn widom_factor_is_affine_invariant(s in prop_oneof![-2.0f64..-0.5, 0.5f64..2.0], t in -1.0f64..1.0, n in 1usize..6) {
        let mu = jacobi_measure(0.7, -0.3).unwrap();
        let k = FiniteGapSet::interval(-1.0, 1.0).unwrap();
        let eq = equilibrium(&k).unwrap();
        let eq2 = equilibrium(&k.affine(s, t).unwrap()).unwrap();
        let w = widom_wp(&mu, &eq, n, Order::Finite(3.0)).unwrap().value;
        let w2 = widom_wp(&mu.affine(s, t).unwrap(), &eq2, n, Order::Finite(3.0)).unwrap().value;
        prop_assert!((w2 / w - 1.0).abs() < 1e-8);
    }
}
