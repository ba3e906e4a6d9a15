use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use widom::extremal::{lp_norm, minimal_monic_lp, MonicPolynomial};
use widom::isotorus::{random_finite_gap_set, reflectionless_measure, torus_measure, verify_isolb, TorusPoint};
use widom::potential::equilibrium;
use widom::szego::{eigenvalue_function, szego_entropy};

#[test]
fn reflectionless_measures_have_unit_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..5 {
        let eq = equilibrium(&random_finite_gap_set(&mut rng, 1 + i % 2)).unwrap();
        for _ in 0..10 {
            let gammas: Vec<f64> = eq.set().gaps().iter().map(|&(u, v)| rng.gen_range(u..=v)).collect();
            let mu = reflectionless_measure(&eq, &gammas).unwrap();
            assert!((mu.total_mass().unwrap() - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn reflectionless_entropy_and_lb2() {
    let eq = equilibrium(&widom::measures::FiniteGapSet::new(&[(-1.0, -0.1), (0.3, 1.0)]).unwrap()).unwrap();
    let mu = reflectionless_measure(&eq, &[0.2]).unwrap();
    let s = szego_entropy(&mu, &eq).unwrap();
    assert!(s > 0.0 && s < 1.0);
    assert!((eigenvalue_function(&mu, &eq).unwrap() - 1.0).abs() < 1e-15);
}

fn golden(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..90 {
        let (x, y) = (b - r * (b - a), a + r * (b - a));
        if f(x) <= f(y) {
            b = y;
        } else {
            a = x;
        }
    }
    f(0.5 * (a + b))
}

#[test]
fn l1_minimizer_with_gap_atom_matches_direct_search() {
    let eq = equilibrium(&widom::measures::FiniteGapSet::new(&[(-1.0, 0.36), (0.9, 1.0)]).unwrap()).unwrap();
    let tp = TorusPoint::new(&eq, &[0.53], &[true]).unwrap();
    let mu = torus_measure(&tp).unwrap();
    let norm = |lower: &[f64]| lp_norm(&MonicPolynomial::from_monomial(lower), &mu, 1.0).unwrap();
    let linear = golden(-1.0, 1.0, |c| norm(&[c]));
    assert!((minimal_monic_lp(&mu, 1, 1.0).unwrap().norm - linear).abs() < 1e-9 * linear);
    let quadratic = golden(-1.0, 1.0, |b| golden(-1.0, 1.0, |c| norm(&[c, b])));
    assert!((minimal_monic_lp(&mu, 2, 1.0).unwrap().norm - quadratic).abs() < 1e-8 * quadratic);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn torus_points_satisfy_the_bound(seed in 0u64..1000, t in 0.0f64..=1.0, flag in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eq = equilibrium(&random_finite_gap_set(&mut rng, 1)).unwrap();
        let (u, v) = eq.set().gaps()[0];
        let g = u + t * (v - u);
        let flag = flag && g > u && g < v;
        let tp = TorusPoint::new(&eq, &[g], &[flag]).unwrap();
        let mu = torus_measure(&tp).unwrap();
        prop_assert!((mu.total_mass().unwrap() - 1.0).abs() < 1e-8);
        prop_assert!((eigenvalue_function(&mu, &eq).unwrap() / tp.expected_eigenvalue(&eq).unwrap() - 1.0).abs() < 1e-12);
        let r = verify_isolb(&tp, &eq, 10).unwrap();
        prop_assert!(r.margin >= -1e-6, "{}", r.margin);
        prop_assert!(r.rows.iter().all(|row| row.sum_rule_gap.unwrap() < 1e-6));
    }
}
