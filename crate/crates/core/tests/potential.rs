use proptest::prelude::*;
use widom::measures::FiniteGapSet;
use widom::potential::{capacity, equilibrium};

fn two_bands() -> impl Strategy<Value = FiniteGapSet> {
    (-3.0f64..3.0, 0.05f64..2.0, 0.05f64..1.5, 0.05f64..2.0).prop_map(|(a, l1, g, l2)| {
        FiniteGapSet::new(&[(a, a + l1), (a + l1 + g, a + l1 + g + l2)]).unwrap()
    })
}

#[test]
fn symmetric_two_band_preimage_identity() {
    for k in [0.05, 0.3, 0.6, 0.95] {
        let c = capacity(&FiniteGapSet::new(&[(-1.0, -k), (k, 1.0)]).unwrap()).unwrap();
        let exact = (1.0f64 - k * k).sqrt() / 2.0;
        assert!((c / exact - 1.0).abs() < 1e-10, "k = {k}: {c} vs {exact}");
    }
}

#[test]
fn green_grows_like_log() {
    let eq = equilibrium(&FiniteGapSet::new(&[(-1.0, -0.2), (0.4, 1.0), (1.5, 2.0)]).unwrap()).unwrap();
    let x: f64 = 1e6;
    let expect = x.ln() - eq.log_capacity();
    assert!((eq.green(x).unwrap() - expect).abs() < 1e-5);
    assert!(eq.green(0.5).unwrap().abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn capacity_scales_under_affine_maps(k in two_bands(), s in prop_oneof![-3.0f64..-0.3, 0.3f64..3.0], t in -2.0f64..2.0) {
        let c = capacity(&k).unwrap();
        let image = capacity(&k.affine(s, t).unwrap()).unwrap();
        prop_assert!((image / (s.abs() * c) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_is_a_probability_measure(k in two_bands()) {
        let eq = equilibrium(&k).unwrap();
        prop_assert!((eq.measure().total_mass().unwrap() - 1.0).abs() < 1e-10);
        let (u, v) = k.gaps()[0];
        let c = eq.critical_points()[0];
        prop_assert!(c > u && c < v);
        prop_assert!(eq.green(c).unwrap() > 0.0);
    }

    #[test]
    fn capacity_is_monotone(k in two_bands()) {
        let (lo, hi) = k.hull();
        let hull_cap = (hi - lo) / 4.0;
        let c = capacity(&k).unwrap();
        prop_assert!(c < hull_cap);
        let band = k.bands()[0];
        prop_assert!(c > (band.1 - band.0) / 4.0);
    }
}
