use meanratio::constants::{best_constants, SAMPLE_SLACK};
use meanratio::means::{geometric_mean, power_mean};
use meanratio::reduction::two_value_config;
use meanratio::{classify, ratio_gap, ExponentPair64, Extended, ProfileParams64, RegimeTag, SimplexSampler};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = ExponentPair64> {
    prop_oneof![(-3.0f64..-0.1), (0.1f64..0.95), (1.05f64..4.0)].prop_map(|a| ExponentPair64::from_alpha(a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn samples_lie_inside_certified_bounds(n in 3usize..8, e in exponent(), seed in 0u64..1000) {
        let cert = best_constants(n, &e).unwrap();
        let sampler = SimplexSampler::new(n, seed).unwrap();
        for k in 0..200 {
            let xs = sampler.sample(k);
            if let Ok(q) = ratio_gap(&xs, &e) {
                prop_assert!(cert.admits(q, SAMPLE_SLACK), "n {n} alpha {} ratio {q} outside {:?}..{:?}", e.alpha(), cert.lower_bound, cert.upper_bound);
            }
        }
    }

    #[test]
    fn two_value_ratio_is_inside_bounds(n in 3usize..10, e in exponent(), t in 0.001f64..0.999) {
        let cert = best_constants(n, &e).unwrap();
        let pp = ProfileParams64::new(n, e).unwrap();
        let x = t * pp.x_max();
        prop_assume!(!pp.in_singular_band(x));
        let q = ratio_gap(&two_value_config(x, n).unwrap(), &e).unwrap();
        prop_assert!(cert.admits(q, SAMPLE_SLACK));
    }

    #[test]
    fn ratio_is_scale_invariant(xs in proptest::collection::vec(0.01f64..10.0, 3..7), e in exponent(), s in 0.1f64..50.0) {
        prop_assume!(xs.windows(2).any(|w| (w[0] - w[1]).abs() > 1e-3));
        let scaled: Vec<f64> = xs.iter().map(|x| x * s).collect();
        let (a, b) = (ratio_gap(&xs, &e).unwrap(), ratio_gap(&scaled, &e).unwrap());
        prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
    }

    #[test]
    fn power_mean_dominates_geometric(xs in proptest::collection::vec(0.01f64..10.0, 2..8), a in 0.05f64..5.0) {
        let g = geometric_mean(&xs).unwrap();
        prop_assert!(power_mean(&xs, a).unwrap() >= g * (1.0 - 1e-12));
        prop_assert!(power_mean(&xs, -a).unwrap() <= g * (1.0 + 1e-12));
    }

    #[test]
    fn classification_matches_the_bound_structure(n in 3usize..40, e in exponent()) {
        let regime = classify(n, &e).unwrap();
        let cert = best_constants(n, &e).unwrap();
        prop_assert_eq!(regime.tag == RegimeTag::NegR, cert.lower_bound == Extended::NegInfinity);
        prop_assert_eq!(regime.has_mu, cert.nu.is_some());
        if let (Extended::Finite(lo), Extended::Finite(hi)) = (cert.lower_bound, cert.upper_bound) {
            prop_assert!(lo < hi);
        }
    }
}
