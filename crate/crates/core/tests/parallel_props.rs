mod common;

use common::{family, log_uniform, system, validated_family};
use proptest::prelude::*;
use stochorder::dists::{BaselineFamily, ComponentSpec};
use stochorder::parallel::ParallelSystem;

fn any_system() -> impl Strategy<Value = ParallelSystem> {
    family().prop_flat_map(|f| system(f, 20))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cdf_is_product_of_component_cdfs(s in any_system(), x in log_uniform(0.01, 10.0)) {
        let naive: f64 = s.components().iter().map(|c| c.cdf(x).unwrap()).product();
        prop_assume!(naive > 1e-250);
        let got = s.cdf(x).unwrap();
        prop_assert!((got - naive).abs() <= 1e-13 * naive, "got {got} naive {naive}");
    }

    #[test]
    fn hazard_is_minus_log_survival_slope(s in any_system(), x in log_uniform(0.01, 10.0)) {
        let ls = s.log_survival(x).unwrap();
        prop_assume!(ls > -30.0 && s.cdf(x).unwrap() > 1e-6);
        let h = x * 1e-5;
        let fd = -(s.log_survival(x + h).unwrap() - s.log_survival(x - h).unwrap()) / (2.0 * h);
        let r = s.hazard(x).unwrap();
        prop_assert!((fd - r).abs() <= 1e-5 * r, "fd {fd} hazard {r}");
    }

    #[test]
    fn json_round_trip(s in any_system()) {
        prop_assert_eq!(ParallelSystem::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn multiple_outlier_hazard_grows_with_the_smaller_scale(
        p in 0.5..2.5f64,
        q in 0.2..1.0f64,
        n in 2usize..8,
        k_frac in 0.0..1.0f64,
        lambda_star in log_uniform(0.5, 10.0),
        x in log_uniform(0.01, 10.0),
    ) {
        let fam = BaselineFamily::pgw(p, q).unwrap();
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let hazard_at = |lambda: f64| {
            let mut l = vec![lambda; k];
            l.extend(std::iter::repeat(lambda_star).take(n - k));
            ParallelSystem::scale_model(fam, &l).unwrap().hazard(x).unwrap()
        };
        let mut prev = hazard_at(lambda_star * 0.01);
        for j in 1..=20 {
            let cur = hazard_at(lambda_star * (0.01 + 0.99 * j as f64 / 20.0));
            if prev.is_finite() && cur.is_finite() {
                prop_assert!(cur >= prev * (1.0 - 1e-9), "hazard fell from {prev} to {cur}");
            }
            prev = cur;
        }
    }

    #[test]
    fn homogeneous_hazard_grows_with_scale(
        fam in validated_family(),
        a in 1.0..3.0f64,
        n in 1usize..6,
        x in log_uniform(0.01, 10.0),
    ) {
        let hazard_at = |lambda: f64| {
            let c = ComponentSpec::new(fam, lambda, a).unwrap();
            ParallelSystem::homogeneous(c, n).unwrap().hazard(x).unwrap()
        };
        let mut prev = hazard_at(0.1);
        for j in 1..=30 {
            let cur = hazard_at(0.1 * 100f64.powf(j as f64 / 30.0));
            if prev.is_finite() && cur.is_finite() {
                prop_assert!(cur >= prev * (1.0 - 1e-9), "hazard fell from {prev} to {cur}");
            }
            prev = cur;
        }
    }
}
