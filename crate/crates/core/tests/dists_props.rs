mod common;

use common::{component, family, log_uniform};
use proptest::prelude::*;
use stochorder::dists::{Baseline, BaselineFamily, ComponentSpec};

/// Families whose leading power `p` or `α` is at least 1.2, fast enough for
/// the `h` ratio to settle within 1e-6 by `x = 1e-8`.
fn steep_family() -> impl Strategy<Value = BaselineFamily> {
    family().prop_filter("leading power >= 1.2", |f| f.shapes().0 >= 1.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cdf_is_monotone_and_bounded(c in component(), x1 in log_uniform(1e-4, 50.0), x2 in log_uniform(1e-4, 50.0)) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let (a, b) = (c.cdf(lo).unwrap(), c.cdf(hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(a <= b && b <= 1.0);
    }

    #[test]
    fn cdf_and_survival_sum_to_one(c in component(), x in log_uniform(1e-4, 50.0)) {
        let s = c.survival(x).unwrap();
        prop_assume!(s > 1e-12);
        prop_assert!((c.cdf(x).unwrap() + s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pdf_matches_difference_quotient(c in component(), x in log_uniform(0.01, 20.0)) {
        let f = c.pdf(x).unwrap();
        prop_assume!(f * x > 1e-8);
        let h = x * 1e-5;
        // difference the smaller of F and 1 - F, which carries the full precision
        let fd = if c.cdf(x).unwrap() < 0.5 {
            (c.cdf(x + h).unwrap() - c.cdf(x - h).unwrap()) / (2.0 * h)
        } else {
            (c.survival(x - h).unwrap() - c.survival(x + h).unwrap()) / (2.0 * h)
        };
        prop_assert!((fd - f).abs() / f < 1e-6, "fd {fd} pdf {f}");
    }

    #[test]
    fn w_is_multiplicative(fam in family(), x in log_uniform(1e-3, 1e3), y in log_uniform(1e-3, 1e3)) {
        let wxy = fam.w(x * y);
        prop_assert!((wxy - fam.w(x) * fam.w(y)).abs() / wxy < 1e-12);
    }

    #[test]
    fn h_ratio_tends_to_one_near_zero(fam in steep_family(), li in log_uniform(0.1, 10.0), lj in log_uniform(0.1, 10.0)) {
        let x = 1e-8;
        let r = (fam.log_h(li * x) - fam.log_h(lj * x)).exp();
        prop_assert!((r - 1.0).abs() < 1e-6, "ratio {r}");
    }

    #[test]
    fn h_ratio_converges_at_the_leading_power(fam in family(), li in log_uniform(0.1, 10.0), lj in log_uniform(0.1, 10.0)) {
        // ln h(y) = ln h(0) - y^s + o(y^s), with s = p for PGW and s = α for GG
        let s = fam.shapes().0;
        for x in [1e-4, 1e-8, 1e-12] {
            let d = (fam.log_h(li * x) - fam.log_h(lj * x)).abs();
            prop_assert!(d <= 2.0 * (10.0 * x).powf(s) + 1e-15, "x {x}: |ln ratio| {d}");
        }
    }

    #[test]
    fn unit_shape_families_are_exponential(lambda in log_uniform(0.1, 10.0), x in log_uniform(1e-3, 20.0)) {
        let want = -(-lambda * x).exp_m1();
        for fam in [BaselineFamily::pgw(1.0, 1.0).unwrap(), BaselineFamily::gg(1.0, 1.0).unwrap()] {
            let c = ComponentSpec::scaled(fam, lambda).unwrap();
            prop_assert!((c.cdf(x).unwrap() - want).abs() < 1e-12);
            prop_assert!((c.hazard(x).unwrap() - lambda).abs() < 1e-12 * lambda);
        }
    }

    #[test]
    fn quantile_round_trip(c in component(), u in 1e-6..(1.0 - 1e-6)) {
        let x = c.quantile(u).unwrap();
        prop_assert!((c.cdf(x).unwrap() - u).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip(c in component()) {
        let back = ComponentSpec::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn density_is_w_times_h(fam in family(), y in log_uniform(1e-3, 20.0)) {
        let lhs = fam.log_pdf(y);
        let rhs = fam.w(y).ln() + fam.log_h(y);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn one_plus_w_exponent_is_positive(fam in family()) {
        prop_assert!(1.0 + fam.w_exponent() > 0.0);
    }
}
