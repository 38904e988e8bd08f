//! Small log-domain helpers shared by the probability code.

use std::f64::consts::LN_2;

/// `ln(1 - exp(-v))` for `v >= 0`.
///
/// Switches between `expm1` and `ln_1p` at `v = ln 2` so that both tails keep
/// full relative precision.
#[inline]
pub fn log1mexp(v: f64) -> f64 {
    debug_assert!(v >= 0.0 || v.is_nan());
    if v <= LN_2 {
        (-(-v).exp_m1()).ln()
    } else {
        (-(-v).exp()).ln_1p()
    }
}

/// `ln(1 - exp(-v))` where only `ln v` is known.
///
/// Used when `v` itself may underflow, e.g. the negated log-CDF of a system
/// far in its upper tail.
#[inline]
pub fn log1mexp_from_log(ln_v: f64) -> f64 {
    if ln_v < -30.0 {
        // ln(1 - e^{-v}) = ln v - v/2 + O(v^2)
        ln_v - 0.5 * ln_v.exp()
    } else {
        log1mexp(ln_v.exp())
    }
}

/// `ln(-ln(1 - s))` given `ln s` and `ln(1 - s)`; the caller supplies both so
/// no cancellation happens in either tail.
#[inline]
pub fn log_neg_log1m(ln_s: f64, ln_one_minus_s: f64) -> f64 {
    if ln_s < -30.0 {
        // -ln(1 - s) = s + s^2/2 + ...
        ln_s + 0.5 * ln_s.exp()
    } else {
        (-ln_one_minus_s).ln()
    }
}

/// Numerically stable `ln(sum(exp(terms)))`.
pub fn logsumexp<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Central finite-difference step used throughout: `max(1e-6, 1e-5 * x)`.
#[inline]
pub fn fd_step(x: f64) -> f64 {
    (1e-5 * x.abs()).max(1e-6)
}

/// Central difference of `f` at `x` with step `h`.
#[inline]
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
#[inline]
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1mexp_both_branches() {
        for &v in &[1e-300, 1e-20, 1e-8, 0.3, LN_2, 1.0, 5.0, 40.0, 700.0] {
            let direct = (1.0 - (-v).exp()).ln();
            let got = log1mexp(v);
            if v > 1e-6 && v < 30.0 {
                assert!(relative_difference(got, direct) < 1e-12, "v={v}");
            }
            assert!(got.is_finite() && got <= 0.0);
        }
        // tiny v: ln(1 - e^{-v}) ~ ln v
        assert!((log1mexp(1e-20) - (1e-20f64).ln()).abs() < 1e-12);
        // large v: ~ -e^{-v}
        assert!((log1mexp(40.0) + (-40.0f64).exp()).abs() < 1e-30);
    }

    #[test]
    fn log1mexp_from_log_matches_in_overlap() {
        for &ln_v in &[-40.0, -30.0, -29.9, -10.0, 0.0, 3.0] {
            let v = f64::exp(ln_v);
            assert!(relative_difference(log1mexp_from_log(ln_v), log1mexp(v)) < 1e-13);
        }
        // beyond the double range of v itself
        assert_eq!(log1mexp_from_log(-800.0), -800.0);
    }

    #[test]
    fn logsumexp_handles_extremes() {
        assert!((logsumexp([0.0, 0.0]) - LN_2).abs() < 1e-15);
        assert!((logsumexp([-1000.0, -1000.0]) - (-1000.0 + LN_2)).abs() < 1e-12);
        assert_eq!(
            logsumexp([f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
        assert!((logsumexp([-1e4, 0.0])).abs() < 1e-15);
    }

    #[test]
    fn neg_log1m_tails() {
        let s: f64 = 1e-40;
        assert!(relative_difference(log_neg_log1m(s.ln(), (-s).ln_1p()), s.ln()) < 1e-15);
        let s: f64 = 0.3;
        let want = (-(1.0 - s).ln()).ln();
        assert!(relative_difference(log_neg_log1m(s.ln(), (-s).ln_1p()), want) < 1e-14);
    }
}
