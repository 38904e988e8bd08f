//! Adaptive Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a 10-point and a 20-point rule; panels whose
//! two estimates disagree are bisected. Integrands with an integrable power
//! singularity `u^e` (`-1 < e < 0`) at the left endpoint are handled by the
//! substitution `v = u^(1+e)`, which turns them into smooth integrands.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const MAX_PANELS: usize = 20_000;
const MIN_WIDTH_FRACTION: f64 = 1e-14;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root, refined by Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

struct Rules {
    low: (Vec<f64>, Vec<f64>),
    high: (Vec<f64>, Vec<f64>),
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        low: gauss_legendre_rule(10),
        high: gauss_legendre_rule(20),
    })
}

fn apply(rule: &(Vec<f64>, Vec<f64>), f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(t, w)| w * f(mid + half * t))
        .sum::<f64>()
        * half
}

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain {
            what: "integration limits must be finite",
            value: if a.is_finite() { b } else { a },
        });
    }
    if a == b {
        return Ok(0.0);
    }
    let rules = rules();
    let length = (b - a).abs();
    let coarse = apply(&rules.high, &f, a, b);
    let mut scale = coarse.abs();
    let mut stack = vec![(a, b)];
    let mut total = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::NoConvergence {
                routine: "adaptive Gauss-Legendre",
                iterations: MAX_PANELS,
            });
        }
        let fine = apply(&rules.high, &f, lo, hi);
        let rough = apply(&rules.low, &f, lo, hi);
        if !fine.is_finite() {
            return Err(Error::Domain {
                what: "integrand is not finite",
                value: fine,
            });
        }
        scale = scale.max(fine.abs());
        let width = (hi - lo).abs();
        let budget = rel_tol * scale.max(f64::MIN_POSITIVE) * (width / length);
        if (fine - rough).abs() <= budget || width <= MIN_WIDTH_FRACTION * length {
            total += fine;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Ok(total)
}

/// `∫₀¹ u^e g(u) du` for `e > -1`, with `g` smooth on `[0, 1]`.
pub fn integrate_power_weighted<G: Fn(f64) -> f64>(e: f64, g: G, rel_tol: f64) -> Result<f64> {
    if !(e > -1.0) {
        return Err(Error::Domain {
            what: "power weight exponent must exceed -1",
            value: e,
        });
    }
    if e < 0.0 {
        let k = 1.0 + e;
        let value = integrate(|v| g(v.powf(1.0 / k)), 0.0, 1.0, rel_tol)?;
        Ok(value / k)
    } else if e == 0.0 {
        integrate(g, 0.0, 1.0, rel_tol)
    } else {
        integrate(|u| u.powf(e) * g(u), 0.0, 1.0, rel_tol)
    }
}
