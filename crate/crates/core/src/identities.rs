//! Numerical checks of the structural identities and inequalities behind the
//! order theorems.
//!
//! Three assumptions on a baseline drive every equivalence result:
//!
//! * (a) `x r̃(x)` is nonincreasing,
//! * (b) `x (r̃(x) - h'(x)/h(x))` is nondecreasing,
//! * (c) `F̄(x) ≤ -w(x) h(x)² / h'(x)`.
//!
//! They are audited on a dense log grid; [`ValidatedFamily`] is the proof
//! that a family passed, and the inequalities that depend on the assumptions
//! only accept that type.

use rayon::prelude::*;
use serde::Serialize;

use crate::dists::{Baseline, BaselineFamily};
use crate::error::{Error, Result};
use crate::numeric::{
    central_difference, fd_step, log1mexp_from_log, logsumexp, relative_difference,
};
use crate::parallel::{log_psi, EvalGrid};
use crate::preorders::{weighted_geometric_mean, ParamVector};
use crate::quadrature::integrate_power_weighted;
use crate::rng;

/// Relative slack on the monotonicity scans and on (c).
pub const ASSUMPTION_SLACK: f64 = 1e-9;

/// The three baseline assumptions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Assumption {
    A,
    B,
    C,
}

/// Where an assumption first failed on the audit grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub which: Assumption,
    pub x: f64,
    /// Size of the violation, relative to the local scale.
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub assumption_a: bool,
    pub assumption_b: bool,
    pub assumption_c: bool,
    pub first_violation: Option<Violation>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.assumption_a && self.assumption_b && self.assumption_c
    }
}

/// Audit grid: 4000 log-spaced points on `[1e-4, 50]`.
pub fn audit_grid() -> EvalGrid {
    EvalGrid::log_spaced(1e-4, 50.0, 4000).expect("audit grid is valid")
}

// First index where a sequence moves against its required direction.
fn scan_monotone(xs: &[f64], vals: &[f64], increasing: bool) -> Option<(f64, f64)> {
    for k in 1..vals.len() {
        let (a, b) = (vals[k - 1], vals[k]);
        if !(a.is_finite() && b.is_finite()) {
            return Some((xs[k], f64::INFINITY));
        }
        let step = if increasing { a - b } else { b - a };
        let scale = a.abs().max(b.abs());
        if step > ASSUMPTION_SLACK * scale {
            return Some((xs[k], step / scale));
        }
    }
    None
}

fn outcome(which: Assumption, found: Option<(f64, f64)>) -> (bool, Option<Violation>) {
    match found {
        None => (true, None),
        Some((x, magnitude)) => (
            false,
            Some(Violation {
                which,
                x,
                magnitude,
            }),
        ),
    }
}

/// (a): `x r̃(x)` nonincreasing on the grid.
pub fn check_assumption_a<B: Baseline + ?Sized>(
    fam: &B,
    grid: &EvalGrid,
) -> (bool, Option<Violation>) {
    let xs = grid.points();
    let vals: Vec<f64> = xs.iter().map(|&x| x * fam.reversed_hazard(x)).collect();
    outcome(Assumption::A, scan_monotone(xs, &vals, false))
}

/// (b): `x r̃(x) - x h'(x)/h(x)` nondecreasing on the grid.
pub fn check_assumption_b<B: Baseline + ?Sized>(
    fam: &B,
    grid: &EvalGrid,
) -> (bool, Option<Violation>) {
    let xs = grid.points();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| x * fam.reversed_hazard(x) - x * fam.h_log_derivative(x))
        .collect();
    outcome(Assumption::B, scan_monotone(xs, &vals, true))
}

/// (c): `h' < 0` and `F̄ ≤ -w h²/h'`, compared as `ln r ≥ ln(-h'/h)` with
/// `r` the hazard.
pub fn check_assumption_c<B: Baseline + ?Sized>(
    fam: &B,
    grid: &EvalGrid,
) -> (bool, Option<Violation>) {
    for &x in grid.points() {
        let dlog_h = fam.h_log_derivative(x);
        if !(dlog_h < 0.0) {
            return outcome(Assumption::C, Some((x, f64::INFINITY)));
        }
        let gap = (-dlog_h).ln() - fam.log_hazard(x);
        if gap > ASSUMPTION_SLACK.ln_1p() {
            return outcome(Assumption::C, Some((x, gap.exp_m1())));
        }
    }
    (true, None)
}

/// Runs all three audits on `grid`.
pub fn audit_on<B: Baseline + ?Sized>(fam: &B, grid: &EvalGrid) -> AssumptionReport {
    let (a, va) = check_assumption_a(fam, grid);
    let (b, vb) = check_assumption_b(fam, grid);
    let (c, vc) = check_assumption_c(fam, grid);
    AssumptionReport {
        assumption_a: a,
        assumption_b: b,
        assumption_c: c,
        first_violation: va.or(vb).or(vc),
    }
}

/// Runs all three audits on [`audit_grid`].
pub fn audit<B: Baseline + ?Sized>(fam: &B) -> AssumptionReport {
    audit_on(fam, &audit_grid())
}

/// A baseline family that passed all three assumption audits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidatedFamily(BaselineFamily);

impl ValidatedFamily {
    pub fn new(fam: BaselineFamily) -> Result<Self> {
        let report = audit(&fam);
        match report.first_violation {
            None => Ok(Self(fam)),
            Some(v) => Err(Error::AssumptionViolated(format!(
                "{fam}: assumption ({:?}) fails at x = {:.6e}",
                v.which, v.x
            ))),
        }
    }

    pub fn family(&self) -> &BaselineFamily {
        &self.0
    }
}

/// Relative residual of `y r̃(y) = h(y) / ∫₀¹ w(u) h(yu) du`.
pub fn identity_e4<B: Baseline + ?Sized>(fam: &B, y: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain {
            what: "identity needs y > 0",
            value: y,
        });
    }
    let log_lhs = y.ln() + fam.log_pdf(y) - fam.log_cdf(y);
    // scale the integrand by its larger endpoint value so it stays in range
    let shift = fam.log_h(0.0).max(fam.log_h(y));
    let integral = integrate_power_weighted(
        fam.w_exponent(),
        |u| (fam.log_h(y * u) - shift).exp(),
        1e-13,
    )?;
    let log_rhs = fam.log_h(y) - shift - integral.ln();
    Ok((log_lhs - log_rhs).exp_m1().abs())
}

/// Relative residual of
/// `(y r̃)' = (y r̃) h'/h - y r̃² + (1 + w'(1)) r̃`,
/// with the left side from a central difference of `ln(y r̃)`.
pub fn identity_e6<B: Baseline + ?Sized>(fam: &B, y: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain {
            what: "identity needs y > 0",
            value: y,
        });
    }
    let log_yr = |t: f64| t.ln() + fam.log_pdf(t) - fam.log_cdf(t);
    let r = fam.reversed_hazard(y);
    let yr = y * r;
    let lhs = yr * central_difference(log_yr, y, fd_step(y));
    let rhs = yr * fam.h_log_derivative(y) - y * r * r + (1.0 + fam.w_exponent()) * r;
    Ok(relative_difference(lhs, rhs))
}

/// Left side of
/// `Σ a_i y_i r̃(y_i) - y_p (r̃(y_p) - h'(y_p)/h(y_p)) (1 - ∏ F(y_i)^{a_i})`,
/// where `y_p = min y_i`. Nonnegative for validated families and `a_i ≥ 1`.
pub fn inequality_e7(fam: &ValidatedFamily, ys: &[f64], shape_exps: &[f64]) -> Result<f64> {
    let fam = fam.family();
    if ys.len() != shape_exps.len() {
        return Err(Error::LengthMismatch {
            left: ys.len(),
            right: shape_exps.len(),
        });
    }
    if ys.is_empty() {
        return Err(Error::Empty("inequality arguments"));
    }
    if let Some(&a) = shape_exps.iter().find(|&&a| !(a >= 1.0)) {
        return Err(Error::InvalidParameter {
            name: "shape_exp",
            value: a,
            reason: "the inequality needs every exponent >= 1",
        });
    }
    if let Some(&y) = ys.iter().find(|&&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::Domain {
            what: "inequality arguments must be positive",
            value: y,
        });
    }
    let sum: f64 = ys
        .iter()
        .zip(shape_exps)
        .map(|(&y, &a)| a * y * fam.reversed_hazard(y))
        .sum();
    let yp = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let one_minus_prod = log1mexp_from_log(logsumexp(
        ys.iter()
            .zip(shape_exps)
            .map(|(&y, &a)| a.ln() + fam.log_neg_log_cdf(y)),
    ))
    .exp();
    let s = yp * (fam.reversed_hazard(yp) - fam.h_log_derivative(yp));
    Ok(sum - s * one_minus_prod)
}

/// `q(q-1) + e^{x-1}((q-1)² x + q x² - x^{1+q} + 2q(1-q))`, nonnegative for
/// `x ≥ 1`, `0 < q ≤ 1`.
pub fn lemma_a6_psi(x: f64, q: f64) -> Result<f64> {
    if !(x >= 1.0 && x.is_finite()) {
        return Err(Error::Domain {
            what: "psi needs x >= 1",
            value: x,
        });
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain {
            what: "psi needs 0 < q <= 1",
            value: q,
        });
    }
    let inner = (q - 1.0).powi(2) * x + q * x * x - x.powf(1.0 + q) + 2.0 * q * (1.0 - q);
    Ok(q * (q - 1.0) + (x - 1.0).exp() * inner)
}

/// Two-block `ln φ(y, y*)`: `p` components at `y`, `n - p` at `y*`.
fn log_phi_two_block(fam: &BaselineFamily, y: f64, y_star: f64, p: usize, n: usize) -> Result<f64> {
    let mut ys = vec![y; p];
    ys.extend(std::iter::repeat(y_star).take(n - p));
    log_psi(fam, &ys, &vec![1.0; n])
}

/// `(ln y - ln y*)(y ∂φ/∂y - y* ∂φ/∂y*) / φ` by central differences in
/// log coordinates. The sign condition asks for this to be `≤ 0`.
pub fn e23_lhs(fam: &ValidatedFamily, y: f64, y_star: f64, p: usize, n: usize) -> Result<f64> {
    if !(p >= 1 && p < n) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p as f64,
            reason: "block size must satisfy 1 <= p < n",
        });
    }
    for v in [y, y_star] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain {
                what: "block scales must be positive",
                value: v,
            });
        }
    }
    let fam = fam.family();
    let (a, a_star) = (y.ln(), y_star.ln());
    if a == a_star {
        return Ok(0.0);
    }
    const STEP: f64 = 1e-5;
    let f = |a: f64, b: f64| log_phi_two_block(fam, a.exp(), b.exp(), p, n);
    let da = (f(a + STEP, a_star)? - f(a - STEP, a_star)?) / (2.0 * STEP);
    let db = (f(a, a_star + STEP)? - f(a, a_star - STEP)?) / (2.0 * STEP);
    Ok((a - a_star) * (da - db))
}

/// Whether the sign condition holds within slack 1e-8.
pub fn check_e23_condition(
    fam: &ValidatedFamily,
    y: f64,
    y_star: f64,
    p: usize,
    n: usize,
) -> Result<bool> {
    Ok(e23_lhs(fam, y, y_star, p, n)? <= 1e-8)
}

/// Outcome of comparing `ψ` at a point with `ψ` at its weighted geometric mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometricMeanComparison {
    pub psi_at_x: f64,
    pub psi_at_gm: f64,
    /// `ψ(x̃) - ψ(x)`; nonnegative when the geometric-mean point maximizes.
    pub margin: f64,
}

impl GeometricMeanComparison {
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.psi_at_gm.abs()
    }
}

/// Compares `ψ(x)` with `ψ(x̃)`, where `x̃` repeats the `a`-weighted geometric
/// mean of `x`. The homogeneous point dominates: `ψ(x) ≤ ψ(x̃)`.
pub fn lemma_a4_minimization(
    fam: &ValidatedFamily,
    shape_exps: &[f64],
    xs: &[f64],
) -> Result<GeometricMeanComparison> {
    let v = ParamVector::weighted(xs.to_vec(), shape_exps.to_vec())?;
    let gm = weighted_geometric_mean(&v);
    let fam = fam.family();
    let psi_at_x = log_psi(fam, xs, shape_exps)?.exp();
    let psi_at_gm = log_psi(fam, &vec![gm; xs.len()], shape_exps)?.exp();
    Ok(GeometricMeanComparison {
        psi_at_x,
        psi_at_gm,
        margin: psi_at_gm - psi_at_x,
    })
}

/// A PGW shape pair from the validated regime `p ∈ [0.5, 2.5]`, `q ∈ [0.2, 1]`.
pub fn sample_pgw_shapes(rng: &mut impl rand_core::RngCore) -> (f64, f64) {
    (rng::uniform(rng, 0.5, 2.5), rng::uniform(rng, 0.2, 1.0))
}

/// A GG shape pair with `β ∈ [0.5, 3]` and `α ∈ [β, β + 3]`.
pub fn sample_gg_shapes(rng: &mut impl rand_core::RngCore) -> (f64, f64) {
    let beta = rng::uniform(rng, 0.5, 3.0);
    (rng::uniform(rng, beta, beta + 3.0), beta)
}

/// `count` audited families, alternating PGW and GG, drawn from `seed`.
pub fn validated_pool(seed: u64, count: usize) -> Result<Vec<ValidatedFamily>> {
    (0..count)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let fam = if k % 2 == 0 {
                let (p, q) = sample_pgw_shapes(&mut r);
                BaselineFamily::pgw(p, q)?
            } else {
                let (a, b) = sample_gg_shapes(&mut r);
                BaselineFamily::gg(a, b)?
            };
            ValidatedFamily::new(fam)
        })
        .collect()
}

/// Summary of a randomized sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub draws: usize,
    pub min_margin: f64,
    pub failures: usize,
}

const POOL_SIZE: usize = 50;

/// `draws` random `(family, y, a ≥ 1)` evaluations of [`inequality_e7`].
pub fn sweep_e7(seed: u64, draws: usize) -> Result<SweepSummary> {
    let pool = validated_pool(seed, POOL_SIZE)?;
    let margins = (0..draws)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed ^ 0xE7, k as u64);
            let fam = &pool[rng::int_inclusive(&mut r, 0, POOL_SIZE - 1)];
            let n = rng::int_inclusive(&mut r, 1, 6);
            let ys: Vec<f64> = (0..n)
                .map(|_| rng::log_uniform(&mut r, 0.01, 5.0))
                .collect();
            let a: Vec<f64> = (0..n).map(|_| rng::uniform(&mut r, 1.0, 3.0)).collect();
            inequality_e7(fam, &ys, &a)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&margins, |m| m >= -1e-10))
}

/// `draws` random comparisons from [`lemma_a4_minimization`]; margins are relative.
pub fn sweep_lemma_a4(seed: u64, draws: usize) -> Result<SweepSummary> {
    let pool = validated_pool(seed, POOL_SIZE)?;
    let margins = (0..draws)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed ^ 0xA4, k as u64);
            let fam = &pool[rng::int_inclusive(&mut r, 0, POOL_SIZE - 1)];
            let n = rng::int_inclusive(&mut r, 2, 6);
            let xs: Vec<f64> = (0..n)
                .map(|_| rng::log_uniform(&mut r, 0.05, 3.0))
                .collect();
            let a: Vec<f64> = (0..n).map(|_| rng::uniform(&mut r, 1.0, 3.0)).collect();
            lemma_a4_minimization(fam, &a, &xs).map(|c| c.relative_margin())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&margins, |m| m >= -1e-9))
}

/// `draws` random evaluations of the two-block sign condition; the reported
/// margin is `-lhs`, so nonnegative means satisfied.
pub fn sweep_e23(seed: u64, draws: usize) -> Result<SweepSummary> {
    let pool = validated_pool(seed, POOL_SIZE)?;
    let margins = (0..draws)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed ^ 0xE23, k as u64);
            let fam = &pool[rng::int_inclusive(&mut r, 0, POOL_SIZE - 1)];
            let n = rng::int_inclusive(&mut r, 2, 6);
            let p = rng::int_inclusive(&mut r, 1, n - 1);
            let y = rng::log_uniform(&mut r, 0.02, 3.0);
            let y_star = rng::log_uniform(&mut r, 0.02, 3.0);
            e23_lhs(fam, y, y_star, p, n).map(|v| -v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&margins, |m| m >= -1e-8))
}

fn summarize(margins: &[f64], ok: impl Fn(f64) -> bool) -> SweepSummary {
    SweepSummary {
        draws: margins.len(),
        min_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        failures: margins.iter().filter(|&&m| !ok(m)).count(),
    }
}
