//! Hazard upper bounds and conditional-survival lower bounds for
//! heterogeneous parallel systems, obtained from the homogeneous system at the
//! weighted geometric mean scale.
//!
//! A homogeneous system whose CDF is `F(λx)^m` has hazard
//! `m λ f(λx) F(λx)^{m-1} / (1 - F(λx)^m)`. For `n` plain components `m = n`;
//! for exponentiated components with exponents `a_i`, `m = Σ a_i = n ā` and
//! the scale is the `a`-weighted geometric mean.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dists::{Baseline, BaselineFamily, FamilyKind};
use crate::error::{ensure_positive, Error, Result};
use crate::numeric::log1mexp_from_log;
use crate::parallel::{fmt_num, EvalGrid, ParallelSystem};
use crate::preorders::{arithmetic_mean, weighted_geometric_mean, ParamVector};

/// Below this log survival the bound is reported as `+∞`.
pub const BOUND_LOG_SURVIVAL_FLOOR: f64 = -700.0;

fn check_x(x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::Domain {
            what: "bound needs x > 0",
            value: x,
        })
    }
}

// ln(1 - F(λx)^m)
fn log_one_minus_power(fam: &BaselineFamily, m: f64, y: f64) -> f64 {
    log1mexp_from_log(m.ln() + fam.log_neg_log_cdf(y))
}

/// Hazard of the homogeneous system with CDF `F(λx)^m`.
pub fn homogeneous_hazard(fam: &BaselineFamily, m: f64, lambda: f64, x: f64) -> Result<f64> {
    let m = ensure_positive("total exponent", m)?;
    let lambda = ensure_positive("lambda", lambda)?;
    let y = lambda * check_x(x)?;
    let log_sf = log_one_minus_power(fam, m, y);
    if log_sf < BOUND_LOG_SURVIVAL_FLOOR {
        return Ok(f64::INFINITY);
    }
    let log_num = m.ln() + lambda.ln() + fam.log_pdf(y) + (m - 1.0) * fam.log_cdf(y);
    Ok((log_num - log_sf).exp())
}

/// `(1 - F(λ(x+t))^m) / (1 - F(λx)^m)`.
pub fn homogeneous_conditional_survival(
    fam: &BaselineFamily,
    m: f64,
    lambda: f64,
    x: f64,
    t: f64,
) -> Result<f64> {
    let m = ensure_positive("total exponent", m)?;
    let lambda = ensure_positive("lambda", lambda)?;
    let x = check_x(x)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "bound needs t >= 0",
            value: t,
        });
    }
    let den = log_one_minus_power(fam, m, lambda * x);
    if den == f64::NEG_INFINITY {
        return Err(Error::Domain {
            what: "survival underflows at the conditioning time",
            value: x,
        });
    }
    let num = log_one_minus_power(fam, m, lambda * (x + t));
    Ok((num - den).exp().min(1.0))
}

fn pgw_regime(p: f64, q: f64) -> Result<BaselineFamily> {
    if !(q <= 1.0) {
        return Err(Error::UnsupportedRegime(format!(
            "PGW bound needs q <= 1, got {q}"
        )));
    }
    BaselineFamily::pgw(p, q)
}

fn egg_regime(theta_bar: f64, alpha: f64, beta: f64) -> Result<BaselineFamily> {
    if !(alpha >= beta) {
        return Err(Error::UnsupportedRegime(format!(
            "EGG bound needs alpha >= beta, got {alpha} < {beta}"
        )));
    }
    if !(theta_bar >= 1.0) {
        return Err(Error::UnsupportedRegime(format!(
            "EGG bound needs exponents >= 1, mean is {theta_bar}"
        )));
    }
    BaselineFamily::gg(alpha, beta)
}

fn count(n: usize) -> Result<f64> {
    if n == 0 {
        Err(Error::Empty("system size"))
    } else {
        Ok(n as f64)
    }
}

/// Hazard bound for `n` PGW(p, q) components with geometric-mean scale
/// `lambda_gm`, `q ≤ 1`.
pub fn pgw_hazard_bound(n: usize, lambda_gm: f64, p: f64, q: f64, x: f64) -> Result<f64> {
    homogeneous_hazard(&pgw_regime(p, q)?, count(n)?, lambda_gm, x)
}

/// Lower bound on `P(X ≥ x + t | X ≥ x)` for `n` PGW(p, q) components.
pub fn pgw_conditional_survival_bound(
    n: usize,
    lambda_gm: f64,
    p: f64,
    q: f64,
    x: f64,
    t: f64,
) -> Result<f64> {
    homogeneous_conditional_survival(&pgw_regime(p, q)?, count(n)?, lambda_gm, x, t)
}

/// Hazard bound for `n` EGG components with mean exponent `theta_bar` and
/// weighted geometric-mean scale `lambda_wg`, `α ≥ β`.
pub fn egg_hazard_bound(
    n: usize,
    theta_bar: f64,
    lambda_wg: f64,
    alpha: f64,
    beta: f64,
    x: f64,
) -> Result<f64> {
    homogeneous_hazard(
        &egg_regime(theta_bar, alpha, beta)?,
        count(n)? * theta_bar,
        lambda_wg,
        x,
    )
}

/// Lower bound on `P(X ≥ x + t | X ≥ x)` for `n` EGG components.
pub fn egg_conditional_survival_bound(
    n: usize,
    theta_bar: f64,
    lambda_wg: f64,
    alpha: f64,
    beta: f64,
    x: f64,
    t: f64,
) -> Result<f64> {
    homogeneous_conditional_survival(
        &egg_regime(theta_bar, alpha, beta)?,
        count(n)? * theta_bar,
        lambda_wg,
        x,
        t,
    )
}

/// Parameters of the homogeneous reference system for `system`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reference {
    /// Exponent-weighted geometric mean of the scales.
    pub lambda_wg: f64,
    /// `Σ a_i`.
    pub total_exp: f64,
    /// Whether the hypotheses that make the bound valid hold.
    pub supported: bool,
}

/// Reference system of `system` and whether its family and exponents fall
/// inside the regime where the bounds are proven.
pub fn reference(system: &ParallelSystem) -> Reference {
    let lambdas = system.lambdas();
    let exps = system.shape_exps();
    let lambda_wg = weighted_geometric_mean(
        &ParamVector::weighted(lambdas, exps.clone()).expect("validated system"),
    );
    let (s1, s2) = system.family().shapes();
    let family_ok = match system.family().kind() {
        FamilyKind::Pgw => s2 <= 1.0,
        FamilyKind::Gg => s1 >= s2,
    };
    Reference {
        lambda_wg,
        total_exp: exps.iter().sum(),
        supported: family_ok && exps.iter().all(|&a| a >= 1.0),
    }
}

/// Bound and actual hazard on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub grid: EvalGrid,
    pub bound_values: Vec<f64>,
    pub actual_values: Vec<f64>,
    /// `bound - actual`.
    pub slack: Vec<f64>,
    pub supported: bool,
}

impl BoundCurve {
    /// Hazard bound of `system` against its actual hazard. Outside the proven
    /// regime the curve is still computed, with `supported = false`.
    pub fn hazard(system: &ParallelSystem, grid: &EvalGrid) -> Result<Self> {
        let r = reference(system);
        let mut bound_values = Vec::with_capacity(grid.len());
        let mut actual_values = Vec::with_capacity(grid.len());
        for &x in grid.points() {
            bound_values.push(homogeneous_hazard(
                system.family(),
                r.total_exp,
                r.lambda_wg,
                x,
            )?);
            actual_values.push(system.hazard(x)?);
        }
        let slack = bound_values
            .iter()
            .zip(&actual_values)
            .map(|(b, a)| b - a)
            .collect();
        Ok(Self {
            grid: grid.clone(),
            bound_values,
            actual_values,
            slack,
            supported: r.supported,
        })
    }

    /// Smallest `slack / |bound|` over points where both values are finite.
    pub fn min_relative_slack(&self) -> f64 {
        self.bound_values
            .iter()
            .zip(&self.actual_values)
            .filter(|(b, a)| b.is_finite() && a.is_finite())
            .map(|(b, a)| if b == a { 0.0 } else { (b - a) / b.abs() })
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the bound dominates everywhere within `-1e-9 |bound|`.
    pub fn dominates(&self) -> bool {
        self.min_relative_slack() >= -1e-9
    }

    /// CSV with header `x,bound,actual,slack`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,bound,actual,slack\n");
        for k in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_num(self.grid.points()[k]),
                fmt_num(self.bound_values[k]),
                fmt_num(self.actual_values[k]),
                fmt_num(self.slack[k])
            );
        }
        out
    }
}

/// Hazard of a heterogeneous PGW system next to the homogeneous systems at
/// the geometric and at the arithmetic mean of its scales.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanComparison {
    pub grid: EvalGrid,
    pub actual: Vec<f64>,
    pub gm_bound: Vec<f64>,
    pub am_bound: Vec<f64>,
    pub gm: f64,
    pub am: f64,
}

impl MeanComparison {
    pub fn pgw(p: f64, q: f64, lambdas: &[f64], grid: &EvalGrid) -> Result<Self> {
        let fam = BaselineFamily::pgw(p, q)?;
        let v = ParamVector::new(lambdas.to_vec())?;
        let (gm, am) = (weighted_geometric_mean(&v), arithmetic_mean(&v));
        let system = ParallelSystem::scale_model(fam, lambdas)?;
        let n = lambdas.len() as f64;
        let mut actual = Vec::with_capacity(grid.len());
        let mut gm_bound = Vec::with_capacity(grid.len());
        let mut am_bound = Vec::with_capacity(grid.len());
        for &x in grid.points() {
            actual.push(system.hazard(x)?);
            gm_bound.push(homogeneous_hazard(&fam, n, gm, x)?);
            am_bound.push(homogeneous_hazard(&fam, n, am, x)?);
        }
        Ok(Self {
            grid: grid.clone(),
            actual,
            gm_bound,
            am_bound,
            gm,
            am,
        })
    }

    /// Smallest relative slack of `actual ≤ gm_bound ≤ am_bound`.
    pub fn min_relative_slack(&self) -> f64 {
        let rel = |lo: f64, hi: f64| {
            if !(lo.is_finite() && hi.is_finite()) || lo == hi {
                0.0
            } else {
                (hi - lo) / hi.abs()
            }
        };
        (0..self.grid.len())
            .map(|k| {
                rel(self.actual[k], self.gm_bound[k]).min(rel(self.gm_bound[k], self.am_bound[k]))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV with header `x,actual,gm_bound,am_bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,actual,gm_bound,am_bound\n");
        for k in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_num(self.grid.points()[k]),
                fmt_num(self.actual[k]),
                fmt_num(self.gm_bound[k]),
                fmt_num(self.am_bound[k])
            );
        }
        out
    }
}

/// Component scales used for the design example: (1.5, 2, 3.5).
pub const EXAMPLE31_LAMBDAS: [f64; 3] = [1.5, 2.0, 3.5];
/// The two PGW shape pairs of the design example.
pub const EXAMPLE31_SHAPES: [(f64, f64); 2] = [(1.5, 0.8), (0.8, 0.4)];

/// Grid of the design example: 500 points on `[0.05, 10]`.
pub fn example31_grid() -> EvalGrid {
    EvalGrid::linear(0.05, 10.0, 500).expect("valid grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dists::ComponentSpec;
    use crate::numeric::relative_difference;

    #[test]
    fn single_component_reduces_to_hazard() {
        let c = ComponentSpec::scaled(BaselineFamily::pgw(1.5, 0.8).unwrap(), 1.7).unwrap();
        for &x in &[0.1, 1.0, 2.5] {
            let b = pgw_hazard_bound(1, 1.7, 1.5, 0.8, x).unwrap();
            assert!(relative_difference(b, c.hazard(x).unwrap()) < 1e-12);
        }
        let g = ComponentSpec::scaled(BaselineFamily::gg(2.0, 1.0).unwrap(), 0.8).unwrap();
        let b = egg_hazard_bound(1, 1.0, 0.8, 2.0, 1.0, 1.1).unwrap();
        assert!(relative_difference(b, g.hazard(1.1).unwrap()) < 1e-12);
    }

    #[test]
    fn exponential_max_hazard() {
        let (n, l, x): (usize, f64, f64) = (3, 1.3, 0.9);
        let e = (-l * x).exp();
        let want = 3.0 * l * e * (1.0 - e).powi(2) / (1.0 - (1.0 - e).powi(3));
        assert!(relative_difference(pgw_hazard_bound(n, l, 1.0, 1.0, x).unwrap(), want) < 1e-13);
    }

    #[test]
    fn example_dominance_at_one() {
        let fam = BaselineFamily::pgw(1.5, 0.8).unwrap();
        let s = ParallelSystem::scale_model(fam, &EXAMPLE31_LAMBDAS).unwrap();
        let gm = reference(&s).lambda_wg;
        assert!(pgw_hazard_bound(3, gm, 1.5, 0.8, 1.0).unwrap() >= s.hazard(1.0).unwrap());
        let s2 =
            ParallelSystem::scale_model(BaselineFamily::pgw(0.8, 0.4).unwrap(), &EXAMPLE31_LAMBDAS)
                .unwrap();
        let gm2 = reference(&s2).lambda_wg;
        let lb = pgw_conditional_survival_bound(3, gm2, 0.8, 0.4, 1.0, 1.0).unwrap();
        assert!(lb <= s2.conditional_survival(1.0, 1.0).unwrap());
        assert_eq!(
            pgw_conditional_survival_bound(3, gm2, 0.8, 0.4, 1.0, 0.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn egg_collapse_to_common_exponent() {
        let fam = BaselineFamily::gg(2.0, 1.0).unwrap();
        let s = ParallelSystem::from_scales(fam, &[1.0, 2.0, 3.0], &[1.7; 3]).unwrap();
        let r = reference(&s);
        let hom = ParallelSystem::from_scales(fam, &[r.lambda_wg; 3], &[1.7; 3]).unwrap();
        let x = 0.6;
        let b = egg_hazard_bound(3, 1.7, r.lambda_wg, 2.0, 1.0, x).unwrap();
        assert!(relative_difference(b, hom.hazard(x).unwrap()) < 1e-12);
    }

    #[test]
    fn regime_checks() {
        assert!(pgw_hazard_bound(3, 1.0, 1.5, 1.2, 1.0).is_err());
        assert!(egg_hazard_bound(3, 1.0, 1.0, 1.0, 2.0, 1.0).is_err());
        assert!(egg_hazard_bound(3, 0.5, 1.0, 2.0, 1.0, 1.0).is_err());
        assert!(pgw_hazard_bound(3, 1.0, 1.5, 0.5, 0.0).is_err());
        assert_eq!(
            pgw_hazard_bound(3, 100.0, 2.0, 1.0, 30.0).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn egg_grid_dominance() {
        let fam = BaselineFamily::gg(2.0, 1.0).unwrap();
        let s = ParallelSystem::from_scales(fam, &[1.0, 2.0, 3.0], &[1.0, 1.5, 2.0]).unwrap();
        let c = BoundCurve::hazard(&s, &EvalGrid::default()).unwrap();
        assert!(c.supported);
        assert!(c.dominates(), "min slack {}", c.min_relative_slack());
        assert!(c.to_csv().starts_with("x,bound,actual,slack\n"));
    }
}
