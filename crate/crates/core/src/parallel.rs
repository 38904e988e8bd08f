//! Lifetime of a parallel system, i.e. the maximum of independent component
//! lifetimes.
//!
//! With `L(x) = Σ a_i ln F(λ_i x)` the system CDF is `exp(L)`. The survival
//! `1 - exp(L)` is computed from `ln(-L)`, which is a log-sum-exp of the
//! components' `ln(-ln cdf)`, so it keeps full precision when every
//! component is almost surely failed.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dists::{Baseline, BaselineFamily, ComponentSpec, HAZARD_UNDERFLOW_LOG_SURVIVAL};
use crate::error::{Error, Result};
use crate::numeric::{log1mexp_from_log, logsumexp};

/// Smallest time at which the system hazard is evaluated.
pub const MIN_HAZARD_TIME: f64 = 1e-10;

/// Independent components sharing one baseline family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct ParallelSystem {
    components: Vec<ComponentSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    components: Vec<ComponentSpec>,
}

impl TryFrom<RawSystem> for ParallelSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        ParallelSystem::new(raw.components)
    }
}

impl From<ParallelSystem> for RawSystem {
    fn from(s: ParallelSystem) -> Self {
        RawSystem {
            components: s.components,
        }
    }
}

impl ParallelSystem {
    pub fn new(components: Vec<ComponentSpec>) -> Result<Self> {
        let first = components.first().ok_or(Error::Empty("parallel system"))?;
        if components.iter().any(|c| c.family() != first.family()) {
            return Err(Error::MixedFamilies);
        }
        Ok(Self { components })
    }

    /// Components with the given scales and shape exponents.
    pub fn from_scales(
        family: BaselineFamily,
        lambdas: &[f64],
        shape_exps: &[f64],
    ) -> Result<Self> {
        if lambdas.len() != shape_exps.len() {
            return Err(Error::LengthMismatch {
                left: lambdas.len(),
                right: shape_exps.len(),
            });
        }
        let components = lambdas
            .iter()
            .zip(shape_exps)
            .map(|(&l, &a)| ComponentSpec::new(family, l, a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    /// Plain scale-model components (all shape exponents 1).
    pub fn scale_model(family: BaselineFamily, lambdas: &[f64]) -> Result<Self> {
        Self::from_scales(family, lambdas, &vec![1.0; lambdas.len()])
    }

    /// `n` copies of one component.
    pub fn homogeneous(component: ComponentSpec, n: usize) -> Result<Self> {
        Self::new(vec![component; n])
    }

    pub fn components(&self) -> &[ComponentSpec] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn family(&self) -> &BaselineFamily {
        self.components[0].family()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.components.iter().map(ComponentSpec::lambda).collect()
    }

    pub fn shape_exps(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(ComponentSpec::shape_exp)
            .collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system serialization is infallible")
    }

    pub fn log_cdf(&self, x: f64) -> Result<f64> {
        let mut acc = 0.0;
        for c in &self.components {
            acc += c.log_cdf(x)?;
        }
        Ok(acc)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.log_cdf(x).map(f64::exp)
    }

    /// `ln(-ln cdf(x))`.
    pub fn log_neg_log_cdf(&self, x: f64) -> Result<f64> {
        let terms = self
            .components
            .iter()
            .map(|c| c.log_neg_log_cdf(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(logsumexp(terms))
    }

    pub fn log_survival(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(log1mexp_from_log(self.log_neg_log_cdf(x)?))
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.log_survival(x).map(f64::exp)
    }

    /// System hazard `f / (1 - F)`; `+∞` once the survival is below 1e-300.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x >= MIN_HAZARD_TIME) {
            return Err(Error::Domain {
                what: "system hazard needs x >= 1e-10",
                value: x,
            });
        }
        let ys: Vec<f64> = self.components.iter().map(|c| c.lambda() * x).collect();
        let lp = log_psi(self.family(), &ys, &self.shape_exps())?;
        if lp == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        Ok((lp - x.ln()).exp())
    }

    /// System density, `hazard · survival`.
    pub fn density(&self, x: f64) -> Result<f64> {
        let h = self.hazard(x)?;
        if h == f64::INFINITY {
            return Ok(0.0);
        }
        Ok(h * self.survival(x)?)
    }

    /// `P(X ≥ x + t | X ≥ x)`.
    pub fn conditional_survival(&self, x: f64, t: f64) -> Result<f64> {
        if !(x > 0.0 && t >= 0.0) {
            return Err(Error::Domain {
                what: "conditional survival needs x > 0 and t >= 0",
                value: if x > 0.0 { t } else { x },
            });
        }
        let base = self.log_survival(x)?;
        if base == f64::NEG_INFINITY {
            return Err(Error::Domain {
                what: "survival underflows at the conditioning time",
                value: x,
            });
        }
        Ok((self.log_survival(x + t)? - base).exp().min(1.0))
    }
}

/// ln of the symmetric function
/// `ψ(y) = ∏F(y_i)^{a_i} / (1 - ∏F(y_i)^{a_i}) · Σ a_i y_i r̃(y_i)`;
/// `+∞` when the survival factor underflows.
pub fn log_psi(family: &BaselineFamily, ys: &[f64], shape_exps: &[f64]) -> Result<f64> {
    if ys.len() != shape_exps.len() {
        return Err(Error::LengthMismatch {
            left: ys.len(),
            right: shape_exps.len(),
        });
    }
    if ys.is_empty() {
        return Err(Error::Empty("psi arguments"));
    }
    let mut log_cdf = 0.0;
    let mut nlc = Vec::with_capacity(ys.len());
    let mut rate = Vec::with_capacity(ys.len());
    for (&y, &a) in ys.iter().zip(shape_exps) {
        if !(y.is_finite() && y > 0.0) {
            return Err(Error::Domain {
                what: "psi arguments must be positive",
                value: y,
            });
        }
        let lc = family.log_cdf(y);
        log_cdf += a * lc;
        nlc.push(a.ln() + family.log_neg_log_cdf(y));
        rate.push(a.ln() + y.ln() + family.log_pdf(y) - lc);
    }
    let log_sf = log1mexp_from_log(logsumexp(nlc));
    if log_sf < HAZARD_UNDERFLOW_LOG_SURVIVAL {
        return Ok(f64::INFINITY);
    }
    Ok(log_cdf - log_sf + logsumexp(rate))
}

/// `ψ(y_1, …, y_n)` for shape exponents `a_i`; `x · hazard(x) = ψ(λ x)`.
pub fn psi_function(family: &BaselineFamily, ys: &[f64], shape_exps: &[f64]) -> Result<f64> {
    log_psi(family, ys, shape_exps).map(f64::exp)
}

/// Strictly increasing positive abscissae.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalGrid {
    points: Vec<f64>,
}

impl EvalGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid is empty"));
        }
        if points.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidGrid(
                "grid points must be positive and finite",
            ));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("grid must be strictly increasing"));
        }
        Ok(Self { points })
    }

    /// `n` log-spaced points on `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(Error::InvalidGrid("log grid needs 0 < lo < hi and n >= 2"));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|k| (a + step * k as f64).exp()).collect();
        pts[0] = lo;
        pts[n - 1] = hi;
        Self::new(pts)
    }

    /// `n` evenly spaced points on `[lo, hi]`.
    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(Error::InvalidGrid(
                "linear grid needs 0 < lo < hi and n >= 2",
            ));
        }
        let step = (hi - lo) / (n - 1) as f64;
        Self::new((0..n).map(|k| lo + step * k as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Union with another grid (duplicates dropped).
    pub fn merged(&self, other: &EvalGrid) -> EvalGrid {
        let mut pts: Vec<f64> = self.points.iter().chain(&other.points).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        EvalGrid { points: pts }
    }
}

impl Default for EvalGrid {
    /// 2000 log-spaced points on `[1e-3, 20]`.
    fn default() -> Self {
        Self::log_spaced(1e-3, 20.0, 2000).expect("default grid is valid")
    }
}

/// Which quantity a [`SystemCurve`] tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Cdf,
    Survival,
    Hazard,
    Density,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Cdf => "cdf",
            CurveKind::Survival => "survival",
            CurveKind::Hazard => "hazard",
            CurveKind::Density => "density",
        }
    }
}

/// A tabulated system quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemCurve {
    pub grid: EvalGrid,
    pub values: Vec<f64>,
    pub kind: CurveKind,
}

impl SystemCurve {
    /// Evaluates `kind` on every grid point (in parallel, output in grid order).
    pub fn tabulate(system: &ParallelSystem, grid: &EvalGrid, kind: CurveKind) -> Result<Self> {
        let values = grid
            .points()
            .par_iter()
            .map(|&x| match kind {
                CurveKind::Cdf => system.cdf(x),
                CurveKind::Survival => system.survival(x),
                CurveKind::Hazard => system.hazard(x),
                CurveKind::Density => system.density(x),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: grid.clone(),
            values,
            kind,
        })
    }

    /// CSV with header `x,<kind>` and 17 significant digits per number.
    pub fn to_csv(&self) -> String {
        let mut out = format!("x,{}\n", self.kind.name());
        for (x, v) in self.grid.points().iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt_num(*x), fmt_num(*v));
        }
        out
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{central_difference, fd_step, relative_difference};

    fn pgw(p: f64, q: f64) -> BaselineFamily {
        BaselineFamily::pgw(p, q).unwrap()
    }

    #[test]
    fn example_systems_closed_form() {
        let x_sys = ParallelSystem::scale_model(pgw(2.0, 1.0), &[0.1, 1.0, 9.0]).unwrap();
        let want: f64 = [0.01f64, 1.0, 81.0]
            .iter()
            .map(|t| -(-t).exp_m1())
            .product();
        assert!(relative_difference(x_sys.cdf(1.0).unwrap(), want) < 1e-13);
        assert!(relative_difference(x_sys.survival(1.0).unwrap(), 1.0 - want) < 1e-14);
        let y_sys = ParallelSystem::scale_model(pgw(2.0, 1.0), &[0.1, 4.0, 6.0]).unwrap();
        let want_y: f64 = [0.01f64, 16.0, 36.0]
            .iter()
            .map(|t| -(-t).exp_m1())
            .product();
        assert!((y_sys.survival(1.0).unwrap() - (1.0 - want_y)).abs() < 1e-15);
        assert!((y_sys.survival(1.0).unwrap() - 0.990_05).abs() < 1e-5);
        assert_eq!(x_sys.survival(0.0).unwrap(), 1.0);
    }

    #[test]
    fn homogeneous_equals_power() {
        let c = ComponentSpec::new(pgw(1.3, 0.7), 1.7, 1.4).unwrap();
        let s = ParallelSystem::homogeneous(c, 5).unwrap();
        for &x in &[0.05, 0.5, 2.0] {
            let want = c.cdf(x).unwrap().powi(5);
            assert!(relative_difference(s.cdf(x).unwrap(), want) < 1e-13);
        }
        let single = ParallelSystem::homogeneous(c, 1).unwrap();
        assert_eq!(single.cdf(0.3).unwrap(), c.cdf(0.3).unwrap());
    }

    #[test]
    fn max_of_exponentials_hazard() {
        let c = ComponentSpec::scaled(pgw(1.0, 1.0), 1.0).unwrap();
        let s = ParallelSystem::homogeneous(c, 3).unwrap();
        let e = (-1.0f64).exp();
        let want = 3.0 * e * (1.0 - e).powi(2) / (1.0 - (1.0 - e).powi(3));
        assert!(relative_difference(s.hazard(1.0).unwrap(), want) < 1e-13);
        let one =
            ParallelSystem::homogeneous(ComponentSpec::scaled(pgw(1.0, 1.0), 2.5).unwrap(), 1)
                .unwrap();
        for &x in &[0.001, 0.7, 12.0] {
            assert!(relative_difference(one.hazard(x).unwrap(), 2.5) < 1e-12);
            assert!(
                relative_difference(one.conditional_survival(x, 0.4).unwrap(), (-1.0f64).exp())
                    < 1e-12
            );
        }
    }

    #[test]
    fn hazard_matches_log_survival_derivative() {
        let s =
            ParallelSystem::from_scales(pgw(0.8, 0.4), &[0.3, 1.2, 4.0], &[1.0, 2.0, 0.6]).unwrap();
        for &x in EvalGrid::log_spaced(1e-2, 5.0, 60).unwrap().points() {
            let fd = -central_difference(|t| s.log_survival(t).unwrap(), x, fd_step(x));
            assert!(
                relative_difference(s.hazard(x).unwrap(), fd) < 1e-5,
                "x={x}"
            );
        }
    }

    #[test]
    fn psi_consistency() {
        let fam = pgw(1.5, 0.8);
        let s = ParallelSystem::from_scales(fam, &[1.5, 2.0, 3.5], &[1.0, 1.3, 2.0]).unwrap();
        let x = 0.9;
        let ys: Vec<f64> = s.lambdas().iter().map(|l| l * x).collect();
        let psi = psi_function(&fam, &ys, &s.shape_exps()).unwrap();
        assert!(relative_difference(x * s.hazard(x).unwrap(), psi) < 1e-12);
        // single term
        let y = 0.7;
        let a = 1.6;
        let fa = fam.cdf(y).powf(a);
        let want = a * y * fam.reversed_hazard(y) * fa / (1.0 - fa);
        assert!(relative_difference(psi_function(&fam, &[y], &[a]).unwrap(), want) < 1e-13);
    }

    #[test]
    fn conditional_survival_basics() {
        let s = ParallelSystem::scale_model(pgw(1.5, 0.8), &[1.5, 2.0, 3.5]).unwrap();
        assert_eq!(s.conditional_survival(1.0, 0.0).unwrap(), 1.0);
        let mut prev = 1.0;
        for k in 1..50 {
            let v = s.conditional_survival(0.5, 0.05 * k as f64).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn construction_rules() {
        assert!(ParallelSystem::new(vec![]).is_err());
        let a = ComponentSpec::scaled(pgw(1.0, 1.0), 1.0).unwrap();
        let b = ComponentSpec::scaled(pgw(1.0, 0.5), 1.0).unwrap();
        assert!(matches!(
            ParallelSystem::new(vec![a, b]),
            Err(Error::MixedFamilies)
        ));
        assert!(ParallelSystem::homogeneous(a, 1)
            .unwrap()
            .hazard(1e-11)
            .is_err());
        assert!(EvalGrid::new(vec![1.0, 1.0]).is_err());
        assert!(EvalGrid::new(vec![0.0, 1.0]).is_err());
        let g = EvalGrid::default();
        assert_eq!(g.len(), 2000);
        assert_eq!(g.points()[0], 1e-3);
        assert_eq!(g.points()[1999], 20.0);
    }

    #[test]
    fn system_json_and_csv() {
        let s = ParallelSystem::scale_model(pgw(2.0, 1.0), &[0.1, 1.0, 9.0]).unwrap();
        let back = ParallelSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(ParallelSystem::from_json(r#"{"components":[],"extra":1}"#).is_err());
        let grid = EvalGrid::new(vec![0.5, 1.0]).unwrap();
        let csv = SystemCurve::tabulate(&s, &grid, CurveKind::Survival)
            .unwrap()
            .to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,survival"));
        assert_eq!(
            lines.next().unwrap().split(',').next(),
            Some("5.0000000000000000e-1")
        );
    }
}
