//! Baseline lifetime families and the exponentiated scale model.
//!
//! A baseline density at unit scale is written `f(y) = w(y) h(y)` with
//! `w(y) = y^e` multiplicative. A component has CDF `F(λx)^a`, where `λ` is
//! the scale and `a` the exponentiation shape (`shape_exp`).
//!
//! Everything is evaluated in log space first; the plain accessors
//! exponentiate at the end.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::numeric::{log1mexp, log1mexp_from_log, log_neg_log1m};
use crate::special::{gamma_p_inverse, ln_gamma, ln_gamma_hazard, ln_gamma_pq};

/// Log survival below which [`ComponentSpec::hazard`] reports `+∞`.
pub const HAZARD_UNDERFLOW_LOG_SURVIVAL: f64 = -690.775_527_898_213_7; // ln 1e-300

/// A baseline lifetime distribution at unit scale, with its `w`/`h` split.
///
/// Implementors supply the log-space primitives; the rest is derived.
pub trait Baseline {
    /// `ln F(y)`.
    fn log_cdf(&self, y: f64) -> f64;
    /// `ln(1 - F(y))`.
    fn log_sf(&self, y: f64) -> f64;
    /// `ln f(y)`, `y > 0`.
    fn log_pdf(&self, y: f64) -> f64;
    /// Exponent `e` in `w(y) = y^e`, i.e. `w'(1)`.
    fn w_exponent(&self) -> f64;
    /// `ln h(y)`, `y > 0`.
    fn log_h(&self, y: f64) -> f64;
    /// `h'(y) / h(y)`, `y > 0`.
    fn h_log_derivative(&self, y: f64) -> f64;

    /// `ln(f(y) / (1 - F(y)))`.
    fn log_hazard(&self, y: f64) -> f64 {
        self.log_pdf(y) - self.log_sf(y)
    }

    fn cdf(&self, y: f64) -> f64 {
        self.log_cdf(y).exp()
    }

    fn sf(&self, y: f64) -> f64 {
        self.log_sf(y).exp()
    }

    fn pdf(&self, y: f64) -> f64 {
        self.log_pdf(y).exp()
    }

    /// Reversed hazard `f(y) / F(y)`.
    fn reversed_hazard(&self, y: f64) -> f64 {
        (self.log_pdf(y) - self.log_cdf(y)).exp()
    }

    /// `ln(-ln F(y))`, accurate deep in the upper tail where `F` rounds to 1.
    fn log_neg_log_cdf(&self, y: f64) -> f64 {
        log_neg_log1m(self.log_sf(y), self.log_cdf(y))
    }

    fn w(&self, y: f64) -> f64 {
        y.powf(self.w_exponent())
    }

    fn h(&self, y: f64) -> f64 {
        self.log_h(y).exp()
    }
}

/// Which baseline family a [`BaselineFamily`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Power-generalized Weibull.
    Pgw,
    /// Generalized gamma.
    Gg,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Pgw => f.write_str("pgw"),
            FamilyKind::Gg => f.write_str("gg"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shapes {
    Pgw { p: f64, q: f64 },
    Gg { alpha: f64, beta: f64, ln_norm: f64 },
}

/// PGW(p, q) or GG(α, β) at unit scale. Shapes are validated on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineFamily(Shapes);

impl BaselineFamily {
    /// PGW with survival `exp(1 - (1 + y^p)^(1/q))`.
    pub fn pgw(p: f64, q: f64) -> Result<Self> {
        let p = ensure_positive("p", p)?;
        let q = ensure_positive("q", q)?;
        Ok(Self(Shapes::Pgw { p, q }))
    }

    /// GG with density `α/Γ(β/α) y^(β-1) exp(-y^α)`.
    pub fn gg(alpha: f64, beta: f64) -> Result<Self> {
        let alpha = ensure_positive("alpha", alpha)?;
        let beta = ensure_positive("beta", beta)?;
        let ln_norm = alpha.ln() - ln_gamma(beta / alpha);
        Ok(Self(Shapes::Gg {
            alpha,
            beta,
            ln_norm,
        }))
    }

    pub fn kind(&self) -> FamilyKind {
        match self.0 {
            Shapes::Pgw { .. } => FamilyKind::Pgw,
            Shapes::Gg { .. } => FamilyKind::Gg,
        }
    }

    /// The two shape parameters: `(p, q)` for PGW, `(α, β)` for GG.
    pub fn shapes(&self) -> (f64, f64) {
        match self.0 {
            Shapes::Pgw { p, q } => (p, q),
            Shapes::Gg { alpha, beta, .. } => (alpha, beta),
        }
    }

    /// Unit-scale quantile given `ln u` and `ln(1 - u)`.
    pub fn quantile_log(&self, ln_u: f64, ln_1mu: f64) -> Result<f64> {
        match self.0 {
            Shapes::Pgw { p, q } => {
                // -ln S = (1 + y^p)^(1/q) - 1
                let t = -ln_1mu;
                let yp = (q * t.ln_1p()).exp_m1();
                Ok(yp.powf(1.0 / p))
            }
            Shapes::Gg { alpha, beta, .. } => {
                let z = gamma_p_inverse(beta / alpha, ln_u, ln_1mu)?;
                Ok(z.powf(1.0 / alpha))
            }
        }
    }

    // t = (1 + y^p)^(1/q) - 1 and l = ln(1 + y^p)
    #[inline]
    fn pgw_t(p: f64, q: f64, y: f64) -> (f64, f64) {
        let l = (p * y.ln()).exp().ln_1p();
        ((l / q).exp_m1(), l)
    }
}

impl Baseline for BaselineFamily {
    fn log_cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.0 {
            Shapes::Pgw { p, q } => log1mexp(Self::pgw_t(p, q, y).0),
            Shapes::Gg { alpha, beta, .. } => {
                ln_gamma_pq(beta / alpha, y.powf(alpha)).map_or(f64::NAN, |(lp, _)| lp)
            }
        }
    }

    fn log_sf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self.0 {
            Shapes::Pgw { p, q } => -Self::pgw_t(p, q, y).0,
            Shapes::Gg { alpha, beta, .. } => {
                ln_gamma_pq(beta / alpha, y.powf(alpha)).map_or(f64::NAN, |(_, lq)| lq)
            }
        }
    }

    fn log_pdf(&self, y: f64) -> f64 {
        self.w_exponent() * y.ln() + self.log_h(y)
    }

    fn log_hazard(&self, y: f64) -> f64 {
        match self.0 {
            // the survival exponent cancels: ln(p/q) + (p-1) ln y + (1/q - 1) ln(1 + y^p)
            Shapes::Pgw { p, q } => {
                let l = (p * y.ln()).exp().ln_1p();
                (p / q).ln() + (p - 1.0) * y.ln() + (1.0 / q - 1.0) * l
            }
            Shapes::Gg { alpha, beta, .. } => {
                // hazard of y^α under the gamma law, times the Jacobian α y^(α-1)
                let z = y.powf(alpha);
                if !(z > 0.0 && z.is_finite()) {
                    return self.log_pdf(y) - self.log_sf(y);
                }
                ln_gamma_hazard(beta / alpha, z)
                    .map_or(f64::NAN, |lr| alpha.ln() + (alpha - 1.0) * y.ln() + lr)
            }
        }
    }

    fn w_exponent(&self) -> f64 {
        match self.0 {
            Shapes::Pgw { p, .. } => p - 1.0,
            Shapes::Gg { beta, .. } => beta - 1.0,
        }
    }

    fn log_h(&self, y: f64) -> f64 {
        match self.0 {
            Shapes::Pgw { p, q } => {
                let (t, l) = Self::pgw_t(p, q, y);
                (p / q).ln() + (1.0 / q - 1.0) * l - t
            }
            Shapes::Gg { alpha, ln_norm, .. } => ln_norm - y.powf(alpha),
        }
    }

    fn h_log_derivative(&self, y: f64) -> f64 {
        match self.0 {
            Shapes::Pgw { p, q } => {
                let (t, l) = Self::pgw_t(p, q, y);
                // p y^(p-1)/(1+y^p) [(1/q - 1) - (1/q)(1+y^p)^(1/q)]
                let lead = p * ((p - 1.0) * y.ln() - l).exp();
                lead * ((1.0 / q - 1.0) - (1.0 + t) / q)
            }
            Shapes::Gg { alpha, .. } => -alpha * y.powf(alpha - 1.0),
        }
    }
}

impl fmt::Display for BaselineFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Shapes::Pgw { p, q } => write!(f, "PGW(p={p}, q={q})"),
            Shapes::Gg { alpha, beta, .. } => write!(f, "GG(alpha={alpha}, beta={beta})"),
        }
    }
}

/// One component: CDF `F(λx)^shape_exp` for a baseline `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComponent", into = "RawComponent")]
pub struct ComponentSpec {
    family: BaselineFamily,
    lambda: f64,
    shape_exp: f64,
}

fn check_time(x: f64) -> Result<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(Error::Domain {
            what: "time must be finite and nonnegative",
            value: x,
        })
    }
}

fn check_positive_time(x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::Domain {
            what: "time must be finite and strictly positive",
            value: x,
        })
    }
}

impl ComponentSpec {
    pub fn new(family: BaselineFamily, lambda: f64, shape_exp: f64) -> Result<Self> {
        Ok(Self {
            family,
            lambda: ensure_positive("lambda", lambda)?,
            shape_exp: ensure_positive("shape_exp", shape_exp)?,
        })
    }

    /// Plain scale model component (`shape_exp = 1`).
    pub fn scaled(family: BaselineFamily, lambda: f64) -> Result<Self> {
        Self::new(family, lambda, 1.0)
    }

    pub fn family(&self) -> &BaselineFamily {
        &self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn shape_exp(&self) -> f64 {
        self.shape_exp
    }

    pub fn log_cdf(&self, x: f64) -> Result<f64> {
        let x = check_time(x)?;
        if x == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.shape_exp * self.family.log_cdf(self.lambda * x))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.log_cdf(x).map(f64::exp)
    }

    /// `ln(-ln cdf(x))`; stays finite after `cdf` itself rounds to 1.
    pub fn log_neg_log_cdf(&self, x: f64) -> Result<f64> {
        let x = check_time(x)?;
        if x == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self.shape_exp.ln() + self.family.log_neg_log_cdf(self.lambda * x))
    }

    pub fn log_survival(&self, x: f64) -> Result<f64> {
        let x = check_time(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        if self.shape_exp == 1.0 {
            return Ok(self.family.log_sf(self.lambda * x));
        }
        Ok(log1mexp_from_log(self.log_neg_log_cdf(x)?))
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.log_survival(x).map(f64::exp)
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        let x = check_time(x)?;
        let a = self.shape_exp;
        let e = self.family.w_exponent();
        if x == 0.0 {
            if e < 0.0 || a < 1.0 {
                return Err(Error::Domain {
                    what: "density diverges at zero for these shapes",
                    value: x,
                });
            }
            if e == 0.0 && a == 1.0 {
                return Ok(self.lambda.ln() + self.family.log_h(0.0));
            }
            return Ok(f64::NEG_INFINITY);
        }
        let y = self.lambda * x;
        let mut out = self.lambda.ln() + self.family.log_pdf(y);
        if a != 1.0 {
            out += a.ln() + (a - 1.0) * self.family.log_cdf(y);
        }
        Ok(out)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.log_pdf(x).map(f64::exp)
    }

    /// `pdf / cdf = shape_exp · λ · r̃(λx)`.
    pub fn reversed_hazard(&self, x: f64) -> Result<f64> {
        let x = check_positive_time(x)?;
        Ok(self.shape_exp * self.lambda * self.family.reversed_hazard(self.lambda * x))
    }

    /// `pdf / survival`; `+∞` once the survival drops below 1e-300.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let x = check_positive_time(x)?;
        let ls = self.log_survival(x)?;
        if ls < HAZARD_UNDERFLOW_LOG_SURVIVAL {
            return Ok(f64::INFINITY);
        }
        Ok((self.log_pdf(x)? - ls).exp())
    }

    /// Inverse CDF at `u`, given as `ln u` and `ln(1 - u)`.
    pub fn quantile_log(&self, ln_u: f64, ln_1mu: f64) -> Result<f64> {
        if !(ln_u < 0.0 && ln_1mu < 0.0) {
            return Err(Error::Domain {
                what: "quantile level must lie strictly inside (0, 1)",
                value: ln_u.exp(),
            });
        }
        // base level u^(1/a)
        let ln_ub = ln_u / self.shape_exp;
        let ln_1mub = (-ln_ub.exp_m1()).ln();
        let ln_1mub = if self.shape_exp == 1.0 {
            ln_1mu
        } else {
            ln_1mub
        };
        Ok(self.family.quantile_log(ln_ub, ln_1mub)? / self.lambda)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.quantile_log(u.ln(), (-u).ln_1p())
    }

    /// Same family and shape, different scale.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.family, lambda, self.shape_exp)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("component serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    lambda: f64,
    #[serde(default)]
    shape_exp: Option<f64>,
}

impl TryFrom<RawComponent> for ComponentSpec {
    type Error = Error;

    fn try_from(raw: RawComponent) -> Result<Self> {
        let family = match (raw.family, raw.p, raw.q, raw.alpha, raw.beta) {
            (FamilyKind::Pgw, Some(p), Some(q), None, None) => BaselineFamily::pgw(p, q)?,
            (FamilyKind::Gg, None, None, Some(a), Some(b)) => BaselineFamily::gg(a, b)?,
            (FamilyKind::Pgw, ..) => {
                return Err(Error::UnsupportedRegime(
                    "pgw components need `p` and `q` and no `alpha`/`beta`".into(),
                ))
            }
            (FamilyKind::Gg, ..) => {
                return Err(Error::UnsupportedRegime(
                    "gg components need `alpha` and `beta` and no `p`/`q`".into(),
                ))
            }
        };
        ComponentSpec::new(family, raw.lambda, raw.shape_exp.unwrap_or(1.0))
    }
}

impl From<ComponentSpec> for RawComponent {
    fn from(c: ComponentSpec) -> Self {
        let (s1, s2) = c.family.shapes();
        let (p, q, alpha, beta) = match c.family.kind() {
            FamilyKind::Pgw => (Some(s1), Some(s2), None, None),
            FamilyKind::Gg => (None, None, Some(s1), Some(s2)),
        };
        RawComponent {
            family: c.family.kind(),
            p,
            q,
            alpha,
            beta,
            lambda: c.lambda,
            shape_exp: Some(c.shape_exp),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{central_difference, relative_difference};
    use crate::quadrature::integrate;

    fn pgw(p: f64, q: f64, lambda: f64, a: f64) -> ComponentSpec {
        ComponentSpec::new(BaselineFamily::pgw(p, q).unwrap(), lambda, a).unwrap()
    }

    fn gg(alpha: f64, beta: f64, lambda: f64, a: f64) -> ComponentSpec {
        ComponentSpec::new(BaselineFamily::gg(alpha, beta).unwrap(), lambda, a).unwrap()
    }

    #[test]
    fn log_hazard_matches_generic_form_in_the_body() {
        let fams = [
            BaselineFamily::pgw(1.5, 0.4).unwrap(),
            BaselineFamily::pgw(0.7, 2.0).unwrap(),
            BaselineFamily::gg(2.0, 1.5).unwrap(),
            BaselineFamily::gg(0.8, 2.5).unwrap(),
        ];
        for fam in &fams {
            for &y in &[1e-3, 0.1, 0.9, 2.0, 4.0] {
                let generic = fam.log_pdf(y) - fam.log_sf(y);
                assert!((fam.log_hazard(y) - generic).abs() < 1e-11, "{fam} at {y}");
            }
        }
    }

    #[test]
    fn log_hazard_deep_tail() {
        // exponential hazard is 1 everywhere
        let e = BaselineFamily::gg(1.0, 1.0).unwrap();
        assert!(e.log_hazard(1e4).abs() < 1e-12);
        // GG(2, 1): asymptotic erfc series, 2y / (1 - 1/(2y²) + 3/(4y⁴) - 15/(8y⁶))
        let g = BaselineFamily::gg(2.0, 1.0).unwrap();
        let y: f64 = 100.0;
        let s = 1.0 - 0.5 / y.powi(2) + 0.75 / y.powi(4) - 1.875 / y.powi(6);
        assert!((g.log_hazard(y) - (2.0 * y / s).ln()).abs() < 1e-13);
        // PGW(2, 0.2) at y = 50: t is about 1e17
        let p = BaselineFamily::pgw(2.0, 0.2).unwrap();
        let want = 10f64.ln() + 50f64.ln() + 4.0 * 2501f64.ln();
        assert!((p.log_hazard(50.0) - want).abs() < 1e-12);
    }

    #[test]
    fn exponential_reductions() {
        let c = pgw(1.0, 1.0, 1.0, 1.0);
        assert!((c.cdf(1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(c.cdf(0.0).unwrap(), 0.0);
        assert!((c.pdf(0.5).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        let want = (-1.0f64).exp() / (1.0 - (-1.0f64).exp());
        assert!(relative_difference(c.reversed_hazard(1.0).unwrap(), want) < 1e-14);
        let g = gg(1.0, 1.0, 1.0, 1.0);
        assert!(relative_difference(g.survival(1.0).unwrap(), (-1.0f64).exp()) < 1e-14);
        for &x in &[0.01, 0.3, 1.0, 4.0, 17.0] {
            let c2 = pgw(1.0, 1.0, 2.0, 1.0);
            assert!(relative_difference(c2.hazard(x).unwrap(), 2.0) < 1e-12);
            let g2 = gg(1.0, 1.0, 2.0, 1.0);
            assert!(relative_difference(g2.hazard(x).unwrap(), 2.0) < 1e-12);
            assert!(relative_difference(g2.cdf(x).unwrap(), c2.cdf(x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn pgw_weibull_cdf_against_density_quadrature() {
        let c = pgw(2.0, 1.0, 0.1, 1.0);
        let closed = c.cdf(1.0).unwrap();
        assert!(relative_difference(closed, -(-0.01f64).exp_m1()) < 1e-14);
        let quad = integrate(|t| c.pdf(t).unwrap(), 0.0, 1.0, 1e-13).unwrap();
        assert!(relative_difference(closed, quad) < 1e-12);
        assert!((closed - 0.009_950_166).abs() < 1e-9);
    }

    #[test]
    fn deep_upper_tail_log_survival() {
        let c = pgw(2.0, 1.0, 9.0, 1.0);
        let want: f64 = -(9.0f64 * 1.9).powi(2);
        assert!(relative_difference(c.log_survival(1.9).unwrap(), want) < 1e-14);
        assert!((want + 292.41).abs() < 1e-10);
        // exponentiated version in the same regime
        let c2 = pgw(2.0, 1.0, 9.0, 2.0);
        let ls2 = c2.log_survival(1.9).unwrap();
        assert!(relative_difference(ls2, want + 2f64.ln()) < 1e-12);
        // moderate x: log path equals direct exponentiation
        let c3 = pgw(1.5, 0.8, 1.0, 2.5);
        let direct = 1.0 - c3.cdf(0.7).unwrap();
        assert!(relative_difference(c3.survival(0.7).unwrap(), direct) < 1e-13);
    }

    #[test]
    fn gg_density_and_finite_difference() {
        let g = gg(2.0, 2.0, 1.0, 1.0);
        let want = 2.0 * (-1.0f64).exp();
        assert!(relative_difference(g.pdf(1.0).unwrap(), want) < 1e-13);
        let fd = central_difference(|x| g.cdf(x).unwrap(), 1.0, 1e-5);
        assert!(relative_difference(fd, want) < 1e-6);
    }

    #[test]
    fn exponentiated_density_chain_rule() {
        let c = pgw(1.0, 1.0, 1.0, 2.0);
        let e1 = (-1.0f64).exp();
        let want = 2.0 * (1.0 - e1) * e1;
        assert!(relative_difference(c.pdf(1.0).unwrap(), want) < 1e-14);
        let fd = central_difference(|x| c.cdf(x).unwrap(), 1.0, 1e-5);
        assert!(relative_difference(fd, want) < 1e-8);
        let c1 = pgw(1.7, 0.6, 1.3, 1.0);
        let c2 = pgw(1.7, 0.6, 1.3, 2.0);
        let r = c2.reversed_hazard(0.9).unwrap() / c1.reversed_hazard(0.9).unwrap();
        assert!((r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn small_x_reversed_hazard_limit() {
        for (c, want) in [
            (pgw(1.7, 0.6, 1.0, 1.0), 1.7),
            (gg(2.0, 0.7, 1.0, 1.0), 0.7),
        ] {
            let x = 1e-8;
            let got = x * c.reversed_hazard(x).unwrap();
            assert!(relative_difference(got, want) < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn hazard_shapes() {
        let ifr = pgw(1.5, 0.8, 1.0, 1.0);
        let mut prev = 0.0;
        for k in 0..200 {
            let x = 0.01 * 1.04f64.powi(k);
            let h = ifr.hazard(x).unwrap();
            assert!(h >= prev);
            prev = h;
        }
        let bathtub = pgw(0.8, 0.4, 1.0, 1.0);
        let xs: Vec<f64> = (0..400)
            .map(|k| 0.01 * (5000f64).powf(k as f64 / 399.0))
            .collect();
        let hs: Vec<f64> = xs.iter().map(|&x| bathtub.hazard(x).unwrap()).collect();
        let argmin = (0..hs.len())
            .min_by(|&i, &j| hs[i].total_cmp(&hs[j]))
            .unwrap();
        assert!(argmin > 0 && argmin < hs.len() - 1);
        assert!(hs[..=argmin].windows(2).all(|w| w[1] <= w[0]));
        assert!(hs[argmin..].windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn hazard_underflow_guard() {
        let c = pgw(2.0, 1.0, 9.0, 1.0);
        assert_eq!(c.hazard(5.0).unwrap(), f64::INFINITY);
        assert!(c.hazard(1.9).unwrap().is_finite());
    }

    #[test]
    fn decomposition_pieces() {
        assert_eq!(BaselineFamily::pgw(2.0, 0.5).unwrap().w_exponent(), 1.0);
        assert_eq!(BaselineFamily::gg(3.0, 1.0).unwrap().w_exponent(), 0.0);
        let g = BaselineFamily::gg(1.0, 1.0).unwrap();
        let p = BaselineFamily::pgw(1.0, 1.0).unwrap();
        for &y in &[0.1, 1.0, 3.0] {
            assert!(relative_difference(g.h(y), (-y).exp()) < 1e-14);
            assert!(relative_difference(p.h(y), (-y).exp()) < 1e-14);
            assert!((g.h_log_derivative(y) + 1.0).abs() < 1e-14);
            assert!((p.h_log_derivative(y) + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let c = pgw(0.7, 0.5, 1.0, 1.0);
        assert!(c.cdf(-1.0).is_err());
        assert!(c.cdf(f64::NAN).is_err());
        assert!(c.pdf(0.0).is_err());
        assert!(c.hazard(0.0).is_err());
        assert!(c.reversed_hazard(0.0).is_err());
        assert_eq!(pgw(1.0, 1.0, 2.0, 1.0).pdf(0.0).unwrap(), 2.0);
        assert!(BaselineFamily::pgw(0.0, 1.0).is_err());
        assert!(BaselineFamily::gg(1.0, f64::INFINITY).is_err());
        assert!(ComponentSpec::new(BaselineFamily::pgw(1.0, 1.0).unwrap(), -1.0, 1.0).is_err());
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let c =
            ComponentSpec::from_json(r#"{"family":"pgw","p":1.5,"q":0.8,"lambda":2.0}"#).unwrap();
        assert_eq!(c.shape_exp(), 1.0);
        let s = c.to_json();
        assert_eq!(
            s,
            r#"{"family":"pgw","p":1.5,"q":0.8,"lambda":2.0,"shape_exp":1.0}"#
        );
        assert_eq!(ComponentSpec::from_json(&s).unwrap(), c);
        let g = gg(2.0, 1.0, 0.1 + 0.2, 1.5);
        assert_eq!(ComponentSpec::from_json(&g.to_json()).unwrap(), g);
        assert!(
            ComponentSpec::from_json(r#"{"family":"pgw","p":1,"q":1,"lambda":1,"x":0}"#).is_err()
        );
        assert!(ComponentSpec::from_json(r#"{"family":"gg","p":1,"q":1,"lambda":1}"#).is_err());
        assert!(ComponentSpec::from_json(r#"{"family":"weibull","lambda":1}"#).is_err());
        assert!(
            ComponentSpec::from_json(r#"{"family":"gg","alpha":1,"beta":-1,"lambda":1}"#).is_err()
        );
    }

    #[test]
    fn quantile_round_trip() {
        let e = pgw(1.0, 1.0, 1.0, 1.0);
        let x = e.quantile(1.0 - (-1.0f64).exp()).unwrap();
        assert!((x - 1.0).abs() < 1e-14);
        for c in [
            pgw(0.7, 0.4, 2.0, 1.0),
            pgw(2.0, 1.0, 0.1, 3.0),
            gg(2.0, 0.6, 1.5, 1.7),
            gg(0.8, 0.8, 1.0, 1.0),
        ] {
            for &u in &[1e-9, 0.001, 0.2, 0.5, 0.9, 0.999_999] {
                let back = c.cdf(c.quantile(u).unwrap()).unwrap();
                assert!((back - u).abs() < 1e-10, "{c:?} u={u} back={back}");
            }
        }
    }
}
