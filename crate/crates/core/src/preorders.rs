//! Majorization, the p-larger order, and weighted means of scale vectors.

use crate::error::{Error, Result};

/// Relative tolerance on the partial-sum and partial-product inequalities.
pub const PREORDER_TOL: f64 = 1e-12;

/// A nonempty vector of positive reals with optional positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
}

fn check_entries(name: &'static str, xs: &[f64]) -> Result<()> {
    for &v in xs {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "entries must be strictly positive and finite",
            });
        }
    }
    Ok(())
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("parameter vector"));
        }
        check_entries("value", &values)?;
        Ok(Self {
            values,
            weights: None,
        })
    }

    pub fn weighted(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: weights.len(),
            });
        }
        check_entries("weight", &weights)?;
        let mut v = Self::new(values)?;
        v.weights = Some(weights);
        Ok(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weights, all ones when none were given.
    pub fn weights(&self) -> Vec<f64> {
        self.weights
            .clone()
            .unwrap_or_else(|| vec![1.0; self.values.len()])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn same_len(x: &ParamVector, y: &ParamVector) -> Result<()> {
    if x.len() == y.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        })
    }
}

fn leq_tol(a: f64, b: f64) -> bool {
    a <= b + PREORDER_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `x ⪰^m y`: every partial sum of the increasing arrangement of `x` is at
/// most that of `y`, and the totals agree.
pub fn majorizes(x: &ParamVector, y: &ParamVector) -> Result<bool> {
    same_len(x, y)?;
    let (xs, ys) = (x.sorted(), y.sorted());
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if !leq_tol(sx, sy) {
            return Ok(false);
        }
    }
    Ok((sx - sy).abs() <= PREORDER_TOL * sx.abs().max(sy.abs()))
}

/// `x ⪰^p y`: every partial product of the increasing arrangement of `x` is
/// at most that of `y` (compared as sums of logarithms).
pub fn p_larger(x: &ParamVector, y: &ParamVector) -> Result<bool> {
    same_len(x, y)?;
    let (xs, ys) = (x.sorted(), y.sorted());
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a.ln();
        sy += b.ln();
        if !leq_tol(sx, sy) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∏ v_i^(w_i / Σw)`.
pub fn weighted_geometric_mean(v: &ParamVector) -> f64 {
    let w = v.weights();
    let total: f64 = w.iter().sum();
    let log_mean: f64 = v
        .values
        .iter()
        .zip(&w)
        .map(|(x, w)| w * x.ln())
        .sum::<f64>()
        / total;
    log_mean.exp()
}

/// Plain (unweighted) arithmetic mean.
pub fn arithmetic_mean(v: &ParamVector) -> f64 {
    v.values.iter().sum::<f64>() / v.len() as f64
}
