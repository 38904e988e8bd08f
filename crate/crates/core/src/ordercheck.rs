//! Grid-based verdicts for the usual stochastic order and the hazard rate
//! order between two parallel systems, plus harnesses that pit the
//! scale-comparison criteria against both verdicts.

use rayon::prelude::*;
use serde::Serialize;

use crate::dists::{BaselineFamily, FamilyKind};
use crate::error::{Error, Result};
use crate::identities::{sample_gg_shapes, sample_pgw_shapes};
use crate::parallel::{EvalGrid, ParallelSystem};
use crate::preorders::{p_larger, weighted_geometric_mean, ParamVector, PREORDER_TOL};
use crate::rng;

/// Relative slack of the usual stochastic order check.
pub const ST_SLACK: f64 = 1e-12;
/// Relative slack of the hazard rate order check.
pub const HR_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Hr,
    St,
}

impl std::str::FromStr for Order {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hr" => Ok(Order::Hr),
            "st" => Ok(Order::St),
            other => Err(format!("unknown order `{other}` (expected hr or st)")),
        }
    }
}

/// Outcome of an order check of `A` over `B` on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub order: Order,
    pub holds: bool,
    /// First grid location where the order is violated.
    pub witness_x: Option<f64>,
    /// Worst signed slack, normalized by the local log-probability scale.
    pub margin: f64,
}

fn curves(s: &ParallelSystem, xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let pairs = xs
        .par_iter()
        .map(|&x| Ok((s.log_cdf(x)?, s.log_survival(x)?)))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok(pairs.into_iter().unzip())
}

// (b - a) / max(1, |b|), with matching infinities treated as equal.
fn slack(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (b - a) / b.abs().max(a.abs()).max(1.0)
}

/// `A ≥_st B`: `ln F_A ≤ ln F_B` and `ln F̄_A ≥ ln F̄_B` at every grid point,
/// each within relative slack 1e-12. Comparing both logs keeps violations
/// visible in either tail.
pub fn check_st(a: &ParallelSystem, b: &ParallelSystem, grid: &EvalGrid) -> Result<OrderVerdict> {
    let xs = grid.points();
    let (lfa, lsa) = curves(a, xs)?;
    let (lfb, lsb) = curves(b, xs)?;
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for k in 0..xs.len() {
        let m = slack(lfa[k], lfb[k]).min(slack(lsb[k], lsa[k]));
        margin = margin.min(m);
        if witness.is_none() && m < -ST_SLACK {
            witness = Some(xs[k]);
        }
    }
    Ok(OrderVerdict {
        order: Order::St,
        holds: witness.is_none(),
        witness_x: witness,
        margin,
    })
}

/// `A ≥_hr B`: `ln F̄_A - ln F̄_B` nondecreasing along the grid (anchored at
/// its value 0 at x = 0), within relative slack 1e-10. A candidate decrease
/// is re-examined on a 4x finer local grid before it counts.
pub fn check_hr(a: &ParallelSystem, b: &ParallelSystem, grid: &EvalGrid) -> Result<OrderVerdict> {
    let mut xs = vec![0.0];
    xs.extend_from_slice(grid.points());
    let (_, lsa) = curves(a, &xs)?;
    let (_, lsb) = curves(b, &xs)?;
    let increment = |la0: f64, lb0: f64, la1: f64, lb1: f64| -> f64 {
        let d = (la1 - lb1) - (la0 - lb0);
        if d == 0.0 || d.is_nan() {
            return 0.0;
        }
        let scale = la0.abs().max(lb0.abs()).max(la1.abs()).max(lb1.abs());
        d / scale
    };
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for k in 1..xs.len() {
        let m = increment(lsa[k - 1], lsb[k - 1], lsa[k], lsb[k]);
        margin = margin.min(m);
        if witness.is_some() || m >= -HR_SLACK {
            continue;
        }
        // Refine: five points spanning [x_{k-1}, x_k].
        let (lo, hi) = (xs[k - 1], xs[k]);
        let sub: Vec<f64> = (0..=4).map(|j| lo + (hi - lo) * j as f64 / 4.0).collect();
        let (_, sa) = curves(a, &sub)?;
        let (_, sb) = curves(b, &sub)?;
        for j in 1..sub.len() {
            let mj = increment(sa[j - 1], sb[j - 1], sa[j], sb[j]);
            if mj < -HR_SLACK {
                witness = Some(sub[j]);
                break;
            }
        }
    }
    Ok(OrderVerdict {
        order: Order::Hr,
        holds: witness.is_none(),
        witness_x: witness,
        margin,
    })
}

/// Dispatches on `order`.
pub fn check_order(
    order: Order,
    a: &ParallelSystem,
    b: &ParallelSystem,
    grid: &EvalGrid,
) -> Result<OrderVerdict> {
    match order {
        Order::Hr => check_hr(a, b, grid),
        Order::St => check_st(a, b, grid),
    }
}

/// Grid used by the theorem harnesses: the default grid plus 600 log-spaced
/// points on `[1e-12, 1e-3)`. When the two scale summaries nearly coincide,
/// the order is only violated very close to zero.
pub fn harness_grid() -> EvalGrid {
    let tail = EvalGrid::log_spaced(1e-12, 1e-3, 600).expect("valid tail grid");
    EvalGrid::default().merged(&tail)
}

/// The three statements of an equivalence theorem for one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HarnessOutcome {
    /// The scale-comparison criterion.
    pub cond_i: bool,
    /// Hazard rate order verdict.
    pub cond_ii: bool,
    /// Usual stochastic order verdict.
    pub cond_iii: bool,
    pub hr: OrderVerdict,
    pub st: OrderVerdict,
}

impl HarnessOutcome {
    pub fn agree(&self) -> bool {
        self.cond_i == self.cond_ii && self.cond_ii == self.cond_iii
    }
}

fn geq_tol(a: f64, b: f64) -> bool {
    a >= b * (1.0 - PREORDER_TOL)
}

fn run_pair(
    cond_i: bool,
    x: &ParallelSystem,
    y: &ParallelSystem,
    grid: &EvalGrid,
) -> Result<HarnessOutcome> {
    let hr = check_hr(x, y, grid)?;
    let st = check_st(x, y, grid)?;
    Ok(HarnessOutcome {
        cond_i,
        cond_ii: hr.holds,
        cond_iii: st.holds,
        hr,
        st,
    })
}

/// PGW(p, q) components at `lambdas` against `n` copies at `lambda_hom`:
/// (i) `lambda_hom ≥ gm(lambdas)`, (ii) hr, (iii) st.
pub fn theorem31_harness(
    p: f64,
    q: f64,
    lambdas: &[f64],
    lambda_hom: f64,
    grid: &EvalGrid,
) -> Result<HarnessOutcome> {
    if !(q <= 1.0) {
        return Err(Error::UnsupportedRegime(format!("q = {q} exceeds 1")));
    }
    let fam = BaselineFamily::pgw(p, q)?;
    let gm = weighted_geometric_mean(&ParamVector::new(lambdas.to_vec())?);
    let x = ParallelSystem::scale_model(fam, lambdas)?;
    let y = ParallelSystem::scale_model(fam, &vec![lambda_hom; lambdas.len()])?;
    run_pair(geq_tol(lambda_hom, gm), &x, &y, grid)
}

/// EGG components (GG(α, β) with exponents `gammas`) at `lambdas` against
/// the same exponents at `lambda_hom`; (i) compares with the γ-weighted
/// geometric mean.
pub fn theorem32_harness(
    alpha: f64,
    beta: f64,
    gammas: &[f64],
    lambdas: &[f64],
    lambda_hom: f64,
    grid: &EvalGrid,
) -> Result<HarnessOutcome> {
    if !(alpha >= beta) {
        return Err(Error::UnsupportedRegime(format!(
            "alpha = {alpha} < beta = {beta}"
        )));
    }
    if let Some(g) = gammas.iter().find(|&&g| !(g >= 1.0)) {
        return Err(Error::UnsupportedRegime(format!("exponent {g} < 1")));
    }
    let fam = BaselineFamily::gg(alpha, beta)?;
    let wg = weighted_geometric_mean(&ParamVector::weighted(lambdas.to_vec(), gammas.to_vec())?);
    let x = ParallelSystem::from_scales(fam, lambdas, gammas)?;
    let y = ParallelSystem::from_scales(fam, &vec![lambda_hom; lambdas.len()], gammas)?;
    run_pair(geq_tol(lambda_hom, wg), &x, &y, grid)
}

/// Two-block ("multiple-outlier") comparison: `n1` components at `lambda1`
/// and `n2` at `lambda2` against `n1` at `mu1` and `n2` at `mu2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultipleOutlierSpec {
    #[serde(skip)]
    pub family: BaselineFamily,
    pub n1: usize,
    pub n2: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl MultipleOutlierSpec {
    /// Whether `lambda1 ≤ mu1 ≤ mu2 ≤ lambda2`.
    pub fn in_regime(&self) -> bool {
        self.lambda1 <= self.mu1 && self.mu1 <= self.mu2 && self.mu2 <= self.lambda2
    }

    pub fn lambda_vector(&self) -> Vec<f64> {
        block(self.lambda1, self.n1, self.lambda2, self.n2)
    }

    pub fn mu_vector(&self) -> Vec<f64> {
        block(self.mu1, self.n1, self.mu2, self.n2)
    }
}

fn block(a: f64, na: usize, b: f64, nb: usize) -> Vec<f64> {
    let mut v = vec![a; na];
    v.extend(std::iter::repeat(b).take(nb));
    v
}

/// Family restriction of the two-block theorem: PGW with `q ≤ 1`, or
/// GG(α, qα) with `q ≤ 1`.
fn check_outlier_family(fam: &BaselineFamily) -> Result<()> {
    let (s1, s2) = fam.shapes();
    let ok = match fam.kind() {
        FamilyKind::Pgw => s2 <= 1.0,
        FamilyKind::Gg => s2 <= s1,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedRegime(format!(
            "{fam} is outside the two-block theorem"
        )))
    }
}

/// (i) p-larger comparison of the block scale vectors, (ii) hr, (iii) st.
/// Regime violations are reported as errors.
pub fn theorem42_harness(spec: &MultipleOutlierSpec, grid: &EvalGrid) -> Result<HarnessOutcome> {
    check_outlier_family(&spec.family)?;
    if spec.n1 == 0 || spec.n2 == 0 {
        return Err(Error::Empty("outlier block"));
    }
    if !spec.in_regime() {
        return Err(Error::UnsupportedRegime(format!(
            "need lambda1 <= mu1 <= mu2 <= lambda2, got {} {} {} {}",
            spec.lambda1, spec.mu1, spec.mu2, spec.lambda2
        )));
    }
    let lv = spec.lambda_vector();
    let mv = spec.mu_vector();
    let cond_i = p_larger(
        &ParamVector::new(lv.clone())?,
        &ParamVector::new(mv.clone())?,
    )?;
    let x = ParallelSystem::scale_model(spec.family, &lv)?;
    let y = ParallelSystem::scale_model(spec.family, &mv)?;
    run_pair(cond_i, &x, &y, grid)
}

/// Result of a harness sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub trials: usize,
    pub disagreements: usize,
    pub holds_count: usize,
    pub outcomes: Vec<HarnessOutcome>,
}

fn report(outcomes: Vec<HarnessOutcome>) -> SweepReport {
    SweepReport {
        trials: outcomes.len(),
        disagreements: outcomes.iter().filter(|o| !o.agree()).count(),
        holds_count: outcomes.iter().filter(|o| o.cond_i).count(),
        outcomes,
    }
}

/// Random configuration for [`theorem31_harness`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem31Config {
    pub p: f64,
    pub q: f64,
    pub lambdas: Vec<f64>,
    pub lambda_hom: f64,
}

/// Trial `index` of the PGW sweep under `seed`.
pub fn theorem31_config(seed: u64, index: u64) -> Theorem31Config {
    let mut r = rng::stream(seed, index);
    let (p, q) = sample_pgw_shapes(&mut r);
    let n = rng::int_inclusive(&mut r, 2, 6);
    let lambdas: Vec<f64> = (0..n)
        .map(|_| rng::log_uniform(&mut r, 0.1, 10.0))
        .collect();
    let gm = weighted_geometric_mean(&ParamVector::new(lambdas.clone()).expect("positive draws"));
    let lambda_hom = gm * rng::log_uniform(&mut r, 0.5, 2.0);
    Theorem31Config {
        p,
        q,
        lambdas,
        lambda_hom,
    }
}

pub fn theorem31_sweep(seed: u64, trials: usize, grid: &EvalGrid) -> Result<SweepReport> {
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let c = theorem31_config(seed, k);
            theorem31_harness(c.p, c.q, &c.lambdas, c.lambda_hom, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(outcomes))
}

/// Random configuration for [`theorem32_harness`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem32Config {
    pub alpha: f64,
    pub beta: f64,
    pub gammas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub lambda_hom: f64,
}

pub fn theorem32_config(seed: u64, index: u64) -> Theorem32Config {
    let mut r = rng::stream(seed, index);
    let (alpha, beta) = sample_gg_shapes(&mut r);
    let n = rng::int_inclusive(&mut r, 2, 6);
    let lambdas: Vec<f64> = (0..n)
        .map(|_| rng::log_uniform(&mut r, 0.1, 10.0))
        .collect();
    let gammas: Vec<f64> = (0..n).map(|_| rng::uniform(&mut r, 1.0, 3.0)).collect();
    let wg = weighted_geometric_mean(
        &ParamVector::weighted(lambdas.clone(), gammas.clone()).expect("positive draws"),
    );
    let lambda_hom = wg * rng::log_uniform(&mut r, 0.5, 2.0);
    Theorem32Config {
        alpha,
        beta,
        gammas,
        lambdas,
        lambda_hom,
    }
}

pub fn theorem32_sweep(seed: u64, trials: usize, grid: &EvalGrid) -> Result<SweepReport> {
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let c = theorem32_config(seed, k);
            theorem32_harness(c.alpha, c.beta, &c.gammas, &c.lambdas, c.lambda_hom, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(outcomes))
}

/// Trial `index` of the two-block sweep for `kind`: block sizes in `1..=4`,
/// four sorted log-uniform scales on `[0.1, 10]`.
pub fn theorem42_config(kind: FamilyKind, seed: u64, index: u64) -> Result<MultipleOutlierSpec> {
    let mut r = rng::stream(seed, index);
    let family = match kind {
        FamilyKind::Pgw => {
            let (p, q) = sample_pgw_shapes(&mut r);
            BaselineFamily::pgw(p, q)?
        }
        FamilyKind::Gg => {
            let alpha = rng::uniform(&mut r, 0.5, 3.0);
            let q = rng::uniform(&mut r, 0.2, 1.0);
            BaselineFamily::gg(alpha, q * alpha)?
        }
    };
    let n1 = rng::int_inclusive(&mut r, 1, 4);
    let n2 = rng::int_inclusive(&mut r, 1, 4);
    let mut s: Vec<f64> = (0..4)
        .map(|_| rng::log_uniform(&mut r, 0.1, 10.0))
        .collect();
    s.sort_by(f64::total_cmp);
    Ok(MultipleOutlierSpec {
        family,
        n1,
        n2,
        lambda1: s[0],
        mu1: s[1],
        mu2: s[2],
        lambda2: s[3],
    })
}

pub fn theorem42_sweep(
    kind: FamilyKind,
    seed: u64,
    trials: usize,
    grid: &EvalGrid,
) -> Result<SweepReport> {
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|k| theorem42_harness(&theorem42_config(kind, seed, k)?, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(report(outcomes))
}

/// The two PGW(2, 1) systems of the non-monotone counterexample:
/// scales (0.1, 1, 9) and (0.1, 4, 6).
pub fn example41_systems() -> (ParallelSystem, ParallelSystem) {
    let fam = BaselineFamily::pgw(2.0, 1.0).expect("valid shapes");
    (
        ParallelSystem::scale_model(fam, &[0.1, 1.0, 9.0]).expect("valid system"),
        ParallelSystem::scale_model(fam, &[0.1, 4.0, 6.0]).expect("valid system"),
    )
}

/// Points at which the counterexample's survival ratio is reported.
pub const EXAMPLE41_POINTS: [f64; 3] = [0.8, 1.0, 1.9];

/// Survival ratios `F̄_X / F̄_Y` of the counterexample at 0.8, 1.0 and 1.9.
pub fn example41_ratios() -> [f64; 3] {
    let (x, y) = example41_systems();
    EXAMPLE41_POINTS.map(|t| (x.log_survival(t).unwrap() - y.log_survival(t).unwrap()).exp())
}

/// `F_A(x) / F_B(x)`; near zero it tends to the product of scale ratios
/// raised to `a_i (1 + w'(1))`.
pub fn cdf_ratio(a: &ParallelSystem, b: &ParallelSystem, x: f64) -> Result<f64> {
    Ok((a.log_cdf(x)? - b.log_cdf(x)?).exp())
}
