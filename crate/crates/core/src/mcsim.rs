//! Monte Carlo cross-check of the analytic system survival.
//!
//! Component lifetimes are drawn by inverse transform and the system
//! lifetime is their maximum. Samples are produced in fixed-size chunks, each
//! from its own random stream, and reduced to per-grid-point exceedance
//! counts, so the result is bit-identical for any number of workers.

use rayon::prelude::*;

use crate::dists::ComponentSpec;
use crate::error::{Error, Result};
use crate::parallel::{CurveKind, EvalGrid, ParallelSystem, SystemCurve};
use crate::rng;

/// Samples per random stream.
pub const CHUNK_SIZE: usize = 65_536;

/// Default number of simulated systems.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub system: ParallelSystem,
    pub n_samples: usize,
    pub seed: u64,
    pub grid: EvalGrid,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl SimConfig {
    pub fn new(system: ParallelSystem, seed: u64) -> Self {
        Self {
            system,
            n_samples: DEFAULT_SAMPLES,
            seed,
            grid: EvalGrid::default(),
            workers: None,
        }
    }
}

/// Inverse-transform draw of one component lifetime from `u ∈ (0, 1)`.
pub fn sample_component(c: &ComponentSpec, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            what: "uniform draw must lie in (0, 1)",
            value: u,
        });
    }
    c.quantile(u)
}

fn chunk_maxima(system: &ParallelSystem, seed: u64, chunk: usize, len: usize) -> Result<Vec<f64>> {
    let mut r = rng::stream(seed, chunk as u64);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let mut m = 0.0f64;
        for c in system.components() {
            m = m.max(sample_component(c, rng::open_unit(&mut r))?);
        }
        out.push(m);
    }
    Ok(out)
}

fn chunk_lengths(n: usize) -> Vec<usize> {
    let full = n / CHUNK_SIZE;
    let mut v = vec![CHUNK_SIZE; full];
    if n % CHUNK_SIZE != 0 {
        v.push(n % CHUNK_SIZE);
    }
    v
}

fn within_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::UnsupportedRegime(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// All simulated system lifetimes, in stream order.
pub fn sample_maxima(cfg: &SimConfig) -> Result<Vec<f64>> {
    let lens = chunk_lengths(cfg.n_samples);
    let chunks = within_pool(cfg.workers, || {
        lens.par_iter()
            .enumerate()
            .map(|(k, &len)| chunk_maxima(&cfg.system, cfg.seed, k, len))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(chunks.concat())
}

/// Empirical survival curve together with its largest deviation from the
/// analytic survival.
#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub curve: SystemCurve,
    pub analytic: Vec<f64>,
    pub sup_gap: f64,
}

/// Empirical `P(max > x)` on the grid, from exceedance counts merged over
/// chunks.
pub fn empirical_survival(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.n_samples == 0 {
        return Err(Error::Empty("sample count"));
    }
    let lens = chunk_lengths(cfg.n_samples);
    let xs = cfg.grid.points();
    let counts = within_pool(cfg.workers, || {
        lens.par_iter()
            .enumerate()
            .map(|(k, &len)| -> Result<Vec<u64>> {
                let mut m = chunk_maxima(&cfg.system, cfg.seed, k, len)?;
                m.sort_by(f64::total_cmp);
                Ok(xs
                    .iter()
                    .map(|&x| (m.len() - m.partition_point(|&v| v <= x)) as u64)
                    .collect::<Vec<u64>>())
            })
            .try_reduce(
                || vec![0u64; xs.len()],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(a, b)| *a += b);
                    Ok(a)
                },
            )
    })??;
    let n = cfg.n_samples as f64;
    let values: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let analytic = xs
        .iter()
        .map(|&x| cfg.system.survival(x))
        .collect::<Result<Vec<_>>>()?;
    let sup_gap = values
        .iter()
        .zip(&analytic)
        .map(|(e, a)| (e - a).abs())
        .fold(0.0, f64::max);
    Ok(SimResult {
        curve: SystemCurve {
            grid: cfg.grid.clone(),
            values,
            kind: CurveKind::Survival,
        },
        analytic,
        sup_gap,
    })
}
