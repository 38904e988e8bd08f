//! One function per subcommand. Each returns what it produced; writing files,
//! printing and the manifest are handled by the caller.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stochorder::bounds::{
    example31_grid, BoundCurve, MeanComparison, EXAMPLE31_LAMBDAS, EXAMPLE31_SHAPES,
};
use stochorder::dists::FamilyKind;
use stochorder::identities::{audit, identity_e4, identity_e6, AssumptionReport};
use stochorder::mcsim::{empirical_survival, SimConfig, DEFAULT_SAMPLES};
use stochorder::ordercheck::{
    check_hr, check_order, example41_ratios, example41_systems, harness_grid, theorem31_sweep,
    theorem32_sweep, theorem42_sweep, Order, SweepReport, EXAMPLE41_POINTS,
};
use stochorder::parallel::{fmt_num, EvalGrid, ParallelSystem};
use stochorder::preorders::{
    arithmetic_mean, majorizes, p_larger, weighted_geometric_mean, ParamVector,
};

use crate::error::{exit, CliError, Result};
use crate::input::{grid_or_default, read_json, read_system, FamilyArg, GridSpec};

/// Everything a command produced.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub code: i32,
}

impl Output {
    fn file(&mut self, path: PathBuf, contents: String) {
        self.files.push((path, contents.into_bytes()));
    }

    /// Sends `text` to `path` when given, otherwise to stdout.
    fn emit(&mut self, path: Option<&Path>, text: String) {
        match path {
            Some(p) => self.file(p.to_owned(), text),
            None => self.stdout.push_str(&text),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialization is infallible");
    s.push('\n');
    s
}

pub fn compare(
    sys_a: &Path,
    sys_b: &Path,
    order: Order,
    grid: &Option<GridSpec>,
) -> Result<Output> {
    let (a, b) = (read_system(sys_a)?, read_system(sys_b)?);
    let verdict = check_order(order, &a, &b, &grid_or_default(grid)?)?;
    let mut out = Output {
        stdout: to_json(&verdict),
        ..Output::default()
    };
    if !verdict.holds {
        out.code = exit::ORDER_FAILS;
        if let Some(x) = verdict.witness_x {
            let _ = writeln!(out.stderr, "order fails at x = {}", fmt_num(x));
        }
    }
    Ok(out)
}

pub fn bounds(system: &Path, out_path: Option<&Path>, grid: &Option<GridSpec>) -> Result<Output> {
    let sys = read_system(system)?;
    let curve = BoundCurve::hazard(&sys, &grid_or_default(grid)?)?;
    let mut out = Output::default();
    if !curve.supported {
        out.stderr
            .push_str("unsupported regime: the bound is not guaranteed for this system\n");
    }
    out.emit(out_path, curve.to_csv());
    if out_path.is_some() {
        let _ = writeln!(
            out.stdout,
            "min relative slack {} ({})",
            fmt_num(curve.min_relative_slack()),
            if curve.supported {
                "supported regime"
            } else {
                "unsupported regime"
            }
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerifyReport {
    family: String,
    assumptions: AssumptionReport,
    /// Largest residual of the integral representation of `y r̃(y)`.
    integral_identity_max_residual: f64,
    /// Largest residual of the differential identity for `(y r̃)'`.
    derivative_identity_max_residual: f64,
}

pub fn verify(family: FamilyArg, json: bool) -> Result<Output> {
    let fam = family.0;
    let ys = EvalGrid::log_spaced(0.01, 10.0, 60)?;
    let (mut e4, mut e6) = (0.0f64, 0.0f64);
    for &y in ys.points() {
        e4 = e4.max(identity_e4(&fam, y)?);
        e6 = e6.max(identity_e6(&fam, y)?);
    }
    let report = VerifyReport {
        family: fam.to_string(),
        assumptions: audit(&fam),
        integral_identity_max_residual: e4,
        derivative_identity_max_residual: e6,
    };
    let mut out = Output::default();
    if json {
        out.stdout = to_json(&report);
    } else {
        let a = &report.assumptions;
        let mut s = String::new();
        let _ = writeln!(s, "{}", report.family);
        for (name, ok) in [
            ("a", a.assumption_a),
            ("b", a.assumption_b),
            ("c", a.assumption_c),
        ] {
            let _ = writeln!(
                s,
                "  assumption ({name}): {}",
                if ok { "holds" } else { "fails" }
            );
        }
        if let Some(v) = a.first_violation {
            let _ = writeln!(
                s,
                "  first violation: ({:?}) at x = {}",
                v.which,
                fmt_num(v.x)
            );
        }
        let _ = writeln!(s, "  integral identity max residual {}", fmt_num(e4));
        let _ = writeln!(s, "  derivative identity max residual {}", fmt_num(e6));
        out.stdout = s;
    }
    if !report.assumptions.all_hold() {
        out.code = exit::ORDER_FAILS;
    }
    Ok(out)
}

pub enum OrderQuery {
    Majorizes {
        x: Vec<f64>,
        y: Vec<f64>,
    },
    PLarger {
        x: Vec<f64>,
        y: Vec<f64>,
    },
    Means {
        x: Vec<f64>,
        weights: Option<Vec<f64>>,
    },
}

pub fn order(q: OrderQuery) -> Result<Output> {
    let mut out = Output::default();
    let verdict = |holds: bool, out: &mut Output| {
        out.stdout = format!("{holds}\n");
        if !holds {
            out.code = exit::ORDER_FAILS;
        }
    };
    match q {
        OrderQuery::Majorizes { x, y } => {
            verdict(
                majorizes(&ParamVector::new(x)?, &ParamVector::new(y)?)?,
                &mut out,
            );
        }
        OrderQuery::PLarger { x, y } => {
            verdict(
                p_larger(&ParamVector::new(x)?, &ParamVector::new(y)?)?,
                &mut out,
            );
        }
        OrderQuery::Means { x, weights } => {
            let v = match weights {
                Some(w) => ParamVector::weighted(x, w)?,
                None => ParamVector::new(x)?,
            };
            out.stdout = format!(
                "arithmetic {}\ngeometric {}\n",
                fmt_num(arithmetic_mean(&v)),
                fmt_num(weighted_geometric_mean(&v))
            );
        }
    }
    Ok(out)
}

/// Contents of a `simulate --config` file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimFile {
    pub system: ParallelSystem,
    #[serde(default)]
    pub n_samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

/// Seeds given on the command line or in the environment win over the file.
pub fn simulate(
    config: &Path,
    out_path: Option<&Path>,
    seed: Option<u64>,
    workers: Option<usize>,
) -> Result<(Output, u64)> {
    let file: SimFile = read_json(config)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let mut cfg = SimConfig::new(file.system, seed);
    cfg.n_samples = file.n_samples.unwrap_or(DEFAULT_SAMPLES);
    cfg.grid = grid_or_default(&file.grid)?;
    cfg.workers = workers;
    let res = empirical_survival(&cfg)?;
    let mut csv = String::from("x,empirical,analytic\n");
    for ((x, e), a) in cfg
        .grid
        .points()
        .iter()
        .zip(&res.curve.values)
        .zip(&res.analytic)
    {
        let _ = writeln!(csv, "{},{},{}", fmt_num(*x), fmt_num(*e), fmt_num(*a));
    }
    let mut out = Output::default();
    out.emit(out_path, csv);
    let summary = format!(
        "samples {} seed {seed} sup gap {}\n",
        cfg.n_samples,
        fmt_num(res.sup_gap)
    );
    if out_path.is_some() {
        out.stdout.push_str(&summary);
    } else {
        out.stderr.push_str(&summary);
    }
    Ok((out, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    /// Non-monotone survival ratio of two PGW(2, 1) systems.
    #[value(name = "example-4.1")]
    Counterexample,
    /// Hazard curves against the geometric and arithmetic mean bounds.
    #[value(name = "example-3.1")]
    DesignExample,
    /// PGW scale-comparison sweep.
    #[value(name = "theorem-3.1")]
    PgwSweep,
    /// Exponentiated GG sweep.
    #[value(name = "theorem-3.2")]
    EggSweep,
    /// Two-block multiple-outlier sweeps, PGW and GG.
    #[value(name = "theorem-4.2")]
    TwoBlockSweep,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    family: &'a str,
    trials: usize,
    disagreements: usize,
    holds_count: usize,
}

fn summarize<'a>(family: &'a str, r: &SweepReport) -> SweepSummary<'a> {
    SweepSummary {
        family,
        trials: r.trials,
        disagreements: r.disagreements,
        holds_count: r.holds_count,
    }
}

pub fn reproduce(
    target: Target,
    out_dir: &Path,
    seed: u64,
    trials: usize,
    grid: &Option<GridSpec>,
) -> Result<Output> {
    let mut out = Output::default();
    match target {
        Target::Counterexample => {
            let ratios = example41_ratios();
            for (x, r) in EXAMPLE41_POINTS.iter().zip(ratios) {
                let _ = writeln!(out.stdout, "survival ratio at x = {x}: {r:.6}");
            }
            let (a, b) = example41_systems();
            let grid = match grid {
                Some(g) => g.build()?,
                None => EvalGrid::log_spaced(0.01, 20.0, 2000)?,
            };
            let hr = check_hr(&a, &b, &grid)?;
            match hr.witness_x {
                Some(x) => {
                    let _ = writeln!(
                        out.stdout,
                        "ratio is not monotone: hazard rate order fails at x = {x:.6}"
                    );
                }
                None => out
                    .stdout
                    .push_str("ratio is monotone on the grid: hazard rate order holds\n"),
            }
        }
        Target::DesignExample => {
            let g = match grid {
                Some(g) => g.build()?,
                None => example31_grid(),
            };
            for (p, q) in EXAMPLE31_SHAPES {
                let cmp = MeanComparison::pgw(p, q, &EXAMPLE31_LAMBDAS, &g)?;
                let path = out_dir.join(format!("hazard_pgw_p{p}_q{q}.csv"));
                let _ = writeln!(
                    out.stdout,
                    "PGW(p={p}, q={q}): am {:.4} gm {:.4}, min relative slack {} -> {}",
                    cmp.am,
                    cmp.gm,
                    fmt_num(cmp.min_relative_slack()),
                    path.display()
                );
                out.file(path, cmp.to_csv());
            }
        }
        Target::PgwSweep | Target::EggSweep | Target::TwoBlockSweep => {
            let g = match grid {
                Some(g) => g.build()?,
                None => harness_grid(),
            };
            let reports: Vec<(&str, SweepReport)> = match target {
                Target::PgwSweep => vec![("pgw", theorem31_sweep(seed, trials, &g)?)],
                Target::EggSweep => vec![("gg", theorem32_sweep(seed, trials, &g)?)],
                _ => vec![
                    ("pgw", theorem42_sweep(FamilyKind::Pgw, seed, trials, &g)?),
                    ("gg", theorem42_sweep(FamilyKind::Gg, seed, trials, &g)?),
                ],
            };
            let summaries: Vec<SweepSummary> =
                reports.iter().map(|(f, r)| summarize(f, r)).collect();
            out.stdout = to_json(&summaries);
            if reports.iter().any(|(_, r)| r.disagreements > 0) {
                out.code = exit::ORDER_FAILS;
            }
            let detail: Vec<&SweepReport> = reports.iter().map(|(_, r)| r).collect();
            out.file(out_dir.join("sweep_outcomes.json"), to_json(&detail));
        }
    }
    Ok(out)
}

/// Fails with a usage error unless `n` is positive.
pub fn positive_trials(n: usize) -> Result<usize> {
    if n == 0 {
        Err(CliError::Usage("--trials must be at least 1".into()))
    } else {
        Ok(n)
    }
}
