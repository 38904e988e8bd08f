//! `stochorder`: stochastic-order verdicts, hazard bounds and Monte Carlo
//! checks for parallel systems, from the command line.
//!
//! Exit status: 0 when the run succeeds and any checked order holds, 3 when
//! a checked order or assumption fails, 2 on bad input.

mod commands;
mod error;
mod input;
mod manifest;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use stochorder::ordercheck::Order;

use crate::commands::{OrderQuery, Output, Target};
use crate::error::{CliError, Result};
use crate::input::{FamilyArg, GridSpec};
use crate::manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(
    version,
    about = "Stochastic orders, hazard bounds and simulation for parallel systems"
)]
struct Cli {
    /// Random seed for sweeps and simulation.
    #[arg(long, global = true, env = "STOCHORDER_SEED")]
    seed: Option<u64>,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Where to write the run manifest. Defaults to `<first output>.manifest.json`,
    /// or stderr when the run writes no files.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check whether system A dominates system B in the given order.
    Compare {
        #[arg(long)]
        sys_a: PathBuf,
        #[arg(long)]
        sys_b: PathBuf,
        #[arg(long, default_value = "hr")]
        order: Order,
        /// `log:LO:HI:N` or `lin:LO:HI:N`.
        #[arg(long)]
        grid: Option<GridSpec>,
    },
    /// Hazard bound from the homogeneous reference system, as CSV.
    Bounds {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid: Option<GridSpec>,
    },
    /// Audit a baseline family's assumptions and identity residuals.
    Verify {
        /// `pgw:P,Q` or `gg:ALPHA,BETA`.
        #[arg(long)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Preorder checks on parameter vectors.
    Order {
        #[command(subcommand)]
        query: OrderCmd,
    },
    /// Monte Carlo survival curve of a system.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a worked example or run a theorem sweep.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        /// Directory for CSV and JSON outputs.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Trials per sweep.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        grid: Option<GridSpec>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug, Clone)]
enum OrderCmd {
    /// Whether x majorizes y.
    Majorizes {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<f64>,
    },
    /// Whether x is p-larger than y.
    PLarger {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<f64>,
    },
    /// Arithmetic and weighted geometric means.
    Means {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Compare { .. } => "compare",
            Command::Bounds { .. } => "bounds",
            Command::Verify { .. } => "verify",
            Command::Order { .. } => "order",
            Command::Simulate { .. } => "simulate",
            Command::Reproduce { .. } => "reproduce",
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(Output, u64)> {
    let seed = cli.seed.unwrap_or(0);
    let out = match &cli.command {
        Command::Compare {
            sys_a,
            sys_b,
            order,
            grid,
        } => commands::compare(sys_a, sys_b, *order, grid)?,
        Command::Bounds { system, out, grid } => commands::bounds(system, out.as_deref(), grid)?,
        Command::Verify { family, report } => {
            commands::verify(*family, *report == ReportFormat::Json)?
        }
        Command::Order { query } => commands::order(match query.clone() {
            OrderCmd::Majorizes { x, y } => OrderQuery::Majorizes { x, y },
            OrderCmd::PLarger { x, y } => OrderQuery::PLarger { x, y },
            OrderCmd::Means { x, weights } => OrderQuery::Means { x, weights },
        })?,
        Command::Simulate { config, out } => {
            return commands::simulate(config, out.as_deref(), cli.seed, cli.threads);
        }
        Command::Reproduce {
            target,
            out_dir,
            trials,
            grid,
        } => commands::reproduce(
            *target,
            out_dir,
            seed,
            commands::positive_trials(*trials)?,
            grid,
        )?,
    };
    Ok((out, seed))
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_owned(),
            source,
        })?;
    }
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn run(cli: &Cli) -> Result<i32> {
    let start = Instant::now();
    if let Some(n) = cli.threads {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let (out, seed) = dispatch(cli)?;
    let mut manifest = RunManifest::new(cli.command.name(), seed, 0.0);
    for (path, bytes) in &out.files {
        write_file(path, bytes)?;
        manifest.record(path, bytes);
    }
    if !out.stdout.is_empty() {
        manifest.record("<stdout>".as_ref(), out.stdout.as_bytes());
    }
    manifest.wall_time_secs = start.elapsed().as_secs_f64();
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let target = cli
        .manifest
        .clone()
        .or_else(|| out.files.first().map(|(p, _)| manifest_path(p)));
    match target {
        Some(p) => write_file(&p, manifest.to_json().as_bytes())?,
        None => {
            let _ = writeln!(std::io::stderr(), "{}", manifest.to_json());
        }
    }
    Ok(out.code)
}

fn manifest_path(output: &std::path::Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
