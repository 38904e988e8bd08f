//! Parsing of command-line values and input files.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer};
use stochorder::dists::BaselineFamily;
use stochorder::parallel::{EvalGrid, ParallelSystem};

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Parses a JSON file, reporting the position of the first error.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })
}

// serde_json appends " at line L column C"; the position is reported separately
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(k) => msg[..k].to_owned(),
        None => msg.to_owned(),
    }
}

pub fn read_system(path: &Path) -> Result<ParallelSystem> {
    read_json(path)
}

/// Grid written as `log:LO:HI:N` or `lin:LO:HI:N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    log: bool,
    lo: f64,
    hi: f64,
    n: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<EvalGrid> {
        let g = if self.log {
            EvalGrid::log_spaced(self.lo, self.hi, self.n)
        } else {
            EvalGrid::linear(self.lo, self.hi, self.n)
        };
        Ok(g?)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, lo, hi, n] = parts[..] else {
            return Err(format!("expected log:LO:HI:N or lin:LO:HI:N, got `{s}`"));
        };
        let log = match kind {
            "log" => true,
            "lin" => false,
            other => return Err(format!("unknown grid spacing `{other}`")),
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|e| format!("bad grid bound `{v}`: {e}"))
        };
        Ok(Self {
            log,
            lo: num(lo)?,
            hi: num(hi)?,
            n: n.parse().map_err(|e| format!("bad grid size `{n}`: {e}"))?,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.log { "log" } else { "lin" };
        write!(f, "{kind}:{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Grid from an optional spec, falling back to the library default.
pub fn grid_or_default(spec: &Option<GridSpec>) -> Result<EvalGrid> {
    spec.as_ref()
        .map_or_else(|| Ok(EvalGrid::default()), GridSpec::build)
}

/// Baseline family written as `pgw:P,Q` or `gg:ALPHA,BETA`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyArg(pub BaselineFamily);

impl FromStr for FamilyArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected pgw:P,Q or gg:ALPHA,BETA, got `{s}`"))?;
        let (a, b) = rest
            .split_once(',')
            .ok_or_else(|| format!("expected two shape parameters, got `{rest}`"))?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad shape `{v}`: {e}"))
        };
        let (a, b) = (num(a)?, num(b)?);
        let fam = match kind {
            "pgw" => BaselineFamily::pgw(a, b),
            "gg" => BaselineFamily::gg(a, b),
            other => return Err(format!("unknown family `{other}`")),
        };
        fam.map(FamilyArg).map_err(|e| e.to_string())
    }
}
