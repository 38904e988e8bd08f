//! Run manifests: what was run, with which seed, and digests of everything it
//! produced.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: u64,
    pub tool_version: &'static str,
    pub wall_time_secs: f64,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, wall_time_secs: f64) -> Self {
        Self {
            command: command.to_owned(),
            arguments: std::env::args().skip(1).collect(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time_secs,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(OutputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization is infallible")
    }
}
