use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::config::write_json;
use crate::error::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one command invocation, written once per output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved settings; usable as a config file for a rerun.
    pub config: serde_json::Value,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn new<C: Serialize>(command: &str, config: &C, seed: u64) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: 0.0,
        })
    }

    pub fn write(mut self, dir: &Path, elapsed: Duration) -> Result<()> {
        self.duration_secs = elapsed.as_secs_f64();
        write_json(&dir.join(MANIFEST_FILE), &self)
    }
}
