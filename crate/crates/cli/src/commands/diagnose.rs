use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use asbm_core::diagnostics::{diagnose, DiagnoseOptions, Diagnosis, RHAT_THRESHOLD};
use asbm_core::generators::{read_labels, write_labels};
use asbm_core::samplers::trace::META_FILE;
use asbm_core::ChainTrace;
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::{create_dir, merge, output_dir, write_json};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

pub const REPORT_FILE: &str = "report.json";
pub const PSM_FILE: &str = "psm.csv";
pub const P_HAT_FILE: &str = "p_hat.csv";
pub const PARTITION_FILE: &str = "partition.csv";

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseArgs {
    /// Chain directories, or a fit output directory holding `chain-*`.
    #[arg(long, num_args = 1..)]
    pub traces: Option<Vec<PathBuf>>,
    /// Ground-truth labels (`node,label` CSV).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Random restarts of the point-estimate search.
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit with status 4 when the chains have not converged.
    #[arg(long)]
    pub strict: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseCmd {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: DiagnoseArgs,
}

/// Expands fit directories into their chain directories, sorted by name.
pub fn expand_trace_dirs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for p in paths {
        if p.join(META_FILE).is_file() {
            dirs.push(p.clone());
            continue;
        }
        if !p.is_dir() {
            return Err(CliError::Usage(format!("{}: no such trace directory", p.display())));
        }
        let entries = std::fs::read_dir(p).map_err(|e| CliError::io(p, e))?;
        let mut chains: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|d| d.join(META_FILE).is_file())
            .collect();
        if chains.is_empty() {
            return Err(CliError::Usage(format!("{}: no chain traces found", p.display())));
        }
        chains.sort();
        dirs.extend(chains);
    }
    Ok(dirs)
}

fn diagnostics_error(e: asbm_core::Error) -> CliError {
    match e {
        asbm_core::Error::Io(_) => CliError::Core(e),
        other => CliError::Diagnostics(other.to_string()),
    }
}

pub fn diagnose_traces(traces: &[ChainTrace], truth: Option<&[usize]>, opts: DiagnoseOptions) -> Result<Diagnosis> {
    if traces.len() < 2 {
        return Err(CliError::Diagnostics(format!("need at least two traces, got {}", traces.len())));
    }
    diagnose(traces, truth, opts).map_err(diagnostics_error)
}

fn write_matrix<'a>(path: &Path, rows: impl Iterator<Item = &'a [f64]>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Writes report, PSM, aligned connectivity and point estimate into `dir`.
pub fn write_diagnosis(dir: &Path, d: &Diagnosis) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let report = dir.join(REPORT_FILE);
    write_json(&report, &d.report)?;
    let psm = dir.join(PSM_FILE);
    write_matrix(&psm, d.psm.rows())?;
    let partition = dir.join(PARTITION_FILE);
    let f = File::create(&partition).map_err(|e| CliError::io(&partition, e))?;
    write_labels(&d.point.partition, BufWriter::new(f))?;
    let mut files = vec![report, psm, partition];
    if let Some(p) = &d.p_hat {
        let path = dir.join(P_HAT_FILE);
        write_matrix(&path, p.p_hat.iter().map(|r| r.as_slice()))?;
        files.push(path);
    }
    Ok(files)
}

pub fn run(cmd: &DiagnoseCmd) -> Result<()> {
    let start = Instant::now();
    let o = merge(cmd.config.as_deref(), &cmd.opts)?;
    let given = o.traces.clone().ok_or_else(|| CliError::Usage("diagnose needs --traces".into()))?;
    let dirs = expand_trace_dirs(&given)?;
    let traces = dirs
        .iter()
        .map(|d| ChainTrace::read_dir(d).map_err(diagnostics_error))
        .collect::<Result<Vec<_>>>()?;
    let truth = match &o.truth {
        Some(path) => {
            let f = File::open(path).map_err(|e| CliError::io(path, e))?;
            Some(read_labels(f)?)
        }
        None => None,
    };
    let defaults = DiagnoseOptions::default();
    let opts = DiagnoseOptions {
        rhat_threshold: o.threshold.unwrap_or(RHAT_THRESHOLD),
        restarts: o.restarts.unwrap_or(defaults.restarts),
        seed: o.seed.unwrap_or(defaults.seed),
    };
    let d = diagnose_traces(&traces, truth.as_deref(), opts)?;
    let out = output_dir(o.out.as_ref(), "diagnose");
    let outputs = write_diagnosis(&out, &d)?;
    let strict = o.strict.unwrap_or(false);
    let echo = DiagnoseArgs {
        traces: Some(dirs.clone()),
        truth: o.truth.clone(),
        threshold: Some(opts.rhat_threshold),
        restarts: Some(opts.restarts),
        seed: Some(opts.seed),
        strict: Some(strict),
        out: Some(out.clone()),
    };
    let mut m = RunManifest::new("diagnose", &echo, opts.seed)?;
    m.inputs = dirs.clone();
    m.inputs.extend(o.truth.clone());
    m.outputs = outputs;
    m.write(&out, start.elapsed())?;
    if !d.report.converged {
        let msg = match d.report.rhat_deviance {
            Some(r) => format!("split R-hat of the deviance is {r:.3}, above {}", opts.rhat_threshold),
            None => "split R-hat of the deviance is infinite".to_string(),
        };
        log::warn!("{msg}");
        if strict {
            return Err(CliError::Diagnostics(msg));
        }
    }
    Ok(())
}
