use std::path::{Path, PathBuf};
use std::time::Instant;

use asbm_core::diagnostics::{DiagnoseOptions, RHAT_THRESHOLD};
use asbm_core::distributions::RngStream;
use asbm_core::generators::{generate_lfr, LfrSpec};
use asbm_core::samplers::{SamplerConfig, Variant};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::diagnose::diagnose_traces;
use super::fit::{fit_chains, FitSettings};
use super::generate::write_network;
use crate::config::{create_dir, merge, output_dir, write_json};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const RUNS_DIR: &str = "runs";

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyOptions {
    #[arg(long, value_delimiter = ',')]
    pub mus: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub davgs: Option<Vec<f64>>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub variants: Option<Vec<Variant>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long)]
    pub nmin: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub dmax: Option<usize>,
    /// Number of blocks for fixed-k variants.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Sweeps after burn-in.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Also write each generated network.
    #[arg(long)]
    pub keep_networks: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplicateCmd {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: StudyOptions,
}

/// Fully resolved study design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study {
    pub mus: Vec<f64>,
    pub davgs: Vec<f64>,
    pub reps: usize,
    pub variants: Vec<Variant>,
    pub seed: u64,
    pub workers: Option<usize>,
    /// Generator settings; `mu` and `d_avg` are overwritten per cell.
    pub network: LfrSpec,
    /// Sampler settings; variant and seed are overwritten per run.
    pub sampler: SamplerConfig,
    pub chains: usize,
    pub threshold: f64,
    pub restarts: usize,
    pub keep_networks: bool,
}

impl Study {
    pub fn from_options(o: &StudyOptions) -> Result<Self> {
        let d = LfrSpec::default();
        let network = LfrSpec {
            n: o.n.unwrap_or(d.n),
            t1: o.t1.unwrap_or(d.t1),
            t2: o.t2.unwrap_or(d.t2),
            n_min: o.nmin.unwrap_or(d.n_min),
            n_max: o.nmax.unwrap_or(d.n_max),
            d_avg: d.d_avg,
            d_max: o.dmax.unwrap_or(d.d_max),
            mu: d.mu,
        };
        let fit = FitSettings::from_options(&super::fit::FitOptions {
            k: o.k,
            gamma: o.gamma,
            alpha: o.alpha,
            beta: o.beta,
            lambda: o.lambda,
            m: o.m,
            iters: o.iters,
            burnin: o.burnin,
            thin: o.thin,
            chains: o.chains,
            ..Default::default()
        })?;
        let study = Study {
            mus: o.mus.clone().unwrap_or_else(|| vec![0.1, 0.2, 0.3, 0.4]),
            davgs: o.davgs.clone().unwrap_or_else(|| vec![10.0, 15.0, 20.0, 25.0]),
            reps: o.reps.unwrap_or(5),
            variants: o.variants.clone().unwrap_or_else(|| vec![Variant::Sbm, Variant::Asbm]),
            seed: o.seed.unwrap_or(0),
            workers: o.workers,
            network,
            sampler: fit.sampler,
            chains: fit.chains,
            threshold: o.threshold.unwrap_or(RHAT_THRESHOLD),
            restarts: o.restarts.unwrap_or(DiagnoseOptions::default().restarts),
            keep_networks: o.keep_networks.unwrap_or(false),
        };
        if study.mus.is_empty() || study.davgs.is_empty() || study.variants.is_empty() || study.reps == 0 {
            return Err(CliError::Usage("study grid is empty".into()));
        }
        if study.workers == Some(0) {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        if study.chains < 2 {
            return Err(CliError::Usage("diagnosis needs at least two chains".into()));
        }
        Ok(study)
    }

    /// Flat options that reproduce this study.
    pub fn to_options(&self) -> StudyOptions {
        let s = &self.sampler;
        StudyOptions {
            mus: Some(self.mus.clone()),
            davgs: Some(self.davgs.clone()),
            reps: Some(self.reps),
            variants: Some(self.variants.clone()),
            seed: Some(self.seed),
            workers: self.workers,
            n: Some(self.network.n),
            t1: Some(self.network.t1),
            t2: Some(self.network.t2),
            nmin: Some(self.network.n_min),
            nmax: Some(self.network.n_max),
            dmax: Some(self.network.d_max),
            k: s.k,
            gamma: Some(s.gamma),
            alpha: Some(s.alpha),
            beta: Some(s.beta),
            lambda: Some(s.lambda),
            m: Some(s.m),
            iters: Some(s.iterations - s.burn_in),
            burnin: Some(s.burn_in),
            thin: Some(s.thinning),
            chains: Some(self.chains),
            threshold: Some(self.threshold),
            restarts: Some(self.restarts),
            keep_networks: Some(self.keep_networks),
            out: None,
        }
    }
}

/// Outcome of one (cell, replicate, variant) run; serialized per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub mu: f64,
    pub davg: f64,
    pub rep: usize,
    pub variant: Variant,
    /// `ok` or `failed:<exit code>`.
    pub status: String,
    pub converged: Option<bool>,
    pub ari: Option<f64>,
    pub k_err: Option<f64>,
    /// Mean over chains.
    pub ess_per_sample: Option<f64>,
    pub rhat: Option<f64>,
    pub k_hat: Option<usize>,
    pub k_true: Option<usize>,
    pub error: Option<String>,
}

impl RunRecord {
    fn failed(mu: f64, davg: f64, rep: usize, variant: Variant, e: &CliError) -> Self {
        RunRecord {
            mu,
            davg,
            rep,
            variant,
            status: format!("failed:{}", e.exit_code()),
            converged: None,
            ari: None,
            k_err: None,
            ess_per_sample: None,
            rhat: None,
            k_hat: None,
            k_true: None,
            error: Some(e.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn file_name(&self) -> String {
        format!("mu{}-davg{}-rep{:03}-{}.json", self.mu, self.davg, self.rep, self.variant)
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

impl MeanSd {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanSd { mean: None, sd: None };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (n > 1).then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
        MeanSd { mean: Some(mean), sd }
    }
}

/// Per-(mu, davg, variant) aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub mu: f64,
    pub davg: f64,
    pub variant: Variant,
    pub runs: usize,
    pub failed: usize,
    pub converged: usize,
    /// ARI over converged runs.
    pub ari: MeanSd,
    /// ARI over all successful runs.
    pub ari_all: MeanSd,
    pub k_err: MeanSd,
    pub ess_per_sample: MeanSd,
}

/// Aggregates records by cell in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut keys: Vec<(f64, f64, Variant)> = Vec::new();
    for r in records {
        let key = (r.mu, r.davg, r.variant);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(mu, davg, variant)| {
            let cell: Vec<&RunRecord> =
                records.iter().filter(|r| r.mu == mu && r.davg == davg && r.variant == variant).collect();
            let ok: Vec<&RunRecord> = cell.iter().copied().filter(|r| r.is_ok()).collect();
            let conv: Vec<&RunRecord> = ok.iter().copied().filter(|r| r.converged == Some(true)).collect();
            let col = |rs: &[&RunRecord], f: fn(&RunRecord) -> Option<f64>| -> Vec<f64> {
                rs.iter().filter_map(|r| f(r)).collect()
            };
            CellSummary {
                mu,
                davg,
                variant,
                runs: cell.len(),
                failed: cell.len() - ok.len(),
                converged: conv.len(),
                ari: MeanSd::of(&col(&conv, |r| r.ari)),
                ari_all: MeanSd::of(&col(&ok, |r| r.ari)),
                k_err: MeanSd::of(&col(&ok, |r| r.k_err)),
                ess_per_sample: MeanSd::of(&col(&ok, |r| r.ess_per_sample)),
            }
        })
        .collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_results(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "mu", "davg", "rep", "variant", "status", "converged", "ari", "k_err", "ess_per_sample", "rhat", "k_hat", "k_true",
    ])?;
    for r in records {
        w.write_record([
            r.mu.to_string(),
            r.davg.to_string(),
            r.rep.to_string(),
            r.variant.to_string(),
            r.status.clone(),
            opt(r.converged),
            opt(r.ari),
            opt(r.k_err),
            opt(r.ess_per_sample),
            opt(r.rhat),
            opt(r.k_hat),
            opt(r.k_true),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_summary(path: &Path, cells: &[CellSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "mu", "davg", "variant", "runs", "failed", "converged", "ari_mean", "ari_sd", "ari_all_mean", "ari_all_sd",
        "k_err_mean", "k_err_sd", "ess_per_sample_mean", "ess_per_sample_sd",
    ])?;
    for c in cells {
        w.write_record([
            c.mu.to_string(),
            c.davg.to_string(),
            c.variant.to_string(),
            c.runs.to_string(),
            c.failed.to_string(),
            c.converged.to_string(),
            opt(c.ari.mean),
            opt(c.ari.sd),
            opt(c.ari_all.mean),
            opt(c.ari_all.sd),
            opt(c.k_err.mean),
            opt(c.k_err.sd),
            opt(c.ess_per_sample.mean),
            opt(c.ess_per_sample.sd),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads every per-run JSON file under `dir`, sorted by file name.
pub fn load_runs(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            Ok(serde_json::from_str(&text)?)
        })
        .collect()
}

struct Job {
    cell: usize,
    mu: f64,
    davg: f64,
    rep: usize,
}

fn run_job(study: &Study, job: &Job, out: Option<&Path>) -> Vec<RunRecord> {
    let root = RngStream::new(study.seed);
    let mut net_rng = root.split(0).split(job.cell as u64).split(job.rep as u64);
    let spec = LfrSpec { mu: job.mu, d_avg: job.davg, ..study.network.clone() };
    let network = generate_lfr(&mut net_rng, &spec).map_err(CliError::from).and_then(|(g, z)| {
        if let (true, Some(out)) = (study.keep_networks, out) {
            let dir = out.join("networks").join(format!("mu{}-davg{}-rep{:03}", job.mu, job.davg, job.rep));
            write_network(&dir, &g, &z)?;
        }
        Ok((g, z))
    });
    let (g, z) = match network {
        Ok(x) => x,
        Err(e) => {
            log::warn!("mu {} davg {} rep {}: {e}", job.mu, job.davg, job.rep);
            return study.variants.iter().map(|&v| RunRecord::failed(job.mu, job.davg, job.rep, v, &e)).collect();
        }
    };
    let k_true = z.iter().max().map_or(0, |m| m + 1);
    study
        .variants
        .iter()
        .enumerate()
        .map(|(vi, &variant)| {
            let mut sampler = study.sampler.clone();
            sampler.variant = variant;
            sampler.seed = root.split(1).split(job.cell as u64).split(job.rep as u64).split(vi as u64).seed();
            let settings = FitSettings { sampler, chains: study.chains, workers: None };
            let opts = DiagnoseOptions {
                rhat_threshold: study.threshold,
                restarts: study.restarts,
                seed: settings.sampler.seed,
            };
            let result = fit_chains(&g, &settings).and_then(|traces| diagnose_traces(&traces, Some(&z), opts));
            match result {
                Ok(d) => {
                    let ess = &d.report.ess_per_sample;
                    RunRecord {
                        mu: job.mu,
                        davg: job.davg,
                        rep: job.rep,
                        variant,
                        status: "ok".into(),
                        converged: Some(d.report.converged),
                        ari: d.report.ari,
                        k_err: d.report.relative_k_error,
                        ess_per_sample: Some(ess.iter().sum::<f64>() / ess.len() as f64),
                        rhat: d.report.rhat_deviance,
                        k_hat: Some(d.report.k_hat),
                        k_true: Some(k_true),
                        error: None,
                    }
                }
                Err(e) => {
                    log::warn!("mu {} davg {} rep {} {variant}: {e}", job.mu, job.davg, job.rep);
                    RunRecord::failed(job.mu, job.davg, job.rep, variant, &e)
                }
            }
        })
        .collect()
}

/// Runs the whole grid. Records come back in grid order (mu, davg, rep,
/// variant) whatever the number of workers. When `out` is given, per-run
/// JSON and optionally the networks are written beneath it.
pub fn run_study(study: &Study, out: Option<&Path>) -> Result<Vec<RunRecord>> {
    let mut jobs = Vec::new();
    for (mi, &mu) in study.mus.iter().enumerate() {
        for (di, &davg) in study.davgs.iter().enumerate() {
            for rep in 0..study.reps {
                jobs.push(Job { cell: mi * study.davgs.len() + di, mu, davg, rep });
            }
        }
    }
    let run = || jobs.par_iter().map(|j| run_job(study, j, out)).collect::<Vec<_>>();
    let nested = match study.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(run),
        None => run(),
    };
    let records: Vec<RunRecord> = nested.into_iter().flatten().collect();
    if let Some(out) = out {
        let runs = out.join(RUNS_DIR);
        create_dir(&runs)?;
        for r in &records {
            write_json(&runs.join(r.file_name()), r)?;
        }
    }
    Ok(records)
}

pub fn run(cmd: &ReplicateCmd) -> Result<()> {
    let start = Instant::now();
    let o = merge(cmd.config.as_deref(), &cmd.opts)?;
    let study = Study::from_options(&o)?;
    let out = output_dir(o.out.as_ref(), "replicate");
    create_dir(&out)?;
    let records = run_study(&study, Some(&out))?;
    let results = out.join(RESULTS_FILE);
    write_results(&results, &records)?;
    let summary = out.join(SUMMARY_FILE);
    write_summary(&summary, &summarize(&records))?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        log::warn!("{failed} of {} runs failed", records.len());
    }
    let echo = StudyOptions { out: Some(out.clone()), ..study.to_options() };
    let mut m = RunManifest::new("replicate", &echo, study.seed)?;
    m.outputs = vec![results, summary, out.join(RUNS_DIR)];
    m.write(&out, start.elapsed())
}
