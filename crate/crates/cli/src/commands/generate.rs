use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use asbm_core::distributions::RngStream;
use asbm_core::generators::{
    generate_lfr, generate_sbm, generate_sbm_sizes, generate_star_example, write_labels, LfrSpec, RealizedStats,
    SbmSpec,
};
use asbm_core::netcore::write_edge_list;
use asbm_core::Graph;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::{create_dir, merge, output_dir, parse_matrix, write_json};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

pub const EDGES_FILE: &str = "edges.txt";
pub const TRUTH_FILE: &str = "truth.csv";
pub const STATS_FILE: &str = "stats.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Planted block model from `pi` or fixed `sizes` and `p`.
    Sbm,
    /// The 100-node core-periphery network.
    Star,
    /// Power-law benchmark.
    Lfr,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateOptions {
    #[arg(value_enum)]
    pub model: Option<Model>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of networks; more than one writes numbered subdirectories.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Generate only this replicate, directly into the output directory.
    #[arg(long, conflicts_with = "reps")]
    pub rep: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Block probabilities (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub pi: Option<Vec<f64>>,
    /// Fixed block sizes (comma separated); overrides `n` and `pi`.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Connectivity matrix, rows separated by `;`.
    #[arg(long, value_parser = parse_matrix)]
    pub p: Option<Vec<Vec<f64>>>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long)]
    pub nmin: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub davg: Option<f64>,
    #[arg(long)]
    pub dmax: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateCmd {
    /// Flat TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: GenerateOptions,
}

/// Resolved generator input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum NetworkSpec {
    Sbm(SbmSpec),
    SbmSizes { sizes: Vec<usize>, p: Vec<Vec<f64>> },
    Star,
    Lfr(LfrSpec),
}

impl NetworkSpec {
    pub fn from_options(o: &GenerateOptions) -> Result<Self> {
        let model = o.model.ok_or_else(|| CliError::Usage("choose a model: sbm, star or lfr".into()))?;
        match model {
            Model::Star => Ok(NetworkSpec::Star),
            Model::Sbm => {
                let p = o.p.clone().ok_or_else(|| CliError::Usage("sbm needs a connectivity matrix (p)".into()))?;
                if let Some(sizes) = &o.sizes {
                    return Ok(NetworkSpec::SbmSizes { sizes: sizes.clone(), p });
                }
                let n = o.n.ok_or_else(|| CliError::Usage("sbm needs n with pi, or sizes".into()))?;
                let k = p.len();
                let pi = o.pi.clone().unwrap_or_else(|| vec![1.0 / k as f64; k]);
                Ok(NetworkSpec::Sbm(SbmSpec { n, pi, p }))
            }
            Model::Lfr => {
                let d = LfrSpec::default();
                if o.pi.is_some() || o.sizes.is_some() || o.p.is_some() {
                    return Err(CliError::Usage("pi, sizes and p apply to sbm only".into()));
                }
                Ok(NetworkSpec::Lfr(LfrSpec {
                    n: o.n.unwrap_or(d.n),
                    t1: o.t1.unwrap_or(d.t1),
                    t2: o.t2.unwrap_or(d.t2),
                    n_min: o.nmin.unwrap_or(d.n_min),
                    n_max: o.nmax.unwrap_or(d.n_max),
                    d_avg: o.davg.unwrap_or(d.d_avg),
                    d_max: o.dmax.unwrap_or(d.d_max),
                    mu: o.mu.unwrap_or(d.mu),
                }))
            }
        }
    }

    /// Options that regenerate this spec with no other input.
    pub fn to_options(&self) -> GenerateOptions {
        let mut o = GenerateOptions::default();
        match self {
            NetworkSpec::Sbm(spec) => {
                o.model = Some(Model::Sbm);
                o.n = Some(spec.n);
                o.pi = Some(spec.pi.clone());
                o.p = Some(spec.p.clone());
            }
            NetworkSpec::SbmSizes { sizes, p } => {
                o.model = Some(Model::Sbm);
                o.sizes = Some(sizes.clone());
                o.p = Some(p.clone());
            }
            NetworkSpec::Star => o.model = Some(Model::Star),
            NetworkSpec::Lfr(spec) => {
                o.model = Some(Model::Lfr);
                o.n = Some(spec.n);
                o.t1 = Some(spec.t1);
                o.t2 = Some(spec.t2);
                o.nmin = Some(spec.n_min);
                o.nmax = Some(spec.n_max);
                o.davg = Some(spec.d_avg);
                o.dmax = Some(spec.d_max);
                o.mu = Some(spec.mu);
            }
        }
        o
    }

    pub fn generate(&self, rng: &mut RngStream) -> Result<(Graph, Vec<usize>)> {
        Ok(match self {
            NetworkSpec::Sbm(spec) => generate_sbm(rng, spec)?,
            NetworkSpec::SbmSizes { sizes, p } => generate_sbm_sizes(rng, sizes, p)?,
            NetworkSpec::Star => generate_star_example(rng)?,
            NetworkSpec::Lfr(spec) => generate_lfr(rng, spec)?,
        })
    }
}

/// Writes the edge list, ground truth and realized statistics into `dir`.
pub fn write_network(dir: &Path, g: &Graph, z: &[usize]) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let edges = dir.join(EDGES_FILE);
    let f = File::create(&edges).map_err(|e| CliError::io(&edges, e))?;
    write_edge_list(g, BufWriter::new(f))?;
    let truth = dir.join(TRUTH_FILE);
    let f = File::create(&truth).map_err(|e| CliError::io(&truth, e))?;
    write_labels(z, BufWriter::new(f))?;
    let stats = dir.join(STATS_FILE);
    write_json(&stats, &RealizedStats::compute(g, z)?)?;
    Ok(vec![edges, truth, stats])
}

/// Generates replicate `rep` of `spec` under master seed `seed`.
pub fn generate_replicate(spec: &NetworkSpec, seed: u64, rep: usize) -> Result<(Graph, Vec<usize>)> {
    spec.generate(&mut RngStream::new(seed).split(rep as u64))
}

fn write_one(spec: &NetworkSpec, seed: u64, rep: usize, dir: &Path, out: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let (g, z) = generate_replicate(spec, seed, rep)?;
    let files = write_network(dir, &g, &z)?;
    log::info!("network {rep}: {} nodes, {} edges", g.n(), g.n_edges());
    let echo = GenerateOptions { seed: Some(seed), rep: Some(rep), out, ..spec.to_options() };
    let mut m = RunManifest::new("generate", &echo, seed)?;
    m.outputs = files.clone();
    m.write(dir, start.elapsed())?;
    Ok(files)
}

pub fn run(cmd: &GenerateCmd) -> Result<()> {
    let start = Instant::now();
    let o = merge(cmd.config.as_deref(), &cmd.opts)?;
    let spec = NetworkSpec::from_options(&o)?;
    let seed = o.seed.unwrap_or(0);
    let out = output_dir(o.out.as_ref(), "generate");
    if let Some(rep) = o.rep {
        write_one(&spec, seed, rep, &out, Some(out.clone()))?;
        return Ok(());
    }
    let reps = o.reps.unwrap_or(1);
    if reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    if reps == 1 {
        write_one(&spec, seed, 0, &out, Some(out.clone()))?;
        return Ok(());
    }
    let mut outputs = Vec::new();
    for rep in 0..reps {
        let dir = out.join(format!("rep-{rep:03}"));
        write_one(&spec, seed, rep, &dir, Some(dir.clone()))?;
        outputs.push(dir);
    }
    let echo = GenerateOptions { seed: Some(seed), reps: Some(reps), out: Some(out.clone()), ..spec.to_options() };
    let mut m = RunManifest::new("generate", &echo, seed)?;
    m.outputs = outputs;
    m.write(&out, start.elapsed())
}
