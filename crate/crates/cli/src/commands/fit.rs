use std::path::{Path, PathBuf};
use std::time::Instant;

use asbm_core::distributions::RngStream;
use asbm_core::netcore::read_edge_list;
use asbm_core::samplers::{run_chain, ChainTrace, InitLabels, NewBlockDraw, SamplerConfig, Variant};
use asbm_core::Graph;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{create_dir, merge, output_dir};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Random,
    Singletons,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NewBlockKind {
    Conditional,
    Prior,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    /// Edge list to fit.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// sbm-k, asbm-k, sbm or asbm.
    #[arg(long)]
    pub variant: Option<Variant>,
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
    pub seed: Option<u64>,
    /// Worker threads; chains run in parallel.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub epsilon_init: Option<f64>,
    #[arg(long, value_enum)]
    pub new_block: Option<NewBlockKind>,
    #[arg(long, value_enum)]
    pub init: Option<InitKind>,
    /// Number of blocks for random initial labels.
    #[arg(long)]
    pub init_k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitCmd {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: FitOptions,
}

/// Fully resolved fit settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    pub sampler: SamplerConfig,
    pub chains: usize,
    pub workers: Option<usize>,
}

impl FitSettings {
    pub fn from_options(o: &FitOptions) -> Result<Self> {
        let variant = o.variant.unwrap_or(Variant::Asbm);
        let mut s = SamplerConfig::new(variant);
        s.k = o.k;
        s.gamma = o.gamma.unwrap_or(s.gamma);
        s.alpha = o.alpha.unwrap_or(s.alpha);
        s.beta = o.beta.unwrap_or(s.beta);
        s.lambda = o.lambda.unwrap_or(s.lambda);
        s.m = o.m.unwrap_or(s.m);
        s.burn_in = o.burnin.unwrap_or(s.burn_in);
        let kept_sweeps = o.iters.unwrap_or(s.iterations - s.burn_in.min(s.iterations));
        s.iterations = s.burn_in + kept_sweeps;
        s.thinning = o.thin.unwrap_or(s.thinning);
        s.seed = o.seed.unwrap_or(0);
        s.epsilon_init = o.epsilon_init.unwrap_or(s.epsilon_init);
        s.new_block_draw = match o.new_block.unwrap_or(NewBlockKind::Conditional) {
            NewBlockKind::Conditional => NewBlockDraw::Conditional,
            NewBlockKind::Prior => NewBlockDraw::Prior,
        };
        s.init = match o.init.unwrap_or(InitKind::Random) {
            InitKind::Random => InitLabels::Random(o.init_k),
            InitKind::Singletons => InitLabels::Singletons,
        };
        let chains = o.chains.unwrap_or(2);
        if chains == 0 {
            return Err(CliError::Usage("chains must be at least 1".into()));
        }
        if o.workers == Some(0) {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        Ok(FitSettings { sampler: s, chains, workers: o.workers })
    }
}

impl FitSettings {
    /// Flat options that reproduce these settings.
    pub fn to_options(&self) -> FitOptions {
        let s = &self.sampler;
        let (init, init_k) = match &s.init {
            InitLabels::Random(k) => (InitKind::Random, *k),
            InitLabels::Singletons => (InitKind::Singletons, None),
            InitLabels::Given(_) => (InitKind::Random, None),
        };
        FitOptions {
            variant: Some(s.variant),
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
            seed: Some(s.seed),
            workers: self.workers,
            epsilon_init: Some(s.epsilon_init),
            new_block: Some(match s.new_block_draw {
                NewBlockDraw::Conditional => NewBlockKind::Conditional,
                NewBlockDraw::Prior => NewBlockKind::Prior,
            }),
            init: Some(init),
            init_k,
            input: None,
            out: None,
        }
    }
}

/// Seed of chain `c` under master seed `seed`.
pub fn chain_seed(seed: u64, c: usize) -> u64 {
    RngStream::new(seed).split(c as u64).seed()
}

/// Runs `settings.chains` chains on `g`. Results are in chain order and do
/// not depend on the number of workers.
pub fn fit_chains(g: &Graph, settings: &FitSettings) -> Result<Vec<ChainTrace>> {
    settings.sampler.validate(g.n())?;
    let run = || {
        (0..settings.chains)
            .into_par_iter()
            .map(|c| {
                let mut cfg = settings.sampler.clone();
                cfg.seed = chain_seed(settings.sampler.seed, c);
                run_chain(g, &cfg)
            })
            .collect::<asbm_core::Result<Vec<_>>>()
    };
    let traces = match settings.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(run),
        None => run(),
    }?;
    Ok(traces)
}

pub fn chain_dir(out: &Path, c: usize) -> PathBuf {
    out.join(format!("chain-{c}"))
}

pub fn run(cmd: &FitCmd) -> Result<()> {
    let start = Instant::now();
    let o = merge(cmd.config.as_deref(), &cmd.opts)?;
    let input = o.input.clone().ok_or_else(|| CliError::Usage("fit needs --input".into()))?;
    if !input.is_file() {
        return Err(CliError::Usage(format!("{}: no such edge list", input.display())));
    }
    let settings = FitSettings::from_options(&o)?;
    let g = read_edge_list(&input)?;
    let traces = fit_chains(&g, &settings)?;
    let out = output_dir(o.out.as_ref(), "fit");
    create_dir(&out)?;
    let mut outputs = Vec::new();
    for (c, t) in traces.iter().enumerate() {
        let dir = chain_dir(&out, c);
        t.write_dir(&dir)?;
        log::info!("chain {c}: {} samples, mean k {:.2}", t.len(), t.ks().iter().sum::<usize>() as f64 / t.len().max(1) as f64);
        outputs.push(dir);
    }
    let echo = FitOptions { input: Some(input.clone()), out: Some(out.clone()), ..settings.to_options() };
    let mut m = RunManifest::new("fit", &echo, settings.sampler.seed)?;
    m.inputs.push(input);
    m.outputs = outputs;
    m.write(&out, start.elapsed())
}
