//! The sweep loop shared by the four samplers.

use rand::Rng;

use super::connectivity::ConnectivityState;
use super::trace::{ChainTrace, TraceRecord};
use super::updates::{
    update_epsilon, update_p_assortative, update_p_standard, update_z_fixed_k, update_z_unknown_assortative,
    update_z_unknown_standard, Scratch,
};
use super::{InitLabels, SamplerConfig};
use crate::diagnostics::deviance;
use crate::distributions::{GibbsWeights, RngStream};
use crate::error::Result;
use crate::netcore::{BlockState, Graph};

/// Mutable state of a running chain.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub blocks: BlockState,
    pub p: ConnectivityState,
}

fn initial_labels<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &SamplerConfig) -> Vec<usize> {
    match &cfg.init {
        InitLabels::Given(z) => z.clone(),
        InitLabels::Singletons => (0..n).collect(),
        InitLabels::Random(k0) => {
            let k0 = k0.unwrap_or_else(|| match cfg.k {
                Some(k) if cfg.variant.is_fixed_k() => k,
                _ => (n as f64).sqrt().ceil() as usize,
            });
            let k0 = match cfg.k {
                Some(k) if cfg.variant.is_fixed_k() => k0.min(k),
                _ => k0.min(n),
            };
            (0..n).map(|_| rng.random_range(0..k0)).collect()
        }
    }
}

/// Builds the starting state. The connectivity matrix is a placeholder that
/// the first sweep overwrites.
pub fn initial_state(g: &Graph, cfg: &SamplerConfig, rng: &mut RngStream) -> Result<ChainState> {
    cfg.validate(g.n())?;
    let z = initial_labels(rng, g.n(), cfg);
    let blocks = if cfg.variant.is_fixed_k() {
        BlockState::from_labels_fixed(g, &z, cfg.k.expect("validated"))?
    } else {
        BlockState::from_labels(g, &BlockState::canonical_labels(&z))?
    };
    let eps = cfg.variant.is_assortative().then_some(cfg.epsilon_init);
    let p = ConnectivityState::zeros(blocks.k(), eps);
    Ok(ChainState { blocks, p })
}

/// One full iteration: connectivity update, cutoff update for the
/// assortative prior, then one label update per node.
pub fn sweep(
    g: &Graph,
    cfg: &SamplerConfig,
    state: &mut ChainState,
    rng: &mut RngStream,
    scratch: &mut Scratch,
) -> Result<()> {
    let assortative = cfg.variant.is_assortative();
    if assortative {
        let eps = state.p.epsilon().unwrap_or(cfg.epsilon_init);
        state.p = update_p_assortative(rng, &state.blocks, eps)?;
        let eps = update_epsilon(rng, &state.p)?;
        state.p.set_epsilon(eps);
    } else {
        state.p = update_p_standard(rng, &state.blocks, cfg.alpha, cfg.beta)?;
    }

    let n = g.n();
    let weights = GibbsWeights::new(cfg.lambda)?;
    for step in 0..n {
        let i = if cfg.reverse_sweep { n - 1 - step } else { step };
        match (cfg.variant.is_fixed_k(), assortative) {
            (true, _) => {
                update_z_fixed_k(rng, g, i, &mut state.blocks, &state.p, cfg.gamma, scratch, cfg.ignore_likelihood);
            }
            (false, false) => {
                update_z_unknown_standard(
                    rng,
                    g,
                    i,
                    &mut state.blocks,
                    &mut state.p,
                    &weights,
                    cfg.alpha,
                    cfg.beta,
                    cfg.new_block_draw,
                    scratch,
                    cfg.ignore_likelihood,
                )?;
            }
            (false, true) => {
                update_z_unknown_assortative(
                    rng,
                    g,
                    i,
                    &mut state.blocks,
                    &mut state.p,
                    &weights,
                    cfg.m,
                    scratch,
                    cfg.ignore_likelihood,
                )?;
            }
        }
    }
    Ok(())
}

/// Runs one chain from `cfg.seed` and returns its kept iterations.
pub fn run_chain(g: &Graph, cfg: &SamplerConfig) -> Result<ChainTrace> {
    let mut rng = RngStream::new(cfg.seed);
    run_chain_with(g, cfg, &mut rng, |_, _| {})
}

/// Runs one chain on the given stream, calling `observe(iteration, state)`
/// after every sweep.
pub fn run_chain_with<F>(g: &Graph, cfg: &SamplerConfig, rng: &mut RngStream, mut observe: F) -> Result<ChainTrace>
where
    F: FnMut(usize, &ChainState),
{
    if cfg.variant.is_assortative() && (cfg.alpha != 1.0 || cfg.beta != 1.0) {
        log::warn!("alpha and beta are ignored by the assortative prior");
    }
    let mut state = initial_state(g, cfg, rng)?;
    let mut scratch = Scratch::default();
    let mut records = Vec::with_capacity(cfg.n_kept());
    for it in 1..=cfg.iterations {
        sweep(g, cfg, &mut state, rng, &mut scratch)?;
        observe(it, &state);
        if it > cfg.burn_in && (it - cfg.burn_in) % cfg.thinning == 0 {
            let z = state.blocks.labels().to_vec();
            let p = state.p.matrix().to_vec();
            records.push(TraceRecord {
                iteration: it,
                deviance: deviance(g, &z, &p)?,
                k: state.blocks.n_occupied(),
                z,
                p,
                epsilon: state.p.epsilon(),
            });
        }
    }
    Ok(ChainTrace {
        config: cfg.clone(),
        n: g.n(),
        records,
    })
}
