//! Gibbs samplers for the standard and assortative block models with a fixed
//! or unknown number of blocks.

mod chain;
mod config;
mod connectivity;
mod likelihood;
pub mod trace;
pub mod updates;

pub use chain::{initial_state, run_chain, run_chain_with, sweep, ChainState};
pub use config::{InitLabels, NewBlockDraw, SamplerConfig, Variant};
pub use connectivity::ConnectivityState;
pub use likelihood::{block_log_likelihood, complete_log_likelihood, PairWeights};
pub use trace::{ChainTrace, TraceMeta, TraceRecord};
