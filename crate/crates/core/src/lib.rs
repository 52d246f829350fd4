//! Bayesian community detection for stochastic block models.
//!
//! The crate provides collapsed Gibbs samplers for the standard SBM (independent
//! beta priors on connection probabilities) and the strongly assortative SBM
//! (within-block probabilities separated from between-block probabilities by a
//! random cutoff), each with a fixed or unknown number of communities. The
//! unknown-k samplers use the Gnedin prior on the number of components, which
//! gives closed-form Gibbs-type predictive weights.
//!
//! Alongside the samplers live the network generators (planted SBM, the
//! core–periphery example network, an LFR-style benchmark) and the posterior
//! diagnostics used to score runs (deviance, split-R̂, ESS, posterior
//! similarity, point estimation, ARI).

pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod generators;
pub mod netcore;
pub mod samplers;

pub use error::{Error, Result};
pub use netcore::{BlockState, Graph, SoftGraph};
pub use samplers::{ChainTrace, ConnectivityState, SamplerConfig};
