//! Random variates, special functions and the Gibbs-type partition prior.

mod beta;
mod gibbs;
mod rng;
pub mod special;

pub use beta::{sample_beta, sample_dirichlet_symmetric, sample_truncated_beta};
pub use gibbs::{GibbsWeights, GnedinPrior};
pub use rng::RngStream;
