//! Posterior summaries: deviance, convergence statistics, partition point
//! estimates and scores against ground truth.

mod convergence;
mod deviance;
mod partition;
mod report;

pub use convergence::{effective_sample_size, ess_per_sample, split_rhat};
pub use deviance::deviance;
pub use partition::{
    adjusted_rand_index, order_blocks_by_size, point_estimate_partition, posterior_similarity, relative_k_error,
    signal_to_noise, vi_lower_bound, AlignedConnectivity, PointEstimate, PosteriorSimilarity,
};
pub use report::{diagnose, DiagnoseOptions, Diagnosis, DiagnosticsReport, RHAT_THRESHOLD};
