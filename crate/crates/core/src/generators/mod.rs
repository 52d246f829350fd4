//! Synthetic networks: planted block models, the core-periphery example and
//! an LFR-style benchmark.

mod lfr;
mod sbm;
mod stats;

pub use lfr::{generate_lfr, solve_min_degree, truncated_power_mean, LfrSpec};
pub use sbm::{generate_sbm, generate_sbm_sizes, generate_star_example, star_connectivity, SbmSpec, STAR_SIZES};
pub use stats::{read_labels, realized_mixing, write_labels, RealizedStats};
