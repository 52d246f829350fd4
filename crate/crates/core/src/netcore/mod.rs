//! Graphs, block assignments and the sufficient statistics the samplers
//! condition on.

mod blocks;
mod edgelist;
mod graph;

pub use blocks::{BlockState, Compaction, Target};
pub use edgelist::{read_edge_list, write_edge_list, parse_edge_list};
pub use graph::{Graph, SoftGraph};
