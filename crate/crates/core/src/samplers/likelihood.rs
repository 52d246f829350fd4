//! Complete-data log-likelihood of a labelled network.

use crate::error::{invalid, Result};
use crate::netcore::{BlockState, Graph, SoftGraph};

/// Pairwise adjacency values, binary or real-valued in [0,1].
pub trait PairWeights {
    fn n(&self) -> usize;
    fn weight(&self, i: usize, j: usize) -> f64;
}

impl PairWeights for Graph {
    fn n(&self) -> usize {
        Graph::n(self)
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        if self.has_edge(i, j) {
            1.0
        } else {
            0.0
        }
    }
}

impl PairWeights for SoftGraph {
    fn n(&self) -> usize {
        SoftGraph::n(self)
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        SoftGraph::weight(self, i, j)
    }
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn check_inputs(n: usize, z: &[usize], p: &[Vec<f64>], pi: &[f64]) -> Result<()> {
    if z.len() != n {
        return Err(invalid(format!("{} labels for {n} nodes", z.len())));
    }
    let k = p.len();
    if p.iter().any(|row| row.len() != k) {
        return Err(invalid("connectivity matrix is not square"));
    }
    if pi.len() != k {
        return Err(invalid(format!("{} block weights for a {k}x{k} matrix", pi.len())));
    }
    if let Some(&bad) = z.iter().find(|&&a| a >= k) {
        return Err(invalid(format!("label {bad} outside 0..{k}")));
    }
    Ok(())
}

/// `Σ_{i<j} [A_ij ln P_{z_i z_j} + (1 - A_ij) ln(1 - P_{z_i z_j})] + Σ_i ln π_{z_i}`.
///
/// A zero or unit probability facing opposing evidence gives `-inf`.
pub fn complete_log_likelihood<A: PairWeights + ?Sized>(a: &A, z: &[usize], p: &[Vec<f64>], pi: &[f64]) -> Result<f64> {
    let n = a.n();
    check_inputs(n, z, p, pi)?;
    let mut total = 0.0;
    for j in 1..n {
        let row = &p[z[j]];
        for i in 0..j {
            let w = a.weight(i, j);
            let pij = row[z[i]];
            total += xlny(w, pij) + xlny(1.0 - w, 1.0 - pij);
        }
    }
    Ok(total + z.iter().map(|&c| pi[c].ln()).sum::<f64>())
}

/// Block form of the same quantity for a binary graph:
/// `Σ_{a≤b} [O_ab ln P_ab + (n_ab - O_ab) ln(1 - P_ab)] + Σ_a n_a ln π_a`.
pub fn block_log_likelihood(state: &BlockState, p: &[Vec<f64>], pi: &[f64]) -> Result<f64> {
    let k = state.k();
    check_inputs(state.n(), state.labels(), p, pi)?;
    if k != p.len() {
        return Err(invalid(format!("{k} blocks for a {}x{} matrix", p.len(), p.len())));
    }
    let mut total = 0.0;
    for a in 0..k {
        for b in a..k {
            let o = state.edge_count(a, b) as f64;
            let cap = state.pair_capacity(a, b) as f64;
            total += xlny(o, p[a][b]) + xlny(cap - o, 1.0 - p[a][b]);
        }
        total += xlny(state.size(a) as f64, pi[a]);
    }
    Ok(total)
}
