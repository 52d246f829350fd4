//! Planted block-model networks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::netcore::Graph;

/// Planted partition model: labels drawn from `pi`, edges from `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub n: usize,
    pub pi: Vec<f64>,
    pub p: Vec<Vec<f64>>,
}

impl SbmSpec {
    pub fn validate(&self) -> Result<()> {
        let k = self.pi.len();
        if k == 0 {
            return Err(invalid("pi is empty"));
        }
        if self.pi.iter().any(|&v| !(v >= 0.0)) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(invalid("pi must be a probability vector"));
        }
        check_matrix(&self.p, k)
    }
}

fn check_matrix(p: &[Vec<f64>], k: usize) -> Result<()> {
    if p.len() != k || p.iter().any(|r| r.len() != k) {
        return Err(invalid(format!("connectivity matrix must be {k}x{k}")));
    }
    for a in 0..k {
        for b in 0..k {
            if !(0.0..=1.0).contains(&p[a][b]) {
                return Err(invalid(format!("P[{a}][{b}] = {} outside [0,1]", p[a][b])));
            }
            if p[a][b] != p[b][a] {
                return Err(invalid("connectivity matrix is not symmetric"));
            }
        }
    }
    Ok(())
}

fn wire_edges<R: Rng + ?Sized>(rng: &mut R, z: &[usize], p: &[Vec<f64>]) -> Result<Graph> {
    let n = z.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p[z[i]][z[j]] {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Labels i.i.d. from `pi`, then one Bernoulli draw per node pair.
pub fn generate_sbm<R: Rng + ?Sized>(rng: &mut R, spec: &SbmSpec) -> Result<(Graph, Vec<usize>)> {
    spec.validate()?;
    let z: Vec<usize> = (0..spec.n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (a, &w) in spec.pi.iter().enumerate() {
                acc += w;
                if u < acc {
                    return a;
                }
            }
            spec.pi.iter().rposition(|&w| w > 0.0).unwrap_or(0)
        })
        .collect();
    let g = wire_edges(rng, &z, &spec.p)?;
    Ok((g, z))
}

/// Block model with fixed block sizes; nodes are labelled in block order.
pub fn generate_sbm_sizes<R: Rng + ?Sized>(rng: &mut R, sizes: &[usize], p: &[Vec<f64>]) -> Result<(Graph, Vec<usize>)> {
    check_matrix(p, sizes.len())?;
    let z: Vec<usize> = sizes.iter().enumerate().flat_map(|(a, &s)| std::iter::repeat_n(a, s)).collect();
    let g = wire_edges(rng, &z, p)?;
    Ok((g, z))
}

/// Block sizes of the core-periphery example.
pub const STAR_SIZES: [usize; 3] = [60, 20, 20];

/// Connectivity of the core-periphery example: a dense core and two sparse
/// peripheries that link to the core more than to each other.
pub fn star_connectivity() -> Vec<Vec<f64>> {
    vec![vec![0.30, 0.085, 0.085], vec![0.085, 0.13, 0.01], vec![0.085, 0.01, 0.13]]
}

/// The 100-node core-periphery network with blocks of 60, 20 and 20 nodes.
pub fn generate_star_example<R: Rng + ?Sized>(rng: &mut R) -> Result<(Graph, Vec<usize>)> {
    generate_sbm_sizes(rng, &STAR_SIZES, &star_connectivity())
}
