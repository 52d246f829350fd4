use crate::error::{invalid, Error, Result};

/// Undirected simple graph, immutable after construction.
///
/// Adjacency is held twice: a packed bitset over unordered pairs for O(1)
/// membership and sorted neighbor lists for O(degree) traversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    bits: Vec<u64>,
    neighbors: Vec<Vec<usize>>,
    n_edges: usize,
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    // strict lower triangle, row-major: (i > j)
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate pairs (in either
    /// orientation) collapse to one edge.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n_pairs = n * n.saturating_sub(1) / 2;
        let mut bits = vec![0u64; n_pairs.div_ceil(64)];
        let mut neighbors = vec![Vec::new(); n];
        let mut n_edges = 0;
        for &(i, j) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::NodeOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            let p = pair_index(i, j);
            if bits[p / 64] & (1 << (p % 64)) == 0 {
                bits[p / 64] |= 1 << (p % 64);
                neighbors[i].push(j);
                neighbors[j].push(i);
                n_edges += 1;
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            bits,
            neighbors,
            n_edges,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, &[]).expect("empty graph is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn n_pairs(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let p = pair_index(i, j);
        self.bits[p / 64] & (1 << (p % 64)) != 0
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: perm.len(),
            });
        }
        let edges: Vec<_> = self.edges().map(|(i, j)| (perm[i], perm[j])).collect();
        Self::from_edges(self.n, &edges)
    }
}

/// Symmetric real-valued adjacency with entries in `[0, 1]` and zero
/// diagonal, e.g. the expected adjacency of a block model.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftGraph {
    n: usize,
    weights: Vec<f64>,
}

impl SoftGraph {
    pub fn from_fn(n: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut weights = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..n {
            for j in 0..i {
                let w = weight(i, j);
                if !(0.0..=1.0).contains(&w) {
                    return Err(invalid(format!("soft adjacency ({i},{j}) = {w} outside [0,1]")));
                }
                weights.push(w);
            }
        }
        Ok(SoftGraph { n, weights })
    }

    /// Expected adjacency `E[A_ij] = P[z_i][z_j]` of a block model.
    pub fn expected_adjacency(z: &[usize], p: &[Vec<f64>]) -> Result<Self> {
        for &a in z {
            if a >= p.len() {
                return Err(Error::LabelOutOfRange { label: a, k: p.len() });
            }
        }
        Self::from_fn(z.len(), |i, j| p[z[i]][z[j]])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.weights[pair_index(i, j)]
        }
    }
}

impl From<&Graph> for SoftGraph {
    fn from(g: &Graph) -> Self {
        SoftGraph::from_fn(g.n(), |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 })
            .expect("binary weights are in range")
    }
}
