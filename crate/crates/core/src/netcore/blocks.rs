use super::Graph;
use crate::error::{Error, Result};

const DETACHED: usize = usize::MAX;

/// Destination of a node move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Existing(usize),
    New,
}

/// Reported when a block empties and labels are compacted: the block with
/// label `moved_from` (always the last label) now carries label `removed`.
/// When `removed == moved_from` the last block was simply dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Compaction {
    pub removed: usize,
    pub moved_from: usize,
}

/// Block labels (0-based) together with exact sufficient statistics:
/// block sizes `n_a` and edge counts `O_ab`. Pair capacities `n_ab` are
/// derived from the sizes.
///
/// In compacting mode (unknown number of blocks) labels are always
/// contiguous and no block is empty. In fixed mode the number of label
/// slots is fixed and blocks may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockState {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    edges: Vec<Vec<usize>>,
    compacting: bool,
}

impl BlockState {
    /// Statistics for a contiguous labeling: every label in `0..k` must be
    /// used, where `k = max(z) + 1`.
    pub fn from_labels(g: &Graph, z: &[usize]) -> Result<Self> {
        let k = z.iter().max().map_or(0, |&m| m + 1);
        let state = Self::build(g, z, k, true)?;
        if let Some(a) = state.sizes.iter().position(|&s| s == 0) {
            return Err(Error::LabelGap(a));
        }
        Ok(state)
    }

    /// Statistics for a labeling over `k` fixed slots; empty blocks allowed.
    pub fn from_labels_fixed(g: &Graph, z: &[usize], k: usize) -> Result<Self> {
        Self::build(g, z, k, false)
    }

    /// Relabels `z` to contiguous labels in order of first appearance.
    pub fn canonical_labels(z: &[usize]) -> Vec<usize> {
        let mut map = std::collections::HashMap::new();
        z.iter()
            .map(|&a| {
                let next = map.len();
                *map.entry(a).or_insert(next)
            })
            .collect()
    }

    fn build(g: &Graph, z: &[usize], k: usize, compacting: bool) -> Result<Self> {
        if z.len() != g.n() {
            return Err(Error::LengthMismatch {
                expected: g.n(),
                got: z.len(),
            });
        }
        let mut sizes = vec![0; k];
        for &a in z {
            if a >= k {
                return Err(Error::LabelOutOfRange { label: a, k });
            }
            sizes[a] += 1;
        }
        let mut edges = vec![vec![0; k]; k];
        for (i, j) in g.edges() {
            let (a, b) = (z[i], z[j]);
            edges[a][b] += 1;
            if a != b {
                edges[b][a] += 1;
            }
        }
        Ok(BlockState {
            labels: z.to_vec(),
            sizes,
            edges,
            compacting,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of label slots (equals the number of non-empty blocks in
    /// compacting mode).
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_occupied(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 0).count()
    }

    pub fn is_compacting(&self) -> bool {
        self.compacting
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn size(&self, a: usize) -> usize {
        self.sizes[a]
    }

    /// `O_ab`: number of edges between blocks `a` and `b`.
    #[inline]
    pub fn edge_count(&self, a: usize, b: usize) -> usize {
        self.edges[a][b]
    }

    /// `n_ab`: number of node pairs between blocks `a` and `b`.
    #[inline]
    pub fn pair_capacity(&self, a: usize, b: usize) -> usize {
        if a == b {
            self.sizes[a] * self.sizes[a].saturating_sub(1) / 2
        } else {
            self.sizes[a] * self.sizes[b]
        }
    }

    /// `r_b`: edges from node `i` into each block, excluding `i` itself.
    pub fn node_block_edge_counts(&self, g: &Graph, i: usize) -> Vec<usize> {
        let mut r = vec![0; self.k()];
        self.node_block_edge_counts_into(g, i, &mut r);
        r
    }

    pub(crate) fn node_block_edge_counts_into(&self, g: &Graph, i: usize, r: &mut Vec<usize>) {
        r.clear();
        r.resize(self.k(), 0);
        for &j in g.neighbors(i) {
            let b = self.labels[j];
            if b != DETACHED {
                r[b] += 1;
            }
        }
    }

    /// Moves node `i` to `target`, keeping statistics exact. Returns the
    /// compaction performed if `i`'s old block emptied (compacting mode only).
    pub fn move_node(&mut self, g: &Graph, i: usize, target: Target) -> Option<Compaction> {
        let mut r = self.node_block_edge_counts(g, i);
        let old = self.labels[i];
        let target = match target {
            // moving onto the own block is a no-op
            Target::Existing(b) if b == old => return None,
            t => t,
        };
        let compaction = self.detach(i, &mut r);
        let target = match (target, compaction) {
            (Target::Existing(b), Some(c)) if b == c.moved_from => Target::Existing(c.removed),
            (t, _) => t,
        };
        self.attach(i, target, &r);
        compaction
    }

    /// Removes `i` from its block. `r` must hold `node_block_edge_counts` for
    /// `i`; it is compacted along with the labels.
    pub(crate) fn detach(&mut self, i: usize, r: &mut Vec<usize>) -> Option<Compaction> {
        let a = self.labels[i];
        debug_assert_ne!(a, DETACHED);
        self.sizes[a] -= 1;
        for (c, &rc) in r.iter().enumerate() {
            self.edges[a][c] -= rc;
            if c != a {
                self.edges[c][a] -= rc;
            }
        }
        self.labels[i] = DETACHED;
        if self.compacting && self.sizes[a] == 0 {
            Some(self.remove_block(a, r))
        } else {
            None
        }
    }

    fn remove_block(&mut self, a: usize, r: &mut Vec<usize>) -> Compaction {
        let last = self.k() - 1;
        if a != last {
            for z in self.labels.iter_mut() {
                if *z == last {
                    *z = a;
                }
            }
        }
        self.sizes.swap_remove(a);
        self.edges.swap_remove(a);
        for row in self.edges.iter_mut() {
            row.swap_remove(a);
        }
        r.swap_remove(a);
        Compaction {
            removed: a,
            moved_from: last,
        }
    }

    /// Places a detached node. Returns the label it received.
    pub(crate) fn attach(&mut self, i: usize, target: Target, r: &[usize]) -> usize {
        debug_assert_eq!(self.labels[i], DETACHED);
        let b = match target {
            Target::Existing(b) => b,
            Target::New => {
                let b = self.k();
                self.sizes.push(0);
                for row in self.edges.iter_mut() {
                    row.push(0);
                }
                self.edges.push(vec![0; b + 1]);
                b
            }
        };
        self.sizes[b] += 1;
        for (c, &rc) in r.iter().enumerate() {
            self.edges[b][c] += rc;
            if c != b {
                self.edges[c][b] += rc;
            }
        }
        self.labels[i] = b;
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn single_block_triangle() {
        let s = BlockState::from_labels(&k3(), &[0, 0, 0]).unwrap();
        assert_eq!(s.size(0), 3);
        assert_eq!(s.edge_count(0, 0), 3);
        assert_eq!(s.pair_capacity(0, 0), 3);
    }

    #[test]
    fn two_block_triangle() {
        let s = BlockState::from_labels(&k3(), &[0, 0, 1]).unwrap();
        assert_eq!(s.edge_count(0, 0), 1);
        assert_eq!(s.edge_count(0, 1), 2);
        assert_eq!(s.edge_count(1, 0), 2);
        assert_eq!(s.pair_capacity(0, 0), 1);
        assert_eq!(s.pair_capacity(0, 1), 2);
    }

    #[test]
    fn empty_graph_stats() {
        let g = Graph::empty(4);
        let s = BlockState::from_labels(&g, &[0, 1, 0, 1]).unwrap();
        assert_eq!(s.edge_count(0, 0) + s.edge_count(0, 1) + s.edge_count(1, 1), 0);
        assert_eq!(s.pair_capacity(0, 0), 1);
        assert_eq!(s.pair_capacity(0, 1), 4);
        assert_eq!(s.pair_capacity(1, 1), 1);
    }

    #[test]
    fn label_gap_rejected() {
        let g = Graph::empty(3);
        assert!(matches!(BlockState::from_labels(&g, &[0, 2, 2]), Err(Error::LabelGap(1))));
        assert!(BlockState::from_labels_fixed(&g, &[0, 2, 2], 3).is_ok());
        assert!(matches!(
            BlockState::from_labels_fixed(&g, &[0, 3, 2], 3),
            Err(Error::LabelOutOfRange { label: 3, k: 3 })
        ));
    }

    #[test]
    fn merge_into_one_block() {
        let g = k3();
        let mut s = BlockState::from_labels(&g, &[0, 0, 1]).unwrap();
        let c = s.move_node(&g, 2, Target::Existing(0));
        assert_eq!(c, Some(Compaction { removed: 1, moved_from: 1 }));
        assert_eq!(s, BlockState::from_labels(&g, &[0, 0, 0]).unwrap());
        assert_eq!(s.edge_count(0, 0), 3);

        let g2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut s = BlockState::from_labels(&g2, &[0, 1]).unwrap();
        assert!(s.move_node(&g2, 1, Target::Existing(0)).is_some());
        assert_eq!(s.k(), 1);
    }

    #[test]
    fn singleton_to_new_is_relabel() {
        let g = k3();
        let mut s = BlockState::from_labels(&g, &[0, 1, 0]).unwrap();
        let c = s.move_node(&g, 1, Target::New);
        assert_eq!(c, Some(Compaction { removed: 1, moved_from: 1 }));
        assert_eq!(s, BlockState::from_labels(&g, &[0, 1, 0]).unwrap());
    }

    #[test]
    fn compaction_moves_last_label() {
        let g = Graph::from_edges(4, &[(0, 3), (1, 2), (2, 3)]).unwrap();
        let mut s = BlockState::from_labels(&g, &[0, 1, 2, 2]).unwrap();
        let c = s.move_node(&g, 1, Target::Existing(2));
        assert_eq!(c, Some(Compaction { removed: 1, moved_from: 2 }));
        assert_eq!(s.labels(), &[0, 1, 1, 1]);
        assert_eq!(s, BlockState::from_labels(&g, &[0, 1, 1, 1]).unwrap());
    }

    #[test]
    fn fixed_mode_keeps_empty_blocks() {
        let g = k3();
        let mut s = BlockState::from_labels_fixed(&g, &[0, 1, 1], 3).unwrap();
        assert!(s.move_node(&g, 0, Target::Existing(2)).is_none());
        assert_eq!(s.k(), 3);
        assert_eq!(s.size(0), 0);
        assert_eq!(s, BlockState::from_labels_fixed(&g, &[2, 1, 1], 3).unwrap());
    }

    #[test]
    fn node_block_counts() {
        let g = k3();
        let s = BlockState::from_labels(&g, &[0, 0, 1]).unwrap();
        assert_eq!(s.node_block_edge_counts(&g, 0), vec![1, 1]);
        let e = Graph::empty(3);
        let s = BlockState::from_labels(&e, &[0, 0, 1]).unwrap();
        assert_eq!(s.node_block_edge_counts(&e, 0), vec![0, 0]);
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let s = BlockState::from_labels(&star, &[0, 1, 1, 1, 1]).unwrap();
        assert_eq!(s.node_block_edge_counts(&star, 0), vec![0, 4]);
    }

    #[test]
    fn canonical_relabel() {
        assert_eq!(BlockState::canonical_labels(&[4, 4, 1, 7, 1]), vec![0, 0, 1, 2, 1]);
    }
}
