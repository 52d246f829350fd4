//! Co-clustering summaries, point estimation and partition scores.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::distributions::RngStream;
use crate::error::{invalid, Result};

/// Pairwise co-clustering frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSimilarity {
    n: usize,
    data: Vec<f64>,
    n_samples: usize,
}

impl PosteriorSimilarity {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }
}

/// Fraction of samples in which each pair of nodes shares a label.
pub fn posterior_similarity(samples: &[Vec<usize>]) -> Result<PosteriorSimilarity> {
    let Some(first) = samples.first() else {
        return Err(invalid("posterior similarity needs at least one sample"));
    };
    let n = first.len();
    if samples.iter().any(|z| z.len() != n) {
        return Err(invalid("samples have different lengths"));
    }
    let mut counts = vec![0u32; n * n];
    for z in samples {
        for i in 0..n {
            for j in 0..i {
                if z[i] == z[j] {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    let s = samples.len() as f64;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for j in 0..i {
            let v = counts[i * n + j] as f64 / s;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(PosteriorSimilarity {
        n,
        data,
        n_samples: samples.len(),
    })
}

/// Chosen partition with its block count and loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub partition: Vec<usize>,
    pub k_hat: usize,
    pub loss: f64,
}

/// Lower bound on the expected variation of information between `z` and the
/// posterior, in nats:
/// `(1/n) Σ_i [ln|c(i)| - 2 ln Σ_{j∈c(i)} psm_ij + ln Σ_j psm_ij]`.
pub fn vi_lower_bound(z: &[usize], psm: &PosteriorSimilarity) -> f64 {
    let n = psm.n();
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    z.iter().for_each(|&c| *sizes.entry(c).or_default() += 1);
    let mut total = 0.0;
    for i in 0..n {
        let row = psm.row(i);
        let within: f64 = (0..n).filter(|&j| z[j] == z[i]).map(|j| row[j]).sum();
        let all: f64 = row.iter().sum();
        total += (sizes[&z[i]] as f64).ln() - 2.0 * within.ln() + all.ln();
    }
    total / n as f64
}

/// Local search state over partitions. `own[l]` holds `Σ_{j ∈ c(l)} psm_lj`
/// over the currently allocated nodes.
struct Search<'a> {
    psm: &'a PosteriorSimilarity,
    label: Vec<usize>,
    members: Vec<Vec<usize>>,
    own: Vec<f64>,
}

const UNSET: usize = usize::MAX;

fn cluster_cost(size: usize, sums: impl Iterator<Item = f64>) -> f64 {
    if size == 0 {
        return 0.0;
    }
    let s = size as f64;
    s * s.ln() - 2.0 * sums.map(f64::ln).sum::<f64>()
}

impl<'a> Search<'a> {
    fn new(psm: &'a PosteriorSimilarity) -> Self {
        let n = psm.n();
        Search {
            psm,
            label: vec![UNSET; n],
            members: Vec::new(),
            own: vec![0.0; n],
        }
    }

    fn from_labels(psm: &'a PosteriorSimilarity, z: &[usize]) -> Self {
        let mut s = Search::new(psm);
        let mut map = HashMap::new();
        for (i, &c) in z.iter().enumerate() {
            let next = map.len();
            let b = *map.entry(c).or_insert(next);
            s.insert(i, b);
        }
        s
    }

    /// Cost change from adding unallocated node `i` to cluster `b`
    /// (`b == members.len()` opens a new cluster).
    fn insertion_delta(&self, i: usize, b: usize) -> f64 {
        if b == self.members.len() || self.members[b].is_empty() {
            return cluster_cost(1, std::iter::once(1.0));
        }
        let m = &self.members[b];
        let row = self.psm.row(i);
        let before = cluster_cost(m.len(), m.iter().map(|&l| self.own[l]));
        let s_i = 1.0 + m.iter().map(|&l| row[l]).sum::<f64>();
        let after = cluster_cost(
            m.len() + 1,
            m.iter().map(|&l| self.own[l] + row[l]).chain(std::iter::once(s_i)),
        );
        after - before
    }

    fn remove(&mut self, i: usize) {
        let a = self.label[i];
        let row = self.psm.row(i);
        self.members[a].retain(|&l| l != i);
        for &l in &self.members[a] {
            self.own[l] -= row[l];
        }
        self.label[i] = UNSET;
    }

    fn insert(&mut self, i: usize, b: usize) {
        if b == self.members.len() {
            self.members.push(Vec::new());
        }
        let row = self.psm.row(i);
        let mut s_i = 1.0;
        for &l in &self.members[b] {
            self.own[l] += row[l];
            s_i += row[l];
        }
        self.own[i] = s_i;
        self.members[b].push(i);
        self.label[i] = b;
    }

    /// Best target for unallocated node `i`; ties go to the lowest index.
    fn best_target(&self, i: usize) -> (usize, f64) {
        let mut best = (UNSET, f64::INFINITY);
        let mut tried_empty = false;
        for b in 0..=self.members.len() {
            let empty = b == self.members.len() || self.members[b].is_empty();
            if empty {
                if tried_empty {
                    continue;
                }
                tried_empty = true;
            }
            let d = self.insertion_delta(i, b);
            if d < best.1 {
                best = (b, d);
            }
        }
        best
    }

    /// Reassigns nodes one at a time until no move lowers the loss.
    fn climb(&mut self, max_sweeps: usize) {
        let n = self.label.len();
        for _ in 0..max_sweeps {
            let mut improved = false;
            for i in 0..n {
                let current = self.label[i];
                self.remove(i);
                let (b, d) = self.best_target(i);
                let stay = self.insertion_delta(i, current);
                if d < stay - 1e-12 {
                    self.insert(i, b);
                    improved = true;
                } else {
                    self.insert(i, current);
                }
            }
            if !improved {
                break;
            }
        }
    }

    fn labels(&self) -> Vec<usize> {
        crate::netcore::BlockState::canonical_labels(&self.label)
    }
}

/// Point estimate minimizing [`vi_lower_bound`]: randomized sequential
/// allocation followed by single-node hill climbing, repeated `restarts`
/// times. Every sampled partition is also scored (and climbed from, for the
/// best one), so the result is never worse than any sample.
pub fn point_estimate_partition(
    samples: &[Vec<usize>],
    psm: &PosteriorSimilarity,
    restarts: usize,
    seed: u64,
) -> Result<PointEstimate> {
    let n = psm.n();
    if samples.iter().any(|z| z.len() != n) {
        return Err(invalid("sample length differs from the similarity matrix"));
    }
    let mut rng = RngStream::new(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let consider = |z: Vec<usize>, best: &mut Option<(f64, Vec<usize>)>| {
        let loss = vi_lower_bound(&z, psm);
        if best.as_ref().is_none_or(|(l, _)| loss < *l) {
            *best = Some((loss, z));
        }
    };

    let mut seen = std::collections::HashSet::new();
    let mut best_sample: Option<(f64, Vec<usize>)> = None;
    for z in samples {
        let c = crate::netcore::BlockState::canonical_labels(z);
        if seen.insert(c.clone()) {
            consider(c, &mut best_sample);
        }
    }
    if let Some((_, z)) = &best_sample {
        let mut s = Search::from_labels(psm, z);
        s.climb(100);
        consider(s.labels(), &mut best);
        consider(z.clone(), &mut best);
    }

    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..restarts {
        order.shuffle(&mut rng);
        let mut s = Search::new(psm);
        for &i in &order {
            let (b, _) = s.best_target(i);
            s.insert(i, b);
        }
        s.climb(100);
        consider(s.labels(), &mut best);
    }

    let (loss, partition) = best.ok_or_else(|| invalid("point estimate needs samples or restarts"))?;
    let k_hat = partition.iter().max().map_or(0, |m| m + 1);
    Ok(PointEstimate { partition, k_hat, loss })
}

/// Adjusted Rand index between two labelings of the same nodes.
pub fn adjusted_rand_index(z1: &[usize], z2: &[usize]) -> Result<f64> {
    if z1.len() != z2.len() {
        return Err(invalid(format!("labelings have lengths {} and {}", z1.len(), z2.len())));
    }
    let n = z1.len();
    if n < 2 {
        return Err(invalid("adjusted Rand index needs at least two nodes"));
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&a, &b) in z1.iter().zip(z2) {
        *table.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    // integer arithmetic until the final division keeps simple cases exact
    let c2 = |x: u64| (x as i128) * (x as i128 - 1) / 2;
    let index: i128 = table.values().map(|&v| c2(v)).sum();
    let sa: i128 = rows.values().map(|&v| c2(v)).sum();
    let sb: i128 = cols.values().map(|&v| c2(v)).sum();
    let total = c2(n as u64);
    let num = 2 * index * total - 2 * sa * sb;
    let den = (sa + sb) * total - 2 * sa * sb;
    if den == 0 {
        // both labelings trivial (all singletons or one block)
        return Ok(if num == 0 { 1.0 } else { 0.0 });
    }
    Ok(num as f64 / den as f64)
}

/// `(k_hat - k_true) / k_true`.
pub fn relative_k_error(k_hat: usize, k_true: usize) -> Result<f64> {
    if k_true == 0 {
        return Err(invalid("true block count must be positive"));
    }
    Ok((k_hat as f64 - k_true as f64) / k_true as f64)
}

/// `n (p - q)² / (2 (p + q))`.
pub fn signal_to_noise(n: usize, p: f64, q: f64) -> f64 {
    if p + q == 0.0 {
        return 0.0;
    }
    n as f64 * (p - q) * (p - q) / (2.0 * (p + q))
}

/// Mean connectivity matrix after aligning blocks across samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedConnectivity {
    pub k_hat: usize,
    pub n_used: usize,
    pub p_hat: Vec<Vec<f64>>,
}

/// Averages `P` over the samples whose block count equals the modal one,
/// after relabelling each sample's blocks by decreasing size (ties broken by
/// smallest member). `p[s]` is indexed by the labels of `samples[s]`.
/// Returns `None` when there are no samples.
pub fn order_blocks_by_size(samples: &[Vec<usize>], p: &[Vec<Vec<f64>>]) -> Result<Option<AlignedConnectivity>> {
    if samples.len() != p.len() {
        return Err(invalid("one connectivity matrix is needed per sample"));
    }
    let occupied = |z: &[usize]| -> Vec<(usize, usize, usize)> {
        // (label, size, smallest member)
        let mut info: HashMap<usize, (usize, usize)> = HashMap::new();
        for (i, &c) in z.iter().enumerate() {
            let e = info.entry(c).or_insert((0, i));
            e.0 += 1;
        }
        let mut v: Vec<_> = info.into_iter().map(|(c, (s, m))| (c, s, m)).collect();
        v.sort_by(|x, y| y.1.cmp(&x.1).then(x.2.cmp(&y.2)));
        v
    };
    let mut freq: HashMap<usize, usize> = HashMap::new();
    let orders: Vec<_> = samples.iter().map(|z| occupied(z)).collect();
    orders.iter().for_each(|o| *freq.entry(o.len()).or_default() += 1);
    let Some(k_hat) = freq.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&k, _)| k) else {
        return Ok(None);
    };
    let mut acc = vec![vec![0.0; k_hat]; k_hat];
    let mut used = 0;
    for (o, ps) in orders.iter().zip(p) {
        if o.len() != k_hat {
            continue;
        }
        for (a, &(la, _, _)) in o.iter().enumerate() {
            for (b, &(lb, _, _)) in o.iter().enumerate() {
                let v = ps
                    .get(la)
                    .and_then(|r| r.get(lb))
                    .ok_or_else(|| invalid(format!("label {la} or {lb} outside the connectivity matrix")))?;
                acc[a][b] += v;
            }
        }
        used += 1;
    }
    acc.iter_mut().flatten().for_each(|v| *v /= used as f64);
    Ok(Some(AlignedConnectivity {
        k_hat,
        n_used: used,
        p_hat: acc,
    }))
}
