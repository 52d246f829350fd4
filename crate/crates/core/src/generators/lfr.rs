//! Benchmark networks with power-law degrees and community sizes.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::netcore::Graph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrSpec {
    pub n: usize,
    /// Degree exponent.
    pub t1: f64,
    /// Community-size exponent.
    pub t2: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub d_avg: f64,
    pub d_max: usize,
    /// Fraction of each node's edges that leave its community.
    pub mu: f64,
}

impl Default for LfrSpec {
    fn default() -> Self {
        LfrSpec {
            n: 200,
            t1: 2.0,
            t2: 2.0,
            n_min: 5,
            n_max: 50,
            d_avg: 20.0,
            d_max: 49,
            mu: 0.2,
        }
    }
}

impl LfrSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n < 2 {
            return bad(format!("n = {} is too small", self.n));
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return bad(format!("community sizes need 1 <= n_min <= n_max, got {}..{}", self.n_min, self.n_max));
        }
        if self.n_max > self.n {
            return bad(format!("n_max = {} exceeds n = {}", self.n_max, self.n));
        }
        if self.d_max >= self.n || self.d_max == 0 {
            return bad(format!("d_max = {} must lie in 1..n", self.d_max));
        }
        if !(self.d_avg >= 1.0 && self.d_avg < self.d_max as f64) {
            return bad(format!("mean degree {} must lie in [1, d_max)", self.d_avg));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return bad(format!("mixing parameter {} outside (0,1)", self.mu));
        }
        if !(self.t1.is_finite() && self.t2.is_finite()) {
            return bad("exponents must be finite".into());
        }
        Ok(())
    }
}

/// Mean of the continuous power law `x^{-t}` on `[lo, hi]`.
pub fn truncated_power_mean(t: f64, lo: f64, hi: f64) -> f64 {
    if (t - 1.0).abs() < 1e-12 {
        (hi - lo) / (hi / lo).ln()
    } else if (t - 2.0).abs() < 1e-12 {
        (hi / lo).ln() / (1.0 / lo - 1.0 / hi)
    } else {
        (1.0 - t) / (2.0 - t) * (hi.powf(2.0 - t) - lo.powf(2.0 - t)) / (hi.powf(1.0 - t) - lo.powf(1.0 - t))
    }
}

fn sample_power<R: Rng + ?Sized>(rng: &mut R, t: f64, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    if (t - 1.0).abs() < 1e-12 {
        lo * (hi / lo).powf(u)
    } else {
        let e = 1.0 - t;
        (lo.powf(e) + u * (hi.powf(e) - lo.powf(e))).powf(1.0 / e)
    }
}

/// Lower cutoff giving the requested mean, by bisection.
pub fn solve_min_degree(t: f64, mean: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut up) = (1.0, hi);
    if truncated_power_mean(t, lo, hi) > mean {
        return Err(Error::Infeasible(format!("mean degree {mean} is below the smallest attainable mean")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if truncated_power_mean(t, mid, hi) < mean {
            lo = mid;
        } else {
            up = mid;
        }
        if up - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + up))
}

/// Discrete power law `s^{-t}` on the integers `lo..=hi`.
struct DiscretePower {
    lo: usize,
    cdf: Vec<f64>,
}

impl DiscretePower {
    fn new(t: f64, lo: usize, hi: usize) -> Self {
        let w: Vec<f64> = (lo..=hi).map(|s| (s as f64).powf(-t)).collect();
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let cdf = w
            .iter()
            .map(|v| {
                acc += v / total;
                acc
            })
            .collect();
        DiscretePower { lo, cdf }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.lo + self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

const SIZE_ATTEMPTS: usize = 10_000;
const SIZE_ROUNDS: usize = 100;

/// Whether nodes with these internal degrees (sorted descending) can all be
/// placed in communities larger than their internal degree.
fn placeable(desc: &[usize], sizes: &[usize]) -> bool {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut slots = 0;
    let mut c = 0;
    for (j, &d) in desc.iter().enumerate() {
        while c < sorted.len() && sorted[c] > d {
            slots += sorted[c];
            c += 1;
        }
        if slots <= j {
            return false;
        }
    }
    true
}

/// Community sizes summing to `n`, each within `[n_min, n_max]`, redrawn
/// until every node fits a community larger than its internal degree.
fn community_sizes<R: Rng + ?Sized>(rng: &mut R, spec: &LfrSpec, internal: &[usize]) -> Result<Vec<usize>> {
    let mut desc = internal.to_vec();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    let smallest_need = desc.last().copied().unwrap_or(0) + 1;
    let lo = spec.n_min.max(smallest_need.min(spec.n_max));
    let law = DiscretePower::new(spec.t2, lo, spec.n_max);
    let bounds = LfrSpec { n_min: lo, ..spec.clone() };
    let mut fallback = None;
    for _ in 0..SIZE_ROUNDS {
        let mut sizes = Vec::new();
        let mut total = 0;
        while total < spec.n {
            let s = law.sample(rng);
            sizes.push(s);
            total += s;
        }
        let last = sizes.pop().expect("at least one draw");
        let rest = total - last;
        let target = spec.n - rest;
        let mut matched = false;
        for _ in 0..SIZE_ATTEMPTS {
            if law.sample(rng) == target {
                matched = true;
                break;
            }
        }
        if matched {
            sizes.push(target);
        } else if !adjust_sizes(&mut sizes, target, &bounds) {
            continue;
        }
        if placeable(&desc, &sizes) {
            return Ok(sizes);
        }
        fallback.get_or_insert(sizes);
    }
    match fallback {
        Some(s) => {
            log::warn!("community sizes cannot hold every internal degree; the largest will be capped");
            Ok(s)
        }
        None => Err(Error::Infeasible(format!(
            "community sizes in [{}, {}] could not be made to sum to {}",
            spec.n_min, spec.n_max, spec.n
        ))),
    }
}

/// Places `rem` leftover nodes: as a community of their own when large
/// enough, otherwise spread over the largest communities with room.
fn adjust_sizes(sizes: &mut Vec<usize>, rem: usize, spec: &LfrSpec) -> bool {
    if rem >= spec.n_min && rem <= spec.n_max {
        sizes.push(rem);
        return true;
    }
    let mut rem = rem;
    while rem > 0 {
        let pick = sizes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < spec.n_max)
            .max_by_key(|&(i, &s)| (s, std::cmp::Reverse(i)))
            .map(|(i, _)| i);
        match pick {
            Some(i) => {
                sizes[i] += 1;
                rem -= 1;
            }
            None => return false,
        }
    }
    true
}

const REWIRE_ATTEMPTS: usize = 1000;

type EdgeSet = HashSet<(usize, usize)>;

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Random stub matching followed by double-edge swaps that repair self
/// loops, repeated edges and pairs rejected by `allowed`. Edges that cannot
/// be repaired are dropped.
fn match_stubs<R, F>(rng: &mut R, mut stubs: Vec<usize>, allowed: F, set: &mut EdgeSet) -> Vec<(usize, usize)>
where
    R: Rng + ?Sized,
    F: Fn(usize, usize) -> bool,
{
    stubs.shuffle(rng);
    let mut good: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut bad = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && allowed(u, v) && set.insert(key(u, v)) {
            good.push((u, v));
        } else {
            bad.push((u, v));
        }
    }
    let mut dropped = 0;
    for (u, v) in bad {
        let mut fixed = false;
        for _ in 0..REWIRE_ATTEMPTS {
            if good.is_empty() {
                break;
            }
            let e = rng.random_range(0..good.len());
            let (mut x, mut y) = good[e];
            if rng.random::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            // (u,v) + (x,y) -> (u,x) + (v,y)
            let ok = |a: usize, b: usize| a != b && allowed(a, b) && !set.contains(&key(a, b));
            if key(u, x) == key(v, y) || !ok(u, x) || !ok(v, y) {
                continue;
            }
            set.remove(&key(x, y));
            set.insert(key(u, x));
            set.insert(key(v, y));
            good[e] = (u, x);
            good.push((v, y));
            fixed = true;
            break;
        }
        if !fixed {
            dropped += 1;
        }
    }
    if dropped > 0 {
        log::debug!("dropped {dropped} unrepairable edges");
    }
    good
}

/// LFR-style benchmark: power-law degrees with the requested mean,
/// power-law community sizes, and edges split so a fraction `mu` of each
/// node's stubs leaves its community.
pub fn generate_lfr<R: Rng + ?Sized>(rng: &mut R, spec: &LfrSpec) -> Result<(Graph, Vec<usize>)> {
    spec.validate()?;
    let n = spec.n;
    let hi = spec.d_max as f64;
    let d_min = solve_min_degree(spec.t1, spec.d_avg, hi)?;
    let mut degree: Vec<usize> = (0..n)
        .map(|_| (sample_power(rng, spec.t1, d_min, hi).round() as usize).clamp(1, spec.d_max))
        .collect();
    if degree.iter().sum::<usize>() % 2 == 1 {
        let i = rng.random_range(0..n);
        if degree[i] < spec.d_max {
            degree[i] += 1;
        } else {
            degree[i] -= 1;
        }
    }
    let mut internal: Vec<usize> = degree
        .iter()
        .map(|&d| (((1.0 - spec.mu) * d as f64).ceil() as usize).min(d))
        .collect();
    let sizes = community_sizes(rng, spec, &internal)?;

    // highest internal degree first, each to a random community with room
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| internal[b].cmp(&internal[a]));
    let mut free = sizes.clone();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    let mut z = vec![0; n];
    for &i in &order {
        let fits: Vec<usize> = (0..sizes.len()).filter(|&c| free[c] > 0 && sizes[c] > internal[i]).collect();
        let c = if fits.is_empty() {
            let open: Vec<usize> = (0..sizes.len()).filter(|&c| free[c] > 0).collect();
            let c = *open
                .iter()
                .max_by_key(|&&c| sizes[c])
                .ok_or_else(|| invalid("community slots exhausted"))?;
            internal[i] = sizes[c] - 1;
            c
        } else {
            fits[rng.random_range(0..fits.len())]
        };
        free[c] -= 1;
        members[c].push(i);
        z[i] = c;
    }

    // each community needs an even number of internal stubs
    for m in &members {
        if m.iter().map(|&i| internal[i]).sum::<usize>() % 2 == 1 {
            let &i = m.iter().filter(|&&i| internal[i] > 0).max_by_key(|&&i| internal[i]).expect("odd sum");
            internal[i] -= 1;
        }
    }

    let mut set = EdgeSet::new();
    let mut edges = Vec::new();
    for m in &members {
        let stubs: Vec<usize> = m.iter().flat_map(|&i| std::iter::repeat_n(i, internal[i])).collect();
        edges.extend(match_stubs(rng, stubs, |_, _| true, &mut set));
    }
    let mut external: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, degree[i] - internal[i])).collect();
    if external.len() % 2 == 1 {
        external.pop();
    }
    edges.extend(match_stubs(rng, external, |u, v| z[u] != z[v], &mut set));
    let g = Graph::from_edges(n, &edges)?;
    Ok((g, z))
}
