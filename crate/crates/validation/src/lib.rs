//! Independent reference computations for the acceptance checks: exact
//! posteriors by enumeration, the Gnedin partition prior in closed form and
//! Simpson quadrature. Nothing here calls into the samplers.

use std::collections::HashMap;

use asbm_core::Graph;

/// Distribution over canonical partitions.
pub type PartitionLaw = HashMap<Vec<usize>, f64>;

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn rising(x: f64, t: usize) -> f64 {
    (0..t).map(|i| x + i as f64).product()
}

/// Canonical relabelling by first appearance.
pub fn canonical(z: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    z.iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// All set partitions of `n` items as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut z = vec![0; n];
    fn rec(i: usize, max: usize, z: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == z.len() {
            out.push(z.clone());
            return;
        }
        for c in 0..=max + 1 {
            z[i] = c;
            rec(i + 1, max.max(c), z, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut z, &mut out);
    }
    out
}

/// Beta-binomial marginal of one block pair under uniform priors:
/// `B(o+1, m-o+1) = o!(m-o)!/(m+1)!`.
pub fn pair_marginal(o: usize, m: usize) -> f64 {
    factorial(o) * factorial(m - o) / factorial(m + 1)
}

/// Likelihood of `z` with every P entry integrated against Uniform(0,1).
pub fn collapsed_likelihood(g: &Graph, z: &[usize], k: usize) -> f64 {
    let mut sizes = vec![0usize; k];
    z.iter().for_each(|&c| sizes[c] += 1);
    let mut edges = vec![vec![0; k]; k];
    for (i, j) in g.edges() {
        let (a, b) = (z[i].min(z[j]), z[i].max(z[j]));
        edges[a][b] += 1;
    }
    let mut l = 1.0;
    for a in 0..k {
        for b in a..k {
            let pairs = if a == b { sizes[a] * sizes[a].saturating_sub(1) / 2 } else { sizes[a] * sizes[b] };
            l *= pair_marginal(edges[a][b], pairs);
        }
    }
    l
}

pub fn normalize(w: PartitionLaw) -> PartitionLaw {
    let total: f64 = w.values().sum();
    w.into_iter().map(|(z, v)| (z, v / total)).collect()
}

/// Exact posterior over partitions for the fixed-k standard model with a
/// symmetric Dirichlet(1) on block probabilities.
pub fn exact_fixed_k(g: &Graph, k: usize) -> PartitionLaw {
    let n = g.n();
    let mut w: PartitionLaw = HashMap::new();
    for code in 0..k.pow(n as u32) {
        let z: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k).collect();
        let mut sizes = vec![0; k];
        z.iter().for_each(|&c| sizes[c] += 1);
        let prior = factorial(k - 1) * sizes.iter().map(|&s| factorial(s)).product::<f64>() / factorial(n + k - 1);
        *w.entry(canonical(&z)).or_default() += prior * collapsed_likelihood(g, &z, k);
    }
    normalize(w)
}

/// Gnedin partition prior written out directly from its closed form.
pub fn gnedin_partition_prior(sizes: &[usize], lambda: f64) -> f64 {
    let n: usize = sizes.iter().sum();
    let k = sizes.len();
    let v = factorial(k - 1) * rising(1.0 - lambda, k - 1) * rising(lambda, n - k)
        / (factorial(n - 1) * rising(1.0 + lambda, n - 1));
    v * sizes.iter().map(|&s| factorial(s)).product::<f64>()
}

pub fn exact_unknown_k(g: &Graph, lambda: f64) -> (PartitionLaw, f64) {
    let mut w = HashMap::new();
    let mut prior_mass = 0.0;
    for z in partitions(g.n()) {
        let k = z.iter().max().unwrap() + 1;
        let mut sizes = vec![0; k];
        z.iter().for_each(|&c| sizes[c] += 1);
        let prior = gnedin_partition_prior(&sizes, lambda);
        prior_mass += prior;
        w.insert(z.clone(), prior * collapsed_likelihood(g, &z, k));
    }
    (normalize(w), prior_mass)
}

pub fn empirical(samples: impl Iterator<Item = Vec<usize>>) -> PartitionLaw {
    let mut w: PartitionLaw = HashMap::new();
    for z in samples {
        *w.entry(canonical(&z)).or_default() += 1.0;
    }
    normalize(w)
}

pub fn total_variation(p: &PartitionLaw, q: &PartitionLaw) -> f64 {
    let mut keys: Vec<&Vec<usize>> = p.keys().chain(q.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys.iter().map(|z| (p.get(*z).unwrap_or(&0.0) - q.get(*z).unwrap_or(&0.0)).abs()).sum::<f64>()
}

pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    let h = (hi - lo) / steps as f64;
    let inner: f64 = (1..steps).map(|i| f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(lo) + f(hi) + inner)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=7).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, [1, 2, 5, 15, 52, 203, 877]);
    }

    #[test]
    fn gnedin_prior_is_a_distribution() {
        for lambda in [0.2, 0.45, 0.8] {
            for n in 1..=7 {
                let total: f64 = partitions(n)
                    .iter()
                    .map(|z| {
                        let mut sizes = vec![0; z.iter().max().unwrap() + 1];
                        z.iter().for_each(|&c| sizes[c] += 1);
                        gnedin_partition_prior(&sizes, lambda)
                    })
                    .sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} lambda={lambda}: {total}");
            }
        }
    }

    #[test]
    fn edgeless_pair_posterior_is_the_prior() {
        // one non-edge, marginal 1/2 whichever blocks it falls between
        let g = Graph::empty(2);
        let law = exact_fixed_k(&g, 2);
        // labelled Dirichlet(1): together 2 * 2!/3! = 2/3, apart 2 * 1/3! = 1/3
        let together = 2.0 / 3.0 * 0.5;
        let apart = 1.0 / 3.0 * 0.5;
        let p = together / (together + apart);
        assert!((law[&vec![0, 0]] - p).abs() < 1e-12);
    }

    #[test]
    fn quadrature_and_tv() {
        assert!((simpson(|x| x * x, 0.0, 3.0, 10) - 9.0).abs() < 1e-12);
        let p: PartitionLaw = [(vec![0, 0], 0.25), (vec![0, 1], 0.75)].into_iter().collect();
        let q: PartitionLaw = [(vec![0, 0], 0.5), (vec![0, 1], 0.5)].into_iter().collect();
        assert!((total_variation(&p, &q) - 0.25).abs() < 1e-15);
        assert_eq!(canonical(&[3, 3, 1, 0, 1]), vec![0, 0, 1, 2, 1]);
    }
}
