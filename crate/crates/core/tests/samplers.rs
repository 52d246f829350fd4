use std::collections::HashMap;

use asbm_core::distributions::special::{ln_beta, ln_gamma, log_sum_exp};
use asbm_core::distributions::{GibbsWeights, RngStream};
use asbm_core::generators::generate_sbm_sizes;
use asbm_core::samplers::{run_chain, ChainTrace, InitLabels, NewBlockDraw, SamplerConfig, Variant};
use asbm_core::{BlockState, Graph};

fn six_node_graph() -> Graph {
    Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (2, 3)]).unwrap()
}

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(z: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if z.len() == n {
            out.push(z.clone());
            return;
        }
        let k = z.iter().max().map_or(0, |m| m + 1);
        for c in 0..=k {
            z.push(c);
            rec(z, n, out);
            z.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

/// `Σ_{a≤b} ln[B(O_ab + α, n_ab - O_ab + β) / B(α, β)]`.
fn ln_marginal_likelihood(s: &BlockState, alpha: f64, beta: f64) -> f64 {
    let mut t = 0.0;
    for a in 0..s.k() {
        for b in a..s.k() {
            let o = s.edge_count(a, b) as f64;
            let cap = s.pair_capacity(a, b) as f64;
            t += ln_beta(o + alpha, cap - o + beta) - ln_beta(alpha, beta);
        }
    }
    t
}

fn normalize(map: HashMap<Vec<usize>, f64>) -> HashMap<Vec<usize>, f64> {
    let norm = log_sum_exp(&map.values().copied().collect::<Vec<_>>());
    map.into_iter().map(|(z, w)| (z, (w - norm).exp())).collect()
}

fn total_variation(exact: &HashMap<Vec<usize>, f64>, counts: &HashMap<Vec<usize>, usize>, total: usize) -> f64 {
    let mut tv = 0.0;
    for (z, p) in exact {
        let q = counts.get(z).copied().unwrap_or(0) as f64 / total as f64;
        tv += (p - q).abs();
    }
    let unseen: usize = counts.iter().filter(|(z, _)| !exact.contains_key(*z)).map(|(_, c)| c).sum();
    0.5 * (tv + unseen as f64 / total as f64)
}

fn partition_counts(trace: &ChainTrace) -> HashMap<Vec<usize>, usize> {
    let mut counts = HashMap::new();
    for r in &trace.records {
        *counts.entry(BlockState::canonical_labels(&r.z)).or_insert(0) += 1;
    }
    counts
}

/// Exact posterior over labelings for the standard fixed-k model with π and
/// P integrated out.
fn fixed_k_posterior(g: &Graph, k: usize, gamma: f64, alpha: f64, beta: f64) -> HashMap<Vec<usize>, f64> {
    let n = g.n();
    let mut out = HashMap::new();
    for code in 0..k.pow(n as u32) {
        let z: Vec<usize> = (0..n).map(|i| (code / k.pow(i as u32)) % k).collect();
        let s = BlockState::from_labels_fixed(g, &z, k).unwrap();
        let prior: f64 = s.sizes().iter().map(|&c| ln_gamma(c as f64 + gamma) - ln_gamma(gamma)).sum();
        out.insert(z, prior + ln_marginal_likelihood(&s, alpha, beta));
    }
    normalize(out)
}

/// Exact posterior over set partitions under the Gnedin prior (unit
/// Dirichlet scale) with P integrated out; `flat` drops the likelihood.
fn unknown_k_posterior(g: &Graph, lambda: f64, alpha: f64, beta: f64, flat: bool) -> HashMap<Vec<usize>, f64> {
    let w = GibbsWeights::new(lambda).unwrap();
    let mut out = HashMap::new();
    for z in set_partitions(g.n()) {
        let s = BlockState::from_labels(g, &z).unwrap();
        let eppf = w.ln_v(g.n(), s.k()).unwrap() + s.sizes().iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>();
        let lik = if flat { 0.0 } else { ln_marginal_likelihood(&s, alpha, beta) };
        out.insert(z, eppf + lik);
    }
    normalize(out)
}

fn long_config(variant: Variant, seed: u64) -> SamplerConfig {
    SamplerConfig {
        variant,
        iterations: 201_000,
        burn_in: 1_000,
        thinning: 1,
        seed,
        ..SamplerConfig::new(variant)
    }
}

#[test]
fn standard_fixed_k_matches_enumeration() {
    let g = six_node_graph();
    let exact = fixed_k_posterior(&g, 2, 1.0, 1.0, 1.0);
    let cfg = SamplerConfig { k: Some(2), ..long_config(Variant::SbmFixed, 1) };
    let trace = run_chain(&g, &cfg).unwrap();
    let mut counts = HashMap::new();
    for r in &trace.records {
        *counts.entry(r.z.clone()).or_insert(0) += 1;
    }
    let tv = total_variation(&exact, &counts, trace.len());
    println!("fixed-k TV {tv:.4}");
    assert!(tv < 0.05, "{tv}");
}

#[test]
fn standard_unknown_k_matches_enumeration() {
    let g = six_node_graph();
    let exact = unknown_k_posterior(&g, 0.45, 1.0, 1.0, false);
    let trace = run_chain(&g, &long_config(Variant::Sbm, 2)).unwrap();
    let tv = total_variation(&exact, &partition_counts(&trace), trace.len());
    println!("unknown-k TV {tv:.4}");
    assert!(tv < 0.05, "{tv}");
}

#[test]
fn prior_new_block_draw_keeps_bookkeeping() {
    // P rows for new blocks from the prior: the chain still runs and keeps
    // the bookkeeping consistent
    let g = six_node_graph();
    let cfg = SamplerConfig {
        new_block_draw: NewBlockDraw::Prior,
        iterations: 2_000,
        burn_in: 0,
        ..long_config(Variant::Sbm, 3)
    };
    let trace = run_chain(&g, &cfg).unwrap();
    for r in &trace.records {
        assert_eq!(r.p.len(), r.k);
        assert_eq!(BlockState::canonical_labels(&r.z).iter().max().unwrap() + 1, r.k);
    }
}

#[test]
fn prior_only_chains_follow_partition_prior() {
    let g = six_node_graph();
    let exact = unknown_k_posterior(&g, 0.45, 1.0, 1.0, true);
    for (variant, seed) in [(Variant::Sbm, 4), (Variant::Asbm, 5)] {
        let cfg = SamplerConfig {
            ignore_likelihood: true,
            ..long_config(variant, seed)
        };
        let trace = run_chain(&g, &cfg).unwrap();
        let tv = total_variation(&exact, &partition_counts(&trace), trace.len());
        println!("{variant} prior-only TV {tv:.4}");
        assert!(tv < 0.05, "{variant}: {tv}");
    }
}

fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn sweep_order_reversal_is_indistinguishable() {
    let (g, _) = generate_sbm_sizes(
        &mut RngStream::new(6),
        &[8, 8],
        &[vec![0.6, 0.1], vec![0.1, 0.6]],
    )
    .unwrap();
    for variant in [Variant::Sbm, Variant::Asbm] {
        let base = SamplerConfig {
            variant,
            iterations: 1_000 + 2_000 * 10,
            burn_in: 1_000,
            thinning: 10,
            ..SamplerConfig::new(variant)
        };
        let fwd = run_chain(&g, &SamplerConfig { seed: 7, ..base.clone() }).unwrap();
        let rev = run_chain(&g, &SamplerConfig { seed: 8, reverse_sweep: true, ..base }).unwrap();
        let d = ks_two_sample(fwd.deviances(), rev.deviances());
        let n = fwd.len() as f64;
        let crit = 1.628 * (2.0 / n).sqrt();
        println!("{variant}: KS {d:.4} (critical {crit:.4})");
        assert!(d < crit, "{variant}: {d} >= {crit}");
    }
}

#[test]
fn assortative_traces_respect_the_cutoff() {
    let root = RngStream::new(9);
    for rep in 0..5u64 {
        let (g, _) = generate_sbm_sizes(
            &mut root.split(rep),
            &[10, 10, 10],
            &[vec![0.5, 0.05, 0.05], vec![0.05, 0.4, 0.05], vec![0.05, 0.05, 0.45]],
        )
        .unwrap();
        for variant in [Variant::Asbm, Variant::AsbmFixed] {
            let cfg = SamplerConfig {
                k: Some(3),
                iterations: 600,
                burn_in: 100,
                thinning: 1,
                seed: rep,
                ..SamplerConfig::new(variant)
            };
            let trace = run_chain(&g, &cfg).unwrap();
            for r in &trace.records {
                let eps = r.epsilon.unwrap();
                let k = r.p.len();
                for a in 0..k {
                    assert!(r.p[a][a] > eps);
                    for b in 0..k {
                        if a != b {
                            assert!(r.p[a][b] < eps);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn planted_two_blocks_recover_k() {
    let (g, _) = generate_sbm_sizes(
        &mut RngStream::new(10),
        &[30, 30],
        &[vec![0.5, 0.05], vec![0.05, 0.5]],
    )
    .unwrap();
    for variant in [Variant::Sbm, Variant::Asbm] {
        let cfg = SamplerConfig {
            iterations: 1_500,
            burn_in: 500,
            thinning: 5,
            seed: 11,
            ..SamplerConfig::new(variant)
        };
        let trace = run_chain(&g, &cfg).unwrap();
        let mut freq = HashMap::new();
        trace.ks().into_iter().for_each(|k| *freq.entry(k).or_insert(0) += 1);
        let modal = freq.into_iter().max_by_key(|&(k, c)| (c, std::cmp::Reverse(k))).unwrap().0;
        assert_eq!(modal, 2, "{variant}");
    }
}

#[test]
fn schedule_and_determinism() {
    let g = six_node_graph();
    for variant in [Variant::SbmFixed, Variant::AsbmFixed, Variant::Sbm, Variant::Asbm] {
        let cfg = SamplerConfig {
            k: Some(2),
            iterations: 57,
            burn_in: 7,
            thinning: 5,
            seed: 12,
            ..SamplerConfig::new(variant)
        };
        let a = run_chain(&g, &cfg).unwrap();
        assert_eq!(a.len(), cfg.n_kept());
        assert_eq!(a.len(), 10);
        assert_eq!(a, run_chain(&g, &cfg).unwrap());
        let empty = run_chain(&g, &SamplerConfig { burn_in: 57, ..cfg.clone() }).unwrap();
        assert!(empty.is_empty());
    }
}

#[test]
fn initializations() {
    let g = six_node_graph();
    for init in [InitLabels::Singletons, InitLabels::Given(vec![0, 0, 0, 1, 1, 1]), InitLabels::Random(Some(2))] {
        let cfg = SamplerConfig {
            init,
            iterations: 10,
            burn_in: 0,
            thinning: 1,
            ..SamplerConfig::new(Variant::Asbm)
        };
        assert_eq!(run_chain(&g, &cfg).unwrap().len(), 10);
    }
    let bad = SamplerConfig {
        init: InitLabels::Given(vec![0, 1]),
        ..SamplerConfig::new(Variant::Sbm)
    };
    assert!(run_chain(&g, &bad).is_err());
}

#[test]
fn trace_files_round_trip() {
    let g = six_node_graph();
    for variant in [Variant::SbmFixed, Variant::Asbm] {
        let cfg = SamplerConfig {
            k: Some(3),
            iterations: 40,
            burn_in: 10,
            thinning: 3,
            ..SamplerConfig::new(variant)
        };
        let trace = run_chain(&g, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        trace.write_dir(dir.path()).unwrap();
        let back = ChainTrace::read_dir(dir.path()).unwrap();
        assert_eq!(back.config, trace.config);
        assert_eq!(back.len(), trace.len());
        for (a, b) in back.records.iter().zip(&trace.records) {
            assert_eq!(a.z, b.z);
            assert_eq!(a.k, b.k);
            assert_eq!(a.epsilon, b.epsilon);
            assert_eq!(a.deviance, b.deviance);
            assert_eq!(a.p, b.p);
        }
    }
}
