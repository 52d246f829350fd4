//! Mixture deviance used as the scalar convergence summary.

use crate::error::{invalid, Result};
use crate::netcore::Graph;

/// `-2 Σ_{i<j} ln Σ_a Σ_b P_ab^{A_ij} (1 - P_ab)^{1 - A_ij} n_a n_b / n²`.
///
/// The inner sum only depends on whether a pair is linked, so the total is
/// `-2 (|E| ln S1 + (N - |E|) ln S0)` over the `N` node pairs. `p` is indexed
/// by label and may contain unused labels.
pub fn deviance(g: &Graph, z: &[usize], p: &[Vec<f64>]) -> Result<f64> {
    let n = g.n();
    if z.len() != n {
        return Err(invalid(format!("{} labels for {n} nodes", z.len())));
    }
    let k = p.len();
    if p.iter().any(|row| row.len() != k) {
        return Err(invalid("connectivity matrix is not square"));
    }
    let mut sizes = vec![0usize; k];
    for &c in z {
        if c >= k {
            return Err(invalid(format!("label {c} outside 0..{k}")));
        }
        sizes[c] += 1;
    }
    // summing sorted terms makes the result exactly invariant to relabelling
    let n2 = (n * n) as f64;
    let mut t1 = Vec::with_capacity(k * k);
    let mut t0 = Vec::with_capacity(k * k);
    for a in (0..k).filter(|&a| sizes[a] > 0) {
        for b in (0..k).filter(|&b| sizes[b] > 0) {
            let w = (sizes[a] * sizes[b]) as f64 / n2;
            t1.push(p[a][b] * w);
            t0.push((1.0 - p[a][b]) * w);
        }
    }
    t1.sort_by(f64::total_cmp);
    t0.sort_by(f64::total_cmp);
    let (s1, s0): (f64, f64) = (t1.iter().sum(), t0.iter().sum());
    let e = g.n_edges() as f64;
    let non = (g.n_pairs() - g.n_edges()) as f64;
    let term = |count: f64, s: f64| if count == 0.0 { 0.0 } else { count * s.ln() };
    Ok(-2.0 * (term(e, s1) + term(non, s0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(g: &Graph, z: &[usize], p: &[Vec<f64>]) -> f64 {
        let n = g.n();
        let k = p.len();
        let mut sizes = vec![0.0; k];
        z.iter().for_each(|&c| sizes[c] += 1.0);
        let mut total = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let a_ij = g.has_edge(i, j);
                let mut inner = 0.0;
                for a in 0..k {
                    for b in 0..k {
                        let f = if a_ij { p[a][b] } else { 1.0 - p[a][b] };
                        inner += f * sizes[a] * sizes[b] / (n * n) as f64;
                    }
                }
                total += inner.ln();
            }
        }
        -2.0 * total
    }

    #[test]
    fn single_pair() {
        let expect = -2.0 * 0.5f64.ln();
        assert!((deviance(&Graph::empty(2), &[0, 0], &[vec![0.5]]).unwrap() - expect).abs() < 1e-15);
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!((deviance(&g, &[0, 0], &[vec![0.5]]).unwrap() - 1.3863).abs() < 1e-4);
    }

    #[test]
    fn path_matches_direct_sum() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
        let d = deviance(&g, &[0, 0, 1], &p).unwrap();
        // S1 = (0.9*4 + 0.1*4 + 0.9*1)/9 = 4.9/9; S0 = 4.1/9
        let hand = -2.0 * (2.0 * (4.9f64 / 9.0).ln() + (4.1f64 / 9.0).ln());
        assert!((d - hand).abs() < 1e-12);
        assert!((d - brute_force(&g, &[0, 0, 1], &p)).abs() < 1e-12);
    }

    #[test]
    fn label_permutation_invariance() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)]).unwrap();
        let p = vec![vec![0.7, 0.2, 0.05], vec![0.2, 0.6, 0.1], vec![0.05, 0.1, 0.8]];
        let z = [0, 0, 1, 1, 2, 2];
        let d = deviance(&g, &z, &p).unwrap();
        assert!((d - brute_force(&g, &z, &p)).abs() < 1e-11);
        let perm = [2, 0, 1];
        let zp: Vec<usize> = z.iter().map(|&c| perm[c]).collect();
        let mut pp = vec![vec![0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                pp[perm[a]][perm[b]] = p[a][b];
            }
        }
        assert_eq!(deviance(&g, &zp, &pp).unwrap(), d);
    }
}
