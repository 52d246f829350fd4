//! Component conditional updates shared by the four samplers.

use rand::Rng;

use super::connectivity::ConnectivityState;
use super::NewBlockDraw;
use crate::distributions::special::{ln_beta, log_sum_exp};
use crate::distributions::{sample_beta, sample_truncated_beta, GibbsWeights};
use crate::error::{Error, Result};
use crate::netcore::{BlockState, Graph, Target};

/// Draws an index with probability proportional to `exp(log_weights)` by
/// inversion in index order.
pub fn sample_log_categorical<R: Rng + ?Sized>(rng: &mut R, log_weights: &[f64]) -> usize {
    let norm = log_sum_exp(log_weights);
    debug_assert!(norm.is_finite(), "no finite weight among {log_weights:?}");
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (idx, &w) in log_weights.iter().enumerate() {
        let p = (w - norm).exp();
        if p > 0.0 {
            last = idx;
        }
        acc += p;
        if u < acc {
            return idx;
        }
    }
    last
}

fn uniform_open<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let x = lo + rng.random::<f64>() * (hi - lo);
        if x > lo && x < hi {
            return x;
        }
    }
}

/// Standard beta-binomial update: `P_ab ~ Beta(O_ab + alpha, n_ab - O_ab + beta)`.
pub fn update_p_standard<R: Rng + ?Sized>(
    rng: &mut R,
    state: &BlockState,
    alpha: f64,
    beta: f64,
) -> Result<ConnectivityState> {
    let k = state.k();
    let mut p = ConnectivityState::zeros(k, None);
    for a in 0..k {
        for b in a..k {
            let o = state.edge_count(a, b) as f64;
            let cap = state.pair_capacity(a, b) as f64;
            p.set(a, b, sample_beta(rng, o + alpha, cap - o + beta)?);
        }
    }
    Ok(p)
}

/// Assortative update given the cutoff: diagonal entries from
/// `Beta(O+1, n-O+1)` truncated to `(eps, 1)`, off-diagonal entries truncated
/// to `(0, eps)`.
pub fn update_p_assortative<R: Rng + ?Sized>(
    rng: &mut R,
    state: &BlockState,
    epsilon: f64,
) -> Result<ConnectivityState> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("cutoff {epsilon} outside (0,1)")));
    }
    let k = state.k();
    let mut p = ConnectivityState::zeros(k, Some(epsilon));
    for a in 0..k {
        for b in a..k {
            let o = state.edge_count(a, b) as f64;
            let cap = state.pair_capacity(a, b) as f64;
            let (lo, hi) = if a == b { (epsilon, 1.0) } else { (0.0, epsilon) };
            p.set(a, b, sample_truncated_beta(rng, o + 1.0, cap - o + 1.0, lo, hi)?);
        }
    }
    Ok(p)
}

/// Inverse CDF of the cutoff conditional `∝ eps^{-k(k-1)/2}` on
/// `(q_bar, p_min)` for `k >= 2`, or of `∝ (1 - eps)^{-1}` on `(0, p_min)` for
/// `k = 1` (where `q_bar` is ignored).
pub fn epsilon_inverse_cdf(k: usize, p_min: f64, q_bar: f64, w: f64) -> f64 {
    match k {
        0 => unreachable!("cutoff needs at least one block"),
        1 => -((-p_min).ln_1p() * w).exp_m1(),
        2 => (w * (p_min.ln() - q_bar.ln()) + q_bar.ln()).exp(),
        _ => {
            // ((w p^c + (1-w) q^c))^(1/c) with c = 1 - k(k-1)/2 < 0, in log space
            let c = 1.0 - (k * (k - 1) / 2) as f64;
            let (lp, lq) = (p_min.ln(), q_bar.ln());
            let ln_mix = c * lq + log_sum_exp(&[(1.0 - w).ln(), w.ln() + c * (lp - lq)]);
            (ln_mix / c).exp()
        }
    }
}

/// Cutoff update by slice sampling on `(1 - eps)^{-k}` followed by the
/// inverse CDF of `eps^{-k(k-1)/2}` on the slice.
pub fn update_epsilon<R: Rng + ?Sized>(rng: &mut R, p: &ConnectivityState) -> Result<f64> {
    let k = p.k();
    let eps = p
        .epsilon()
        .ok_or_else(|| Error::InvariantViolation("cutoff update without a current cutoff".into()))?;
    let p_min = p.min_diagonal();
    let q = p.max_off_diagonal();
    if k >= 2 && p_min <= q {
        return Err(Error::InvariantViolation(format!("min diagonal {p_min} <= max off-diagonal {q}")));
    }
    let w: f64 = rng.random();
    let (lo, next) = if k == 1 {
        (0.0, epsilon_inverse_cdf(1, p_min, 0.0, w))
    } else {
        // y ~ U(0, (1-eps)^{-k}) gives the slice bound 1 - y^{-1/k}
        // = 1 - (1-eps) u^{-1/k} with u ~ U(0,1)
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let slice = 1.0 - (1.0 - eps) * (-u.ln() / k as f64).exp();
        let q_bar = q.max(slice);
        (q_bar, epsilon_inverse_cdf(k, p_min, q_bar, w))
    };
    Ok(if next <= lo {
        lo.next_up()
    } else if next >= p_min {
        p_min.next_down()
    } else {
        next
    })
}

#[inline]
fn block_log_lik(ln_p: &[f64], ln_q: &[f64], r: &[usize], sizes: &[usize]) -> f64 {
    let mut s = 0.0;
    for c in 0..r.len() {
        let (rc, nc) = (r[c], sizes[c]);
        if rc > 0 {
            s += rc as f64 * ln_p[c];
        }
        if nc > rc {
            s += (nc - rc) as f64 * ln_q[c];
        }
    }
    s
}

fn row_log_lik(row: &[f64], r: &[usize], sizes: &[usize]) -> f64 {
    let mut s = 0.0;
    for c in 0..r.len() {
        let (rc, nc) = (r[c], sizes[c]);
        if rc > 0 {
            s += rc as f64 * row[c].ln();
        }
        if nc > rc {
            s += (nc - rc) as f64 * (-row[c]).ln_1p();
        }
    }
    s
}

/// Reusable buffers for node updates.
#[derive(Debug, Default)]
pub struct Scratch {
    r: Vec<usize>,
    weights: Vec<f64>,
}

/// Log full-conditional weights (unnormalized) of the fixed-k label update
/// for a detached node with block edge counts `r`.
fn fixed_k_weights(state: &BlockState, p: &ConnectivityState, r: &[usize], gamma: f64, flat: bool, out: &mut Vec<f64>) {
    out.clear();
    for a in 0..state.k() {
        let prior = (state.size(a) as f64 + gamma).ln();
        let lik = if flat {
            0.0
        } else {
            block_log_lik(p.ln_p_row(a), p.ln_q_row(a), r, state.sizes())
        };
        out.push(prior + lik);
    }
}

/// Fixed-k label update: `p(z_i = a) ∝ (n_a(z_{-i}) + gamma) Π_j P_{a z_j}^{A_ij} (1 - P_{a z_j})^{1 - A_ij}`.
pub fn update_z_fixed_k<R: Rng + ?Sized>(
    rng: &mut R,
    g: &Graph,
    i: usize,
    state: &mut BlockState,
    p: &ConnectivityState,
    gamma: f64,
    scratch: &mut Scratch,
    ignore_likelihood: bool,
) -> usize {
    debug_assert!(!state.is_compacting());
    state.node_block_edge_counts_into(g, i, &mut scratch.r);
    state.detach(i, &mut scratch.r);
    fixed_k_weights(state, p, &scratch.r, gamma, ignore_likelihood, &mut scratch.weights);
    let a = sample_log_categorical(rng, &scratch.weights);
    state.attach(i, Target::Existing(a), &scratch.r)
}

/// Normalized fixed-k full conditional of node `i` (for inspection).
pub fn fixed_k_probabilities(g: &Graph, i: usize, state: &BlockState, p: &ConnectivityState, gamma: f64) -> Vec<f64> {
    let mut s = state.clone();
    let mut r = s.node_block_edge_counts(g, i);
    s.detach(i, &mut r);
    let mut w = Vec::new();
    fixed_k_weights(&s, p, &r, gamma, false, &mut w);
    normalize(&w)
}

fn normalize(log_w: &[f64]) -> Vec<f64> {
    let norm = log_sum_exp(log_w);
    log_w.iter().map(|&w| (w - norm).exp()).collect()
}

/// `ln m(A_i)`: the node's likelihood with a new block's connection
/// probabilities integrated against Beta(alpha, beta).
pub fn ln_marginal_new_block(r: &[usize], sizes: &[usize], alpha: f64, beta: f64) -> f64 {
    let base = ln_beta(alpha, beta);
    r.iter()
        .zip(sizes)
        .map(|(&rb, &nb)| ln_beta(rb as f64 + alpha, (nb - rb) as f64 + beta) - base)
        .sum()
}

/// `ln m(A_i)` for node `i` against the other nodes' blocks.
pub fn marginal_likelihood_new_block(g: &Graph, state: &BlockState, i: usize, alpha: f64, beta: f64) -> f64 {
    let mut s = state.clone();
    let mut r = s.node_block_edge_counts(g, i);
    if let Some(_c) = s.detach(i, &mut r) {
        // r is compacted along with the labels
    }
    ln_marginal_new_block(&r, s.sizes(), alpha, beta)
}

fn unknown_k_standard_weights(
    state: &BlockState,
    p: &ConnectivityState,
    r: &[usize],
    weights: &GibbsWeights,
    alpha: f64,
    beta: f64,
    flat: bool,
    out: &mut Vec<f64>,
) {
    out.clear();
    let n = state.n();
    for a in 0..state.k() {
        let lik = if flat {
            0.0
        } else {
            block_log_lik(p.ln_p_row(a), p.ln_q_row(a), r, state.sizes())
        };
        out.push((state.size(a) as f64 + 1.0).ln() + lik);
    }
    let k_minus = state.k();
    let new = if k_minus == 0 {
        0.0
    } else {
        let m = if flat {
            0.0
        } else {
            ln_marginal_new_block(r, state.sizes(), alpha, beta)
        };
        weights.ln_new_block_ratio(n, k_minus) + m
    };
    out.push(new);
}

/// Unknown-k label update under the standard prior. Existing blocks weigh
/// `(n_a + 1) × likelihood`; a new block weighs
/// `k(k - lambda) / (n - 1 - k + lambda) × m(A_i)`. Empty blocks are removed
/// from `P` and new blocks appended to it. Returns the node's new label.
#[allow(clippy::too_many_arguments)]
pub fn update_z_unknown_standard<R: Rng + ?Sized>(
    rng: &mut R,
    g: &Graph,
    i: usize,
    state: &mut BlockState,
    p: &mut ConnectivityState,
    weights: &GibbsWeights,
    alpha: f64,
    beta: f64,
    new_draw: NewBlockDraw,
    scratch: &mut Scratch,
    ignore_likelihood: bool,
) -> Result<usize> {
    debug_assert!(state.is_compacting());
    state.node_block_edge_counts_into(g, i, &mut scratch.r);
    if let Some(c) = state.detach(i, &mut scratch.r) {
        p.apply_compaction(c);
    }
    unknown_k_standard_weights(state, p, &scratch.r, weights, alpha, beta, ignore_likelihood, &mut scratch.weights);
    let choice = sample_log_categorical(rng, &scratch.weights);
    if choice < state.k() {
        return Ok(state.attach(i, Target::Existing(choice), &scratch.r));
    }
    let k = state.k();
    let mut row = Vec::with_capacity(k);
    for b in 0..k {
        let v = match new_draw {
            NewBlockDraw::Conditional => {
                let (rb, nb) = (scratch.r[b] as f64, state.size(b) as f64);
                sample_beta(rng, rb + alpha, nb - rb + beta)?
            }
            NewBlockDraw::Prior => sample_beta(rng, alpha, beta)?,
        };
        row.push(v);
    }
    let diag = sample_beta(rng, alpha, beta)?;
    p.push_block(&row, diag);
    Ok(state.attach(i, Target::New, &scratch.r))
}

/// Fills `aux` up to `m` auxiliary blocks drawn from the prior given the
/// cutoff: entries towards the `k` existing blocks from `U(0, eps)` and the
/// diagonal from `U(eps, 1)`.
pub fn draw_auxiliary_blocks<R: Rng + ?Sized>(rng: &mut R, k: usize, eps: f64, m: usize, aux: &mut Vec<(Vec<f64>, f64)>) {
    while aux.len() < m {
        let row = (0..k).map(|_| uniform_open(rng, 0.0, eps)).collect();
        aux.push((row, uniform_open(rng, eps, 1.0)));
    }
}

/// `ln[(1/m) Σ_j Π_b P_jb^{r_b} (1 - P_jb)^{n_b - r_b}]`: the Monte Carlo
/// estimate of a new block's marginal likelihood from auxiliary rows.
pub fn ln_auxiliary_average(aux: &[(Vec<f64>, f64)], r: &[usize], sizes: &[usize]) -> f64 {
    let terms: Vec<f64> = aux.iter().map(|(row, _)| row_log_lik(row, r, sizes)).collect();
    log_sum_exp(&terms) - (aux.len() as f64).ln()
}

/// Unknown-k label update under the assortative prior using `m` auxiliary
/// blocks whose parameters are drawn from the prior given the cutoff. When
/// node `i` is a singleton its current parameters are reused as the first
/// auxiliary block. Returns the node's new label.
#[allow(clippy::too_many_arguments)]
pub fn update_z_unknown_assortative<R: Rng + ?Sized>(
    rng: &mut R,
    g: &Graph,
    i: usize,
    state: &mut BlockState,
    p: &mut ConnectivityState,
    weights: &GibbsWeights,
    m: usize,
    scratch: &mut Scratch,
    ignore_likelihood: bool,
) -> Result<usize> {
    debug_assert!(state.is_compacting());
    let eps = p
        .epsilon()
        .ok_or_else(|| Error::InvariantViolation("assortative update without a cutoff".into()))?;
    let old = state.label(i);
    let mut reused = None;
    if state.size(old) == 1 {
        reused = Some((p.row(old).to_vec(), p.get(old, old)));
    }
    state.node_block_edge_counts_into(g, i, &mut scratch.r);
    if let Some(c) = state.detach(i, &mut scratch.r) {
        p.apply_compaction(c);
        if let Some((row, _)) = reused.as_mut() {
            row.swap_remove(c.removed);
        }
    }
    let k = state.k();
    let mut aux: Vec<(Vec<f64>, f64)> = Vec::with_capacity(m);
    if let Some(first) = reused {
        aux.push(first);
    }
    draw_auxiliary_blocks(rng, k, eps, m, &mut aux);

    let w = &mut scratch.weights;
    w.clear();
    for a in 0..k {
        let lik = if ignore_likelihood {
            0.0
        } else {
            block_log_lik(p.ln_p_row(a), p.ln_q_row(a), &scratch.r, state.sizes())
        };
        w.push((state.size(a) as f64 + 1.0).ln() + lik);
    }
    let aux_prior = if k == 0 {
        0.0
    } else {
        weights.ln_new_block_ratio(state.n(), k)
    } - (m as f64).ln();
    for (row, _) in &aux {
        let lik = if ignore_likelihood {
            0.0
        } else {
            row_log_lik(row, &scratch.r, state.sizes())
        };
        w.push(aux_prior + lik);
    }
    let choice = sample_log_categorical(rng, w);
    if choice < k {
        return Ok(state.attach(i, Target::Existing(choice), &scratch.r));
    }
    let (row, diag) = &aux[choice - k];
    p.push_block(row, *diag);
    Ok(state.attach(i, Target::New, &scratch.r))
}
