//! Split potential scale reduction and effective sample size.

use crate::error::{invalid, Result};

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Split-chain R̂: every chain is cut into two halves (the middle draw of an
/// odd-length chain is dropped) and the between-half spread is compared
/// with the within-half variance.
///
/// The between-sequence term uses the population variance of the half means,
/// so stacking identical copies of a chain leaves the value unchanged.
/// Returns `+inf` with a warning when the within-half variance is zero.
pub fn split_rhat(chains: &[&[f64]]) -> Result<f64> {
    let Some(first) = chains.first() else {
        return Err(invalid("split R-hat needs at least one chain"));
    };
    let len = first.len();
    if chains.iter().any(|c| c.len() != len) {
        return Err(invalid("chains have different lengths"));
    }
    if len < 4 {
        return Err(invalid(format!("chains of length {len} are too short for split R-hat")));
    }
    let half = len / 2;
    let halves: Vec<&[f64]> = chains.iter().flat_map(|c| [&c[..half], &c[len - half..]]).collect();
    let means: Vec<f64> = halves.iter().map(|h| mean(h)).collect();
    let w = mean(&halves.iter().map(|h| sample_variance(h)).collect::<Vec<_>>());
    let grand = mean(&means);
    let b_over_l = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / means.len() as f64;
    if !(w > 0.0) {
        log::warn!("split R-hat: zero within-chain variance");
        return Ok(f64::INFINITY);
    }
    let l = half as f64;
    let var_plus = (l - 1.0) / l * w + b_over_l;
    Ok((var_plus / w).sqrt())
}

/// Effective sample size from Geyer's initial monotone positive sequence.
///
/// The integrated autocorrelation time is floored at `1 / log10(N)`, so
/// antithetic chains may report more effective draws than actual ones.
/// A constant chain returns `N` with a warning.
pub fn effective_sample_size(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 8 {
        return Err(invalid(format!("chain of length {n} is too short for ESS")));
    }
    let m = mean(x);
    let c: Vec<f64> = x.iter().map(|v| v - m).collect();
    let autocov = |t: usize| c[..n - t].iter().zip(&c[t..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let c0 = autocov(0);
    if !(c0 > 0.0) {
        log::warn!("ESS: zero variance, reporting the chain length");
        return Ok(n as f64);
    }
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut t = 0;
    while t + 1 < n {
        let pair = (autocov(t) + autocov(t + 1)) / c0;
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        sum += pair;
        prev = pair;
        t += 2;
    }
    let tau = (2.0 * sum - 1.0).max(1.0 / (n as f64).log10());
    Ok(n as f64 / tau)
}

/// ESS divided by the number of draws.
pub fn ess_per_sample(x: &[f64]) -> Result<f64> {
    Ok(effective_sample_size(x)? / x.len() as f64)
}
