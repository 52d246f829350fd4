use log::warn;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma};

use super::special::{ln_reg_inc_beta_pair, solve_ln_cdf, Tail};
use crate::error::{invalid, Result};

fn check_shape(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Draw from Beta(alpha, beta).
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, alpha: f64, beta: f64) -> Result<f64> {
    check_shape("alpha", alpha)?;
    check_shape("beta", beta)?;
    let dist = Beta::new(alpha, beta).map_err(|e| invalid(e.to_string()))?;
    Ok(dist.sample(rng))
}

/// Draw from Beta(alpha, beta) restricted to `(lo, hi)` by inversion: a
/// uniform level between `F(lo)` and `F(hi)` is mapped back through the
/// inverse CDF. Levels are handled in log space on whichever tail the
/// interval sits in, so intervals far out in a tail are still sampled exactly.
///
/// If the interval carries no representable mass even in log space, a
/// uniform draw on `(lo, hi)` is returned and a warning logged.
pub fn sample_truncated_beta<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    beta: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    check_shape("alpha", alpha)?;
    check_shape("beta", beta)?;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(invalid(format!("truncation interval ({lo}, {hi}) not inside [0,1]")));
    }
    if lo == 0.0 && hi == 1.0 {
        return sample_beta(rng, alpha, beta);
    }
    let v: f64 = rng.random();
    let (lf_lo, ls_lo) = ln_reg_inc_beta_pair(lo, alpha, beta)?;
    let (lf_hi, ls_hi) = ln_reg_inc_beta_pair(hi, alpha, beta)?;
    let half = -std::f64::consts::LN_2;

    let solved = if lf_hi <= half {
        // interval in the lower half: level = F(lo) + v (F(hi) - F(lo))
        let target = lf_hi + ((lf_lo - lf_hi).exp() * (1.0 - v) + v).ln();
        finite_level(target).map(|t| solve_ln_cdf(t, alpha, beta, lo, hi, Tail::Lower))
    } else if ls_lo <= half {
        // interval in the upper half: survival level between S(hi) and S(lo)
        let target = ls_lo + (v + (1.0 - v) * (ls_hi - ls_lo).exp()).ln();
        finite_level(target).map(|t| solve_ln_cdf(t, alpha, beta, lo, hi, Tail::Upper))
    } else {
        // straddles the median, so the mass is not small
        let (f_lo, f_hi) = (lf_lo.exp(), lf_hi.exp());
        let u = f_lo + v * (f_hi - f_lo);
        Some(if u <= 0.5 {
            solve_ln_cdf(u.ln(), alpha, beta, lo, hi, Tail::Lower)
        } else {
            let s = (1.0 - v) * ls_lo.exp() + v * ls_hi.exp();
            solve_ln_cdf(s.ln(), alpha, beta, lo, hi, Tail::Upper)
        })
    };

    match solved {
        Some(x) => Ok(clamp_open(x?, lo, hi)),
        None => {
            warn!(
                "truncated Beta({alpha}, {beta}) on ({lo}, {hi}) has no representable mass; drawing uniformly"
            );
            Ok(clamp_open(lo + v * (hi - lo), lo, hi))
        }
    }
}

fn finite_level(t: f64) -> Option<f64> {
    t.is_finite().then_some(t)
}

fn clamp_open(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo {
        lo.next_up()
    } else if x >= hi {
        hi.next_down()
    } else {
        x
    }
}

/// Draw from the symmetric Dirichlet(gamma, ..., gamma) on `k` categories.
///
/// Gamma variates are generated in log space (`G(g) = G(g+1) U^{1/g}`) so
/// small concentrations do not underflow to an all-zero vector.
pub fn sample_dirichlet_symmetric<R: Rng + ?Sized>(rng: &mut R, k: usize, gamma: f64) -> Result<Vec<f64>> {
    check_shape("gamma", gamma)?;
    if k == 0 {
        return Err(invalid("Dirichlet needs at least one category"));
    }
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let g1 = Gamma::new(gamma + 1.0, 1.0).map_err(|e| invalid(e.to_string()))?;
    let logs: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.random();
            g1.sample(rng).ln() + u.ln() / gamma
        })
        .collect();
    let norm = super::special::log_sum_exp(&logs);
    let mut out: Vec<f64> = logs.iter().map(|&l| (l - norm).exp()).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    Ok(out)
}
