use super::special::{ln_gamma, ln_rising};
use crate::error::{invalid, Result};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("lambda must lie in (0,1), got {lambda}")))
    }
}

/// Gnedin's heavy-tailed distribution on the number of components,
/// `p(k) = lambda (1-lambda)_(k-1) / k!` with rising factorials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnedinPrior {
    lambda: f64,
}

impl GnedinPrior {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(GnedinPrior { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ln_pmf(&self, k: usize) -> f64 {
        if k == 0 {
            return f64::NEG_INFINITY;
        }
        self.lambda.ln() + ln_rising(1.0 - self.lambda, k - 1) - ln_gamma(k as f64 + 1.0)
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.ln_pmf(k).exp()
    }
}

/// Partition weights `V_{n,k}` induced by the Gnedin prior with a unit
/// symmetric Dirichlet, together with the predictive allocation rule they
/// imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsWeights {
    lambda: f64,
}

impl From<GnedinPrior> for GibbsWeights {
    fn from(p: GnedinPrior) -> Self {
        GibbsWeights { lambda: p.lambda }
    }
}

impl GibbsWeights {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(GibbsWeights { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `ln V_{n,k} = ln[(k-1)! (1-l)_{k-1} (l)_{n-k} / ((n-1)! (1+l)_{n-1})]`.
    pub fn ln_v(&self, n: usize, k: usize) -> Result<f64> {
        if k == 0 || k > n {
            return Err(invalid(format!("V_(n,k) needs 1 <= k <= n, got n={n}, k={k}")));
        }
        let l = self.lambda;
        Ok(ln_gamma(k as f64) + ln_rising(1.0 - l, k - 1) + ln_rising(l, n - k)
            - ln_gamma(n as f64)
            - ln_rising(1.0 + l, n - 1))
    }

    /// Log of the new-block weight relative to the existing-block weight
    /// `(n_a + 1)`: `ln[k (k - l) / (n - 1 - k + l)]` for `k = k_{-i}` blocks
    /// among the other `n - 1` nodes.
    pub fn ln_new_block_ratio(&self, n: usize, k_others: usize) -> f64 {
        let l = self.lambda;
        let k = k_others as f64;
        (k * (k - l)).ln() - ((n - 1) as f64 - k + l).ln()
    }

    /// Prior predictive probabilities of joining each existing block of
    /// `z_{-i}` (sizes `sizes`, summing to `n - 1`) or opening a new one.
    pub fn predictive(&self, sizes: &[usize], n: usize) -> Result<(Vec<f64>, f64)> {
        let total: usize = sizes.iter().sum();
        if n < 2 || total != n - 1 || sizes.is_empty() {
            return Err(invalid(format!(
                "block sizes must sum to n - 1 = {} over at least one block",
                n.saturating_sub(1)
            )));
        }
        let l = self.lambda;
        let k = sizes.len() as f64;
        let m = (n - 1) as f64;
        let denom = m * (m + l);
        let existing = sizes
            .iter()
            .map(|&s| (m - k + l) * (s as f64 + 1.0) / denom)
            .collect();
        Ok((existing, k * (k - l) / denom))
    }
}
