use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Which of the four samplers to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Standard prior, fixed number of blocks.
    #[serde(rename = "sbm-k")]
    SbmFixed,
    /// Assortative prior, fixed number of blocks.
    #[serde(rename = "asbm-k")]
    AsbmFixed,
    /// Standard prior, unknown number of blocks.
    Sbm,
    /// Assortative prior, unknown number of blocks.
    Asbm,
}

impl Variant {
    pub fn is_assortative(self) -> bool {
        matches!(self, Variant::AsbmFixed | Variant::Asbm)
    }

    pub fn is_fixed_k(self) -> bool {
        matches!(self, Variant::SbmFixed | Variant::AsbmFixed)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::SbmFixed => "sbm-k",
            Variant::AsbmFixed => "asbm-k",
            Variant::Sbm => "sbm",
            Variant::Asbm => "asbm",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sbm-k" => Ok(Variant::SbmFixed),
            "asbm-k" => Ok(Variant::AsbmFixed),
            "sbm" => Ok(Variant::Sbm),
            "asbm" => Ok(Variant::Asbm),
            other => Err(invalid(format!("unknown variant {other:?}; expected sbm-k, asbm-k, sbm or asbm"))),
        }
    }
}

/// Starting labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitLabels {
    /// Uniform random labels over this many blocks; `None` means `k` for
    /// fixed-k variants and `ceil(sqrt(n))` otherwise.
    Random(Option<usize>),
    Singletons,
    Given(Vec<usize>),
}

/// How P entries for a freshly opened block are drawn in the standard
/// unknown-k sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewBlockDraw {
    /// Conditional on the moved node's edges (beta-binomial update); keeps
    /// the Gibbs step exact.
    Conditional,
    /// From the beta prior.
    Prior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub variant: Variant,
    /// Number of blocks for the fixed-k variants.
    pub k: Option<usize>,
    /// Symmetric Dirichlet concentration (fixed-k variants).
    pub gamma: f64,
    /// Beta prior shapes (standard variants).
    pub alpha: f64,
    pub beta: f64,
    /// Gnedin prior parameter (unknown-k variants).
    pub lambda: f64,
    /// Number of auxiliary blocks (assortative unknown-k).
    pub m: usize,
    /// Total sweeps, including burn-in.
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    pub init: InitLabels,
    pub epsilon_init: f64,
    pub new_block_draw: NewBlockDraw,
    /// Visit nodes in reverse order within each sweep.
    pub reverse_sweep: bool,
    /// Testing hook: treat the likelihood as constant so the chain samples
    /// the prior.
    pub ignore_likelihood: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            variant: Variant::Asbm,
            k: None,
            gamma: 1.0,
            alpha: 1.0,
            beta: 1.0,
            lambda: 0.45,
            m: 3,
            iterations: 4000,
            burn_in: 1000,
            thinning: 5,
            seed: 0,
            init: InitLabels::Random(None),
            epsilon_init: 0.5,
            new_block_draw: NewBlockDraw::Conditional,
            reverse_sweep: false,
            ignore_likelihood: false,
        }
    }
}

impl SamplerConfig {
    pub fn new(variant: Variant) -> Self {
        SamplerConfig {
            variant,
            ..Default::default()
        }
    }

    /// Number of kept iterations: `floor((iterations - burn_in) / thinning)`.
    pub fn n_kept(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thinning.max(1)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(invalid("graph needs at least two nodes"));
        }
        if self.thinning == 0 {
            return Err(invalid("thinning must be at least 1"));
        }
        if self.burn_in > self.iterations {
            return Err(invalid(format!(
                "burn-in {} exceeds iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.variant.is_fixed_k() {
            match self.k {
                None => return Err(invalid(format!("variant {} needs k", self.variant))),
                Some(k) if k == 0 || k > n => {
                    return Err(invalid(format!("k = {k} must lie in 1..={n}")))
                }
                _ => {}
            }
            if !(self.gamma > 0.0 && self.gamma.is_finite()) {
                return Err(invalid(format!("gamma must be positive, got {}", self.gamma)));
            }
        } else if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(invalid(format!("lambda must lie in (0,1), got {}", self.lambda)));
        }
        if !self.variant.is_assortative() {
            for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(format!("{name} must be positive, got {v}")));
                }
            }
        } else if !(self.epsilon_init > 0.0 && self.epsilon_init < 1.0) {
            return Err(invalid(format!("epsilon_init must lie in (0,1), got {}", self.epsilon_init)));
        }
        if self.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        match &self.init {
            InitLabels::Given(z) if z.len() != n => {
                return Err(invalid(format!("initial labels have length {}, expected {n}", z.len())))
            }
            InitLabels::Given(z) if self.variant.is_fixed_k() => {
                let k = self.k.unwrap_or(0);
                if let Some(&bad) = z.iter().find(|&&a| a >= k) {
                    return Err(invalid(format!("initial label {bad} out of range for k = {k}")));
                }
            }
            InitLabels::Random(Some(0)) => return Err(invalid("random initialization needs at least one block")),
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_round_trip() {
        for v in [Variant::SbmFixed, Variant::AsbmFixed, Variant::Sbm, Variant::Asbm] {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            let json = serde_json::to_string(&v).unwrap();
            assert_eq!(json, format!("\"{}\"", v.name()));
        }
        assert!("mmsb".parse::<Variant>().is_err());
    }

    #[test]
    fn kept_count() {
        let cfg = SamplerConfig {
            iterations: 4000,
            burn_in: 1000,
            thinning: 5,
            ..Default::default()
        };
        assert_eq!(cfg.n_kept(), 600);
        let cfg = SamplerConfig {
            iterations: 10,
            burn_in: 10,
            ..Default::default()
        };
        assert_eq!(cfg.n_kept(), 0);
    }

    #[test]
    fn validation_errors() {
        let mut cfg = SamplerConfig::new(Variant::SbmFixed);
        assert!(cfg.validate(10).is_err());
        cfg.k = Some(3);
        assert!(cfg.validate(10).is_ok());
        cfg.k = Some(11);
        assert!(cfg.validate(10).is_err());
        let mut cfg = SamplerConfig::new(Variant::Asbm);
        cfg.m = 0;
        assert!(cfg.validate(10).is_err());
        cfg.m = 1;
        cfg.thinning = 0;
        assert!(cfg.validate(10).is_err());
        cfg.thinning = 1;
        cfg.burn_in = cfg.iterations + 1;
        assert!(cfg.validate(10).is_err());
    }
}
