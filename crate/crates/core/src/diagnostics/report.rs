//! Multi-chain diagnosis of one network fit.

use serde::{Deserialize, Serialize};

use super::convergence::{ess_per_sample, split_rhat};
use super::partition::{
    adjusted_rand_index, order_blocks_by_size, point_estimate_partition, posterior_similarity, relative_k_error,
    AlignedConnectivity, PointEstimate, PosteriorSimilarity,
};
use crate::error::{invalid, Result};
use crate::samplers::ChainTrace;

/// Default R̂ threshold below which chains are declared converged.
pub const RHAT_THRESHOLD: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticsReport {
    /// Split R̂ of the deviance traces; `None` when it is infinite.
    pub rhat_deviance: Option<f64>,
    pub ess_per_sample: Vec<f64>,
    pub k_hat: usize,
    pub ari: Option<f64>,
    pub relative_k_error: Option<f64>,
    pub converged: bool,
    /// Posterior mean of the number of non-empty blocks.
    pub mean_k: f64,
    pub n_samples: usize,
    pub loss: f64,
}

/// Everything derived from a set of traces.
#[derive(Debug, Clone)]
pub struct Diagnosis {
    pub report: DiagnosticsReport,
    pub psm: PosteriorSimilarity,
    pub point: PointEstimate,
    pub p_hat: Option<AlignedConnectivity>,
}

/// Options for [`diagnose`].
#[derive(Debug, Clone, Copy)]
pub struct DiagnoseOptions {
    pub rhat_threshold: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        DiagnoseOptions {
            rhat_threshold: RHAT_THRESHOLD,
            restarts: 16,
            seed: 0,
        }
    }
}

/// Pools the chains, checks convergence of the deviance and scores the
/// point estimate against `truth` when given.
pub fn diagnose(traces: &[ChainTrace], truth: Option<&[usize]>, opts: DiagnoseOptions) -> Result<Diagnosis> {
    let Some(first) = traces.first() else {
        return Err(invalid("no traces to diagnose"));
    };
    if traces.iter().any(|t| t.n != first.n || t.len() != first.len()) {
        return Err(invalid("traces differ in node count or length"));
    }
    if first.is_empty() {
        return Err(invalid("traces are empty"));
    }
    if let Some(z) = truth {
        if z.len() != first.n {
            return Err(invalid(format!("ground truth has {} labels, traces have {}", z.len(), first.n)));
        }
    }
    let devs: Vec<Vec<f64>> = traces.iter().map(|t| t.deviances()).collect();
    let refs: Vec<&[f64]> = devs.iter().map(|d| d.as_slice()).collect();
    let rhat = split_rhat(&refs)?;
    let ess = devs.iter().map(|d| ess_per_sample(d)).collect::<Result<Vec<_>>>()?;

    let samples: Vec<Vec<usize>> = traces.iter().flat_map(|t| t.labels()).collect();
    let ps: Vec<Vec<Vec<f64>>> = traces.iter().flat_map(|t| t.records.iter().map(|r| r.p.clone())).collect();
    let psm = posterior_similarity(&samples)?;
    let point = point_estimate_partition(&samples, &psm, opts.restarts, opts.seed)?;
    let p_hat = order_blocks_by_size(&samples, &ps)?;
    let ks: Vec<usize> = traces.iter().flat_map(|t| t.ks()).collect();
    let mean_k = ks.iter().sum::<usize>() as f64 / ks.len() as f64;

    let (ari, k_err) = match truth {
        Some(z) => {
            let k_true = crate::netcore::BlockState::canonical_labels(z).iter().max().map_or(0, |m| m + 1);
            (
                Some(adjusted_rand_index(&point.partition, z)?),
                Some(relative_k_error(point.k_hat, k_true)?),
            )
        }
        None => (None, None),
    };
    let report = DiagnosticsReport {
        rhat_deviance: rhat.is_finite().then_some(rhat),
        ess_per_sample: ess,
        k_hat: point.k_hat,
        ari,
        relative_k_error: k_err,
        converged: rhat < opts.rhat_threshold,
        mean_k,
        n_samples: samples.len(),
        loss: point.loss,
    };
    Ok(Diagnosis {
        report,
        psm,
        point,
        p_hat,
    })
}
