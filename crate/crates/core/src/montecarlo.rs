//! Monte Carlo estimation of `E_pr[D]` and relative-error statistics.

use std::collections::BTreeMap;

use rand::Rng;

use crate::arrangement::{seeded_rng, ProjectiveSampler};
use crate::numeric::ExactRational;
use crate::tree::RootedTree;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonteCarloError {
    #[error("the number of samples must be at least 1")]
    ZeroSamples,
    #[error("relative error is undefined when the exact value is zero")]
    ZeroExact,
    #[error("no error records to aggregate")]
    NoRecords,
    #[error("confidence level must lie in (0, 1), got {0}")]
    BadConfidence(String),
}

impl MonteCarloError {
    pub fn name(&self) -> &'static str {
        match self {
            MonteCarloError::ZeroSamples => "ZeroSamples",
            MonteCarloError::ZeroExact => "ZeroExact",
            MonteCarloError::NoRecords => "NoRecords",
            MonteCarloError::BadConfidence(_) => "BadConfidence",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub z: u64,
    pub mean_d: f64,
    pub seed: u64,
}

/// Mean of `D` over `z` independent uniformly random projective arrangements.
pub fn estimate_expected_d(tree: &RootedTree, z: u64, seed: u64) -> Result<McEstimate, MonteCarloError> {
    if z == 0 {
        return Err(MonteCarloError::ZeroSamples);
    }
    let mut rng = seeded_rng(seed);
    let mut sampler = ProjectiveSampler::new(tree);
    let total: u128 = (0..z).map(|_| sampler.sample_sum_edge_lengths(&mut rng) as u128).sum();
    Ok(McEstimate {
        z,
        mean_d: total as f64 / z as f64,
        seed,
    })
}

/// `(estimate - exact) / exact`; positive when the estimate is too large.
pub fn relative_error(estimate: f64, exact: &ExactRational) -> Result<f64, MonteCarloError> {
    if exact.is_zero() {
        return Err(MonteCarloError::ZeroExact);
    }
    let exact = exact.to_f64();
    Ok((estimate - exact) / exact)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: 1000,
            confidence: 0.99,
            seed: 0,
        }
    }
}

/// Relative-error summary for all trees of one size.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    pub n: usize,
    pub count: usize,
    pub mean_err: f64,
    pub min_err: f64,
    pub max_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Percentile bootstrap confidence interval for the mean of `values`.
pub fn bootstrap_mean_ci<R: Rng + ?Sized>(values: &[f64], resamples: usize, confidence: f64, rng: &mut R) -> (f64, f64) {
    let k = values.len();
    let mut means: Vec<f64> = (0..resamples.max(1))
        .map(|_| (0..k).map(|_| values[rng.random_range(0..k)]).sum::<f64>() / k as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = 1.0 - confidence;
    (quantile(&means, alpha / 2.0), quantile(&means, 1.0 - alpha / 2.0))
}

/// Groups `(n, relative error)` records by `n` and summarizes each group.
///
/// Each group is resampled with its own generator seeded from
/// `config.seed` and `n`, so results do not depend on record order.
pub fn aggregate_errors(records: &[(usize, f64)], config: &BootstrapConfig) -> Result<Vec<ErrorStats>, MonteCarloError> {
    if records.is_empty() {
        return Err(MonteCarloError::NoRecords);
    }
    if !(config.confidence > 0.0 && config.confidence < 1.0) {
        return Err(MonteCarloError::BadConfidence(config.confidence.to_string()));
    }
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &(n, e) in records {
        groups.entry(n).or_default().push(e);
    }
    Ok(groups
        .into_iter()
        .map(|(n, values)| {
            let min_err = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max_err = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // summation rounding can push a mean of equal values past them
            let mean_err = mean(&values).clamp(min_err, max_err);
            let mut rng = seeded_rng(config.seed ^ (n as u64).rotate_left(32));
            let (lo, hi) = bootstrap_mean_ci(&values, config.resamples, config.confidence, &mut rng);
            ErrorStats {
                n,
                count: values.len(),
                mean_err,
                min_err,
                max_err,
                ci_low: lo.clamp(min_err, max_err),
                ci_high: hi.clamp(min_err, max_err),
            }
        })
        .collect())
}
