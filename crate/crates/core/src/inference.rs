//! Standard errors and confidence intervals.
//!
//! The bootstrap is deterministic: replicate `r` draws from a ChaCha8 stream
//! selected by `(seed, r)` alone, so the result does not depend on how many
//! threads run the replicates or in which order they finish.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{GdidError, Result};
use crate::estimators::{Estimator, Interval};
use crate::panel::{degenerate, PanelDataset};
use crate::scalar::{mean, sample_variance, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    pub level: f64,
    /// Resample within group (and `A1`) cells, preserving their sizes.
    pub stratified: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 1999,
            seed: 0,
            level: 0.95,
            stratified: true,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(GdidError::InvalidArgument(
                "bootstrap needs at least one replicate".into(),
            ));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(GdidError::InvalidArgument(format!(
                "confidence level {} must lie in (0, 1)",
                self.level
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceResult<T> {
    pub point: T,
    /// Standard deviation of the successful replicate estimates.
    pub se: T,
    pub ci_percentile: Interval<T>,
    pub ci_normal: Interval<T>,
    pub level: f64,
    pub replicates: usize,
    pub n_failed_replicates: usize,
    /// Whether resampling was stratified.
    pub stratified: bool,
}

/// `sqrt(s1^2 / n1 + s0^2 / n0)` for the difference of group means of
/// `Y1 - Y0`.
pub fn analytic_se_simple<T: Scalar>(d: &PanelDataset<T>) -> Result<T> {
    let (g1, g0) = d.deltas_by_group()?;
    if g1.len() < 2 || g0.len() < 2 {
        return Err(GdidError::DegenerateGroup(format!(
            "analytic standard error needs two units per group (n1={}, n0={})",
            g1.len(),
            g0.len()
        )));
    }
    let v1 = sample_variance(&g1).expect("n >= 2");
    let v0 = sample_variance(&g0).expect("n >= 2");
    Ok((v1 / T::from_count(g1.len()) + v0 / T::from_count(g0.len())).sqrt())
}

/// RNG for bootstrap replicate `replicate` under `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// SplitMix64 finalizer applied to `seed ^ golden * (index + 1)`; used to
/// give each simulation replicate its own seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ 0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(index.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Empirical quantile by linear interpolation between order statistics:
/// with `h = (n - 1) p`, returns `x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h])`.
/// `sorted` must be ascending and non-empty.
pub fn quantile<T: Scalar>(sorted: &[T], p: f64) -> T {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = T::lit(h - lo as f64);
    let q = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    // guard against rounding past the bracketing order statistics
    q.max(sorted[lo]).min(sorted[hi])
}

fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(p)
}

/// Index lists of the resampling strata.
fn strata<T: Scalar>(d: &PanelDataset<T>, stratified: bool) -> (Vec<Vec<usize>>, bool) {
    let discrete = d.has_binary_group() || d.group_levels().is_some();
    if !stratified || !discrete {
        return (vec![(0..d.len()).collect()], false);
    }
    let mut cells: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (i, u) in d.units().iter().enumerate() {
        let key = (u.group.to_f64_lossy().to_bits(), u.a1.to_f64_lossy().to_bits());
        cells.entry(key).or_default().push(i);
    }
    (cells.into_values().collect(), true)
}

fn draw<T: Scalar>(d: &PanelDataset<T>, strata: &[Vec<usize>], rng: &mut ChaCha8Rng) -> PanelDataset<T> {
    let mut idx = Vec::with_capacity(d.len());
    for s in strata {
        for _ in 0..s.len() {
            idx.push(s[rng.gen_range(0..s.len())]);
        }
    }
    d.resampled(&idx)
}

/// Bootstraps an arbitrary scalar statistic of a dataset.
pub fn bootstrap_statistic<T, F>(
    d: &PanelDataset<T>,
    statistic: F,
    cfg: &BootstrapConfig,
) -> Result<InferenceResult<T>>
where
    T: Scalar,
    F: Fn(&PanelDataset<T>) -> Result<T> + Sync,
{
    cfg.validate()?;
    let point = statistic(d)?;
    let (strata, stratified) = strata(d, cfg.stratified);
    let draws: Vec<Option<T>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(cfg.seed, r as u64);
            let sample = draw(d, &strata, &mut rng);
            statistic(&sample).ok().filter(|v| v.is_finite())
        })
        .collect();
    summarize(point, draws, cfg, stratified)
}

/// Nonparametric bootstrap of an estimator; the point estimate comes from
/// the full dataset and its errors propagate.
pub fn bootstrap<T, E>(d: &PanelDataset<T>, estimator: &E, cfg: &BootstrapConfig) -> Result<InferenceResult<T>>
where
    T: Scalar,
    E: Estimator<T> + ?Sized,
{
    bootstrap_statistic(d, |s| estimator.estimate(s).map(|e| e.value), cfg)
}

fn summarize<T: Scalar>(
    point: T,
    draws: Vec<Option<T>>,
    cfg: &BootstrapConfig,
    stratified: bool,
) -> Result<InferenceResult<T>> {
    let total = draws.len();
    let mut values: Vec<T> = draws.into_iter().flatten().collect();
    let failed = total - values.len();
    if failed * 20 > total || values.is_empty() {
        return Err(GdidError::TooManyFailedReplicates { failed, total });
    }
    let se = sample_variance(&values).map_or(T::zero(), |v| v.sqrt());
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite replicates"));
    let alpha = 1.0 - cfg.level;
    let ci_percentile = Interval::new(
        quantile(&values, alpha / 2.0),
        quantile(&values, 1.0 - alpha / 2.0),
    )?;
    let z = T::lit(normal_quantile(1.0 - alpha / 2.0));
    let ci_normal = Interval::new(point - z * se, point + z * se)?;
    Ok(InferenceResult {
        point,
        se,
        ci_percentile,
        ci_normal,
        level: cfg.level,
        replicates: total,
        n_failed_replicates: failed,
        stratified,
    })
}

/// Mean and `n - 1` standard deviation of a sample, used by summaries.
pub(crate) fn mean_sd<T: Scalar>(xs: &[T]) -> Option<(T, T)> {
    Some((mean(xs)?, sample_variance(xs).map_or(T::zero(), |v| v.sqrt())))
}

pub(crate) fn require_two_groups<T: Scalar>(d: &PanelDataset<T>) -> Result<()> {
    let (n1, n0) = d.group_sizes()?;
    if n1 == 0 || n0 == 0 {
        return Err(degenerate(n1, n0));
    }
    Ok(())
}
