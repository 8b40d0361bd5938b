//! Synthetic potential-outcome worlds with known estimands.
//!
//! Untreated outcomes follow
//!
//! ```text
//! Y_t(0) = alpha_g + t * (delta + gamma * 1[g = 1] + lambda * Z) + noise_t,   t in {0, 1}
//! Y_t(1) = Y_t(0) + tau[g][t]
//! ```
//!
//! and the observed outcome is the potential outcome under the treatment the
//! design assigns. With `gamma = 0` and no covariate loading both groups
//! share the untreated trend `delta`, so group parallel trends hold exactly.
//! Pre-baseline periods `t = -k, ..., -1` extend the untreated process
//! backwards with slope `delta + gamma_pre * 1[g = 1] + lambda * Z`.

mod config;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GdidError, Result};
use crate::estimators::{EstimandKind, Estimator};
use crate::inference::{bootstrap, derive_seed, mean_sd, BootstrapConfig};
use crate::panel::{DesignKind, PanelDataset, PanelUnit};
use crate::scalar::Scalar;

pub use config::{parse_config, to_config};

/// Treatment assignment of a simulated world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DgpDesign<T> {
    Canonical,
    PrePost,
    NoPrePeriod,
    /// Everyone untreated at `t = 0`; within each group the first
    /// `treated_share` of units are treated at `t = 1`. Treated units get
    /// an extra untreated trend `arm_trend` shared by both groups, which
    /// keeps the triple-differences trend assumption intact.
    Triple { treated_share: T, arm_trend: T },
}

impl<T> DgpDesign<T> {
    /// The panel design generated data are classified as.
    pub fn design_kind(&self) -> DesignKind {
        match self {
            DgpDesign::Canonical => DesignKind::Canonical,
            DgpDesign::PrePost => DesignKind::PrePost,
            DgpDesign::NoPrePeriod => DesignKind::NoPrePeriod,
            DgpDesign::Triple { .. } => DesignKind::Unclassified,
        }
    }
}

/// Baseline covariate `Z ~ N(shift * G, 1)` loading on the untreated trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovariateSpec<T> {
    pub shift: T,
    pub lambda: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgpSpec<T> {
    pub n1: usize,
    pub n0: usize,
    /// `E[Y0(0) | G = g]`, indexed by `g`.
    pub alpha: [T; 2],
    pub delta: T,
    /// Added to the `G = 1` untreated trend.
    pub gamma: T,
    /// `tau[g][t] = E[Y_t(1) - Y_t(0) | G = g]`.
    pub tau: [[T; 2]; 2],
    pub sigma: T,
    pub n_pre_periods: usize,
    /// Extra pre-baseline slope of the `G = 1` group.
    pub gamma_pre: T,
    pub design: DgpDesign<T>,
    pub covariate: Option<CovariateSpec<T>>,
    /// Equicorrelation of a unit's noise across periods.
    pub noise_correlation: T,
    /// Standard deviation of mean-zero unit-level effect heterogeneity.
    pub effect_sd: T,
}

impl<T: Scalar> DgpSpec<T> {
    pub fn new(design: DgpDesign<T>) -> Self {
        DgpSpec {
            n1: 500,
            n0: 500,
            alpha: [T::zero(), T::one()],
            delta: T::lit(0.5),
            gamma: T::zero(),
            tau: [[T::zero(); 2]; 2],
            sigma: T::one(),
            n_pre_periods: 0,
            gamma_pre: T::zero(),
            design,
            covariate: None,
            noise_correlation: T::zero(),
            effect_sd: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GdidError::InvalidSpec(m));
        if self.n1 == 0 || self.n0 == 0 {
            return bad(format!("group sizes must be positive (n1={}, n0={})", self.n1, self.n0));
        }
        let mut values = vec![self.alpha[0], self.alpha[1], self.delta, self.gamma, self.sigma];
        values.extend(self.tau.iter().flatten());
        values.extend([self.gamma_pre, self.noise_correlation, self.effect_sd]);
        if let Some(c) = self.covariate {
            values.extend([c.shift, c.lambda]);
        }
        if let DgpDesign::Triple {
            treated_share,
            arm_trend,
        } = self.design
        {
            values.extend([treated_share, arm_trend]);
            let (t1, u1) = triple_split(self.n1, treated_share);
            let (t0, u0) = triple_split(self.n0, treated_share);
            if t1 == 0 || u1 == 0 || t0 == 0 || u0 == 0 {
                return bad(format!(
                    "treated_share {treated_share} leaves an empty (group, treatment) cell"
                ));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.sigma < T::zero() {
            return bad("sigma must be non-negative".into());
        }
        if self.effect_sd < T::zero() {
            return bad("effect_sd must be non-negative".into());
        }
        if self.noise_correlation < T::zero() || self.noise_correlation > T::one() {
            return bad("noise_correlation must lie in [0, 1]".into());
        }
        Ok(())
    }
}

fn triple_split<T: Scalar>(n: usize, share: T) -> (usize, usize) {
    let treated = (share * T::from_count(n)).round().to_usize().unwrap_or(0).min(n);
    (treated, n - treated)
}

/// Draws one dataset. Units of group 1 come first; ids are `u0, u1, ...`.
pub fn generate<T: Scalar>(spec: &DgpSpec<T>, seed: u64) -> Result<PanelDataset<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || -> T { T::lit(StandardNormal.sample(&mut rng)) };
    let rho = spec.noise_correlation;
    let (shared_w, own_w) = (rho.sqrt(), (T::one() - rho).sqrt());
    let k = spec.n_pre_periods;

    let mut units = Vec::with_capacity(spec.n1 + spec.n0);
    for (g, n) in [(1usize, spec.n1), (0usize, spec.n0)] {
        let gv = T::from_count(g);
        let is_g1 = if g == 1 { T::one() } else { T::zero() };
        let n_treated_arm = match spec.design {
            DgpDesign::Triple { treated_share, .. } => triple_split(n, treated_share).0,
            _ => 0,
        };
        for i in 0..n {
            let (a0, a1) = match spec.design {
                DgpDesign::Canonical => (T::zero(), gv),
                DgpDesign::PrePost => (T::zero(), T::one()),
                DgpDesign::NoPrePeriod => (gv, gv),
                DgpDesign::Triple { .. } => {
                    (T::zero(), if i < n_treated_arm { T::one() } else { T::zero() })
                }
            };
            let arm_trend = match spec.design {
                DgpDesign::Triple { arm_trend, .. } => arm_trend * a1,
                _ => T::zero(),
            };
            let z = spec.covariate.map(|c| c.shift * gv + normal());
            let z_trend = match (spec.covariate, z) {
                (Some(c), Some(z)) => c.lambda * z,
                _ => T::zero(),
            };
            let shared = if rho > T::zero() { normal() } else { T::zero() };
            let mut noise = || spec.sigma * (shared_w * shared + own_w * normal());

            let slope_post = spec.delta + spec.gamma * is_g1 + z_trend + arm_trend;
            let slope_pre = spec.delta + spec.gamma_pre * is_g1 + z_trend + arm_trend;
            let alpha = spec.alpha[g];
            let effect = |t: usize| {
                let het = if spec.effect_sd > T::zero() {
                    spec.effect_sd * normal_unbound(seed, g, i, t)
                } else {
                    T::zero()
                };
                spec.tau[g][t] + het
            };

            let mut pre = Vec::with_capacity(k);
            for s in (1..=k).rev() {
                let t = -T::from_count(s);
                let mut y = alpha + t * slope_pre + noise();
                // treated before baseline in the no-pre-period world
                if spec.design == DgpDesign::NoPrePeriod && g == 1 {
                    y += spec.tau[1][0];
                }
                pre.push(y);
            }
            let y0_untreated = alpha + noise();
            let y1_untreated = alpha + slope_post + noise();
            let y0 = if a0 == T::one() { y0_untreated + effect(0) } else { y0_untreated };
            let y1 = if a1 == T::one() { y1_untreated + effect(1) } else { y1_untreated };
            let id = units.len();
            units.push(PanelUnit {
                unit_id: format!("u{id}"),
                group: gv,
                a0,
                a1,
                y0,
                y1,
                covariates: z.into_iter().collect(),
                pre_outcomes: pre,
            });
        }
    }
    let cov_names = if spec.covariate.is_some() { vec!["z".to_string()] } else { vec![] };
    let pre_names = (1..=k).rev().map(|s| format!("y_m{s}")).collect();
    PanelDataset::new(units, cov_names, pre_names)
}

// Effect heterogeneity is drawn from its own stream so that switching it on
// leaves every other draw of the world unchanged.
fn normal_unbound<T: Scalar>(seed: u64, g: usize, i: usize, t: usize) -> T {
    let key = ((g as u64) << 62) ^ ((t as u64) << 61) ^ i as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ 0x00EF_FEC7, key));
    T::lit(StandardNormal.sample(&mut rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthReport<T> {
    pub true_estimand: T,
    /// Expected bias of the design's default estimator: the simple GDiD
    /// contrast, or the triple difference in triple worlds.
    pub expected_gdid_bias: T,
    pub estimand_kind: EstimandKind,
}

/// Closed-form estimand and GDiD bias of a world.
///
/// The bias of the simple contrast is `gamma + lambda * shift`: the trend
/// violation plus the trend gap induced by a covariate whose distribution
/// differs by group. Triple worlds have additive trends, so the triple
/// difference is unbiased for `tau[1][1] - tau[0][1]`.
pub fn true_estimand<T: Scalar>(spec: &DgpSpec<T>) -> Result<TruthReport<T>> {
    spec.validate()?;
    let tau = spec.tau;
    let covariate_gap = spec.covariate.map_or(T::zero(), |c| c.lambda * c.shift);
    let (value, kind, bias) = match spec.design {
        DgpDesign::Canonical => (tau[1][1], EstimandKind::AttPeriod1, spec.gamma + covariate_gap),
        DgpDesign::PrePost => (
            tau[1][1] - tau[0][1],
            EstimandKind::EffectModification,
            spec.gamma + covariate_gap,
        ),
        DgpDesign::NoPrePeriod => (
            tau[1][1] - tau[1][0],
            EstimandKind::AttChangeOverTime,
            spec.gamma + covariate_gap,
        ),
        DgpDesign::Triple { .. } => (tau[1][1] - tau[0][1], EstimandKind::TripleDiffAtt, T::zero()),
    };
    Ok(TruthReport {
        true_estimand: value,
        expected_gdid_bias: bias,
        estimand_kind: kind,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary<T> {
    pub reps: usize,
    pub n_failed: usize,
    pub truth: TruthReport<T>,
    pub mean_estimate: T,
    pub mean_bias: T,
    /// Standard deviation of the estimates across replicates.
    pub sd: T,
    /// `sd / sqrt(successful reps)`.
    pub mc_se: T,
    /// Share of percentile bootstrap intervals containing the truth.
    pub coverage: Option<f64>,
    pub coverage_normal: Option<f64>,
}

/// Repeats generate-then-estimate `reps` times.
///
/// Replicate `r` uses the world drawn with seed `derive_seed(seed, r)` and,
/// when `boot` is given, a bootstrap seeded from that world seed. Results do
/// not depend on the thread count.
pub fn monte_carlo<T, E>(
    spec: &DgpSpec<T>,
    estimator: &E,
    reps: usize,
    boot: Option<&BootstrapConfig>,
    seed: u64,
) -> Result<MonteCarloSummary<T>>
where
    T: Scalar,
    E: Estimator<T> + ?Sized,
{
    if reps < 2 {
        return Err(GdidError::InvalidArgument(format!(
            "Monte Carlo needs at least 2 replicates, got {reps}"
        )));
    }
    let truth = true_estimand(spec)?;
    if let Some(cfg) = boot {
        cfg.validate()?;
    }
    type Rep<T> = Option<(T, Option<(bool, bool)>)>;
    let runs: Vec<Rep<T>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let world_seed = derive_seed(seed, r as u64);
            let d = generate(spec, world_seed).ok()?;
            let est = estimator.estimate(&d).ok()?;
            let covered = match boot {
                Some(cfg) => {
                    let cfg = BootstrapConfig {
                        seed: derive_seed(world_seed, u64::MAX),
                        ..*cfg
                    };
                    let inf = bootstrap(&d, estimator, &cfg).ok()?;
                    Some((
                        inf.ci_percentile.contains(truth.true_estimand),
                        inf.ci_normal.contains(truth.true_estimand),
                    ))
                }
                None => None,
            };
            Some((est.value, covered))
        })
        .collect();
    let ok: Vec<(T, Option<(bool, bool)>)> = runs.into_iter().flatten().collect();
    let failed = reps - ok.len();
    if failed * 20 > reps || ok.len() < 2 {
        return Err(GdidError::TooManyFailedSimulations {
            failed,
            total: reps,
        });
    }
    let values: Vec<T> = ok.iter().map(|(v, _)| *v).collect();
    let (mean_estimate, sd) = mean_sd(&values).expect("at least two values");
    let share = |pick: fn(&(bool, bool)) -> bool| -> Option<f64> {
        boot.map(|_| {
            let hits = ok.iter().filter(|(_, c)| c.as_ref().is_some_and(pick)).count();
            hits as f64 / ok.len() as f64
        })
    };
    Ok(MonteCarloSummary {
        reps,
        n_failed: failed,
        truth,
        mean_estimate,
        mean_bias: mean_estimate - truth.true_estimand,
        sd,
        mc_se: sd / T::from_count(ok.len()).sqrt(),
        coverage: share(|c| c.0),
        coverage_normal: share(|c| c.1),
    })
}
