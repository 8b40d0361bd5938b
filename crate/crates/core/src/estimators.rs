//! Sample-analog estimators of the group difference-in-differences contrast
//! `E[Y1 - Y0 | G = 1] - E[Y1 - Y0 | G = 0]` and its relatives.
//!
//! The same number means different things depending on the design, so every
//! [`Estimate`] carries its [`EstimandKind`]:
//!
//! | design      | estimand                                               |
//! |-------------|--------------------------------------------------------|
//! | Canonical   | `E[Y1(1) - Y1(0) | G=1]`                               |
//! | PrePost     | `E[Y1(1) - Y1(0) | G=1] - E[Y1(1) - Y1(0) | G=0]`      |
//! | NoPrePeriod | `E[Y1(1) - Y1(0) | G=1] - E[Y0(1) - Y0(0) | G=1]`      |
//!
//! Each row holds under consistency and equal expected untreated trends
//! across the two groups.

use serde::Serialize;

use crate::error::{GdidError, Result};
use crate::numerics::{fit_logistic, fit_ols, predict_prob, Matrix};
use crate::panel::{degenerate, DesignKind, PanelDataset};
use crate::scalar::{mean, Scalar};

/// The causal quantity a GDiD-type contrast identifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EstimandKind {
    /// ATT in the second period (canonical design).
    #[serde(rename = "ATT_Period1")]
    AttPeriod1,
    /// Difference in second-period ATTs between the groups (pre-post).
    #[serde(rename = "EffectModification")]
    EffectModification,
    /// Second-period minus first-period ATT in the treated group
    /// (no pre-period).
    #[serde(rename = "ATTChangeOverTime")]
    AttChangeOverTime,
    /// ATT in `G = 1` under the triple-differences trend assumption.
    #[serde(rename = "TripleDiffATT")]
    TripleDiffAtt,
    /// Partially identified ATT in `G = 1` from effect-modification bounds.
    #[serde(rename = "BoundedATT")]
    BoundedAtt,
}

impl EstimandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimandKind::AttPeriod1 => "ATT_Period1",
            EstimandKind::EffectModification => "EffectModification",
            EstimandKind::AttChangeOverTime => "ATTChangeOverTime",
            EstimandKind::TripleDiffAtt => "TripleDiffATT",
            EstimandKind::BoundedAtt => "BoundedATT",
        }
    }

    /// Formula of the estimand in potential-outcome notation.
    pub fn formula(self) -> &'static str {
        match self {
            EstimandKind::AttPeriod1 => "E[Y1(1)-Y1(0)|G=1]",
            EstimandKind::EffectModification => "E[Y1(1)-Y1(0)|G=1] - E[Y1(1)-Y1(0)|G=0]",
            EstimandKind::AttChangeOverTime => "E[Y1(1)-Y1(0)|G=1] - E[Y0(1)-Y0(0)|G=1]",
            EstimandKind::TripleDiffAtt => "E[Y1(1)-Y1(0)|G=1,A1=1]",
            EstimandKind::BoundedAtt => "E[Y1(1)-Y1(0)|G=1] (interval)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Simple,
    Ipw,
    Continuous,
    Triple,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Simple => "simple",
            Method::Ipw => "ipw",
            Method::Continuous => "continuous",
            Method::Triple => "triple",
        }
    }
}

/// Maps a design and method onto the estimand the contrast identifies.
pub fn label_estimand(design: DesignKind, method: Method) -> Result<EstimandKind> {
    if method == Method::Triple {
        return Ok(EstimandKind::TripleDiffAtt);
    }
    match (design, method) {
        (DesignKind::Unclassified, _) => Err(GdidError::UnclassifiedDesign),
        (DesignKind::NoPrePeriod, Method::Ipw) => Err(GdidError::UnsupportedDesign {
            method: method.as_str().into(),
            design,
        }),
        (DesignKind::Canonical, _) => Ok(EstimandKind::AttPeriod1),
        (DesignKind::PrePost, _) => Ok(EstimandKind::EffectModification),
        (DesignKind::NoPrePeriod, _) => Ok(EstimandKind::AttChangeOverTime),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCount {
    pub group: String,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub estimand: EstimandKind,
    pub method: Method,
    pub n_by_group: Vec<GroupCount>,
    /// Contrast points `(g, g')` for continuous groups.
    pub contrast: Option<(T, T)>,
    /// Units discarded by propensity trimming.
    pub trimmed: usize,
}

impl<T: Scalar> Estimate<T> {
    fn new(value: T, estimand: EstimandKind, method: Method, n_by_group: Vec<GroupCount>) -> Result<Self> {
        if !value.is_finite() {
            return Err(GdidError::NonFinite(format!("{} estimate", method.as_str())));
        }
        Ok(Estimate {
            value,
            estimand,
            method,
            n_by_group,
            contrast: None,
            trimmed: 0,
        })
    }
}

fn binary_counts<T: Scalar>(d: &PanelDataset<T>, n1: usize, n0: usize) -> Vec<GroupCount> {
    vec![
        GroupCount {
            group: d.group_label(T::one()),
            n: n1,
        },
        GroupCount {
            group: d.group_label(T::zero()),
            n: n0,
        },
    ]
}

/// Closed interval with ordered endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lower: T, upper: T) -> Result<Self> {
        if !(lower <= upper) {
            return Err(GdidError::InvalidArgument(format!(
                "interval endpoints out of order: [{lower}, {upper}]"
            )));
        }
        Ok(Interval { lower, upper })
    }

    pub fn contains(&self, x: T) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }
}

/// Analyst-asserted range for the effect in the `G = 0` group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsSpec<T> {
    pub tau_l: T,
    pub tau_u: T,
}

impl<T: Scalar> BoundsSpec<T> {
    pub fn new(tau_l: T, tau_u: T) -> Result<Self> {
        if !(tau_l <= tau_u) {
            return Err(GdidError::InvalidBounds {
                lower: tau_l.to_f64_lossy(),
                upper: tau_u.to_f64_lossy(),
            });
        }
        Ok(BoundsSpec { tau_l, tau_u })
    }
}

/// Difference of group means of `Y1 - Y0`, labelled by design.
pub fn gdid_simple<T: Scalar>(d: &PanelDataset<T>, design: DesignKind) -> Result<Estimate<T>> {
    let estimand = label_estimand(design, Method::Simple)?;
    let (g1, g0) = d.deltas_by_group()?;
    let value = mean(&g1).expect("non-empty") - mean(&g0).expect("non-empty");
    Estimate::new(value, estimand, Method::Simple, binary_counts(d, g1.len(), g0.len()))
}

/// What to do with units whose fitted propensity leaves `[eps, 1 - eps]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrimPolicy {
    /// Discard them and report how many were discarded.
    #[default]
    Drop,
    /// Fail with [`GdidError::OverlapViolation`].
    Reject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpwOptions {
    /// Covariates entering the propensity model; empty means intercept only.
    pub covariates: Vec<String>,
    pub trim_epsilon: f64,
    pub trim_policy: TrimPolicy,
}

impl Default for IpwOptions {
    fn default() -> Self {
        IpwOptions {
            covariates: Vec::new(),
            trim_epsilon: 0.01,
            trim_policy: TrimPolicy::Drop,
        }
    }
}

/// Inverse probability weighted GDiD under group parallel trends
/// conditional on covariates `Z`.
///
/// Computes the sample mean of
/// `(dY / p) * (G - e(Z)) / (1 - e(Z))`
/// with `p` the share of `G = 1` and `e(Z)` a logistic propensity score.
/// Only the canonical and pre-post designs are supported; in the pre-post
/// design `Y0 = Y0(0)` for everyone, so the conditional trend assumption can
/// be stated with the observed `Y0`.
pub fn gdid_ipw<T: Scalar>(
    d: &PanelDataset<T>,
    design: DesignKind,
    opts: &IpwOptions,
) -> Result<Estimate<T>> {
    let estimand = label_estimand(design, Method::Ipw)?;
    let eps = opts.trim_epsilon;
    if !(0.0..0.5).contains(&eps) {
        return Err(GdidError::InvalidArgument(format!(
            "trim epsilon {eps} must lie in [0, 0.5)"
        )));
    }
    let (n1, n0) = d.group_sizes()?;
    if n1 == 0 || n0 == 0 {
        return Err(degenerate(n1, n0));
    }
    let names: Vec<&str> = opts.covariates.iter().map(String::as_str).collect();
    let selected = d.select_covariates(&names)?;
    let rows: Vec<&[T]> = selected.units().iter().map(|u| u.covariates.as_slice()).collect();
    let x = Matrix::with_intercept(&rows)?;
    let g: Vec<T> = d.units().iter().map(|u| u.group).collect();
    let fit = fit_logistic(&x, &g)?;
    let e = predict_prob(&fit, &x)?;

    let lo = T::lit(eps);
    let hi = T::one() - lo;
    let keep: Vec<bool> = e.iter().map(|&p| p >= lo && p <= hi).collect();
    let trimmed = keep.iter().filter(|&&k| !k).count();
    if trimmed > 0 && opts.trim_policy == TrimPolicy::Reject {
        return Err(GdidError::OverlapViolation(format!(
            "{trimmed} fitted propensities outside [{eps}, {}]",
            1.0 - eps
        )));
    }
    let kept: Vec<usize> = (0..d.len()).filter(|&i| keep[i]).collect();
    let k1 = kept.iter().filter(|&&i| g[i] == T::one()).count();
    let k0 = kept.len() - k1;
    if k1 == 0 || k0 == 0 {
        return Err(GdidError::OverlapViolation(format!(
            "trimming left n1={k1}, n0={k0}"
        )));
    }
    let n = T::from_count(kept.len());
    let p_hat = T::from_count(k1) / n;
    let total: T = kept
        .iter()
        .map(|&i| {
            let u = &d.units()[i];
            u.delta() / p_hat * (g[i] - e[i]) / (T::one() - e[i])
        })
        .sum();
    let mut est = Estimate::new(total / n, estimand, Method::Ipw, binary_counts(d, k1, k0))?;
    est.trimmed = trimmed;
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousOptions<T> {
    pub g: T,
    pub g_prime: T,
    /// Degree of the polynomial basis in `G`.
    pub degree: usize,
    pub allow_extrapolation: bool,
}

impl<T: Scalar> ContinuousOptions<T> {
    pub fn new(g: T, g_prime: T) -> Self {
        ContinuousOptions {
            g,
            g_prime,
            degree: 1,
            allow_extrapolation: false,
        }
    }
}

/// Regression-based contrast `E[dY | G = g] - E[dY | G = g']` for a
/// continuous or multi-valued numeric group.
///
/// `dY` is regressed on a polynomial in the standardized group value.
pub fn gdid_continuous<T: Scalar>(
    d: &PanelDataset<T>,
    design: DesignKind,
    opts: &ContinuousOptions<T>,
) -> Result<Estimate<T>> {
    let estimand = label_estimand(design, Method::Continuous)?;
    if opts.g == opts.g_prime {
        return Err(GdidError::InvalidArgument(
            "contrast points g and g' must differ".into(),
        ));
    }
    if opts.degree == 0 {
        return Err(GdidError::InvalidArgument("basis degree must be at least 1".into()));
    }
    let gs: Vec<T> = d.units().iter().map(|u| u.group).collect();
    let (min, max) = gs
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !opts.allow_extrapolation {
        for &v in &[opts.g, opts.g_prime] {
            if v < min || v > max {
                return Err(GdidError::Extrapolation {
                    value: v.to_f64_lossy(),
                    min: min.to_f64_lossy(),
                    max: max.to_f64_lossy(),
                });
            }
        }
    }
    let center = mean(&gs).expect("non-empty dataset");
    let half_range = (max - min) / T::lit(2.0);
    let scale = if half_range > T::zero() { half_range } else { T::one() };
    let basis = |v: T| -> Vec<T> {
        let u = (v - center) / scale;
        let mut row = Vec::with_capacity(opts.degree + 1);
        let mut p = T::one();
        for _ in 0..=opts.degree {
            row.push(p);
            p = p * u;
        }
        row
    };
    let rows: Vec<Vec<T>> = gs.iter().map(|&v| basis(v)).collect();
    let x = Matrix::from_rows(&rows)?;
    let y: Vec<T> = d.units().iter().map(|u| u.delta()).collect();
    let fit = fit_ols(&x, &y)?;
    let value = fit.predict_row(&basis(opts.g))? - fit.predict_row(&basis(opts.g_prime))?;
    let counts = vec![GroupCount {
        group: "all".into(),
        n: d.len(),
    }];
    let mut est = Estimate::new(value, estimand, Method::Continuous, counts)?;
    est.contrast = Some((opts.g, opts.g_prime));
    Ok(est)
}

/// Shifts an effect-modification estimate by the asserted range of the
/// `G = 0` effect, giving an interval for the `G = 1` ATT.
///
/// With `tau_l = tau_u = 0` (a subgroup known to be unaffected) the interval
/// collapses to the point-identified ATT.
pub fn apply_bounds<T: Scalar>(e: &Estimate<T>, b: &BoundsSpec<T>) -> Result<Interval<T>> {
    if b.tau_l > b.tau_u {
        return Err(GdidError::InvalidBounds {
            lower: b.tau_l.to_f64_lossy(),
            upper: b.tau_u.to_f64_lossy(),
        });
    }
    if e.estimand != EstimandKind::EffectModification {
        return Err(GdidError::InvalidArgument(format!(
            "bounds apply to effect-modification estimates, not {}",
            e.estimand.as_str()
        )));
    }
    Interval::new(e.value + b.tau_l, e.value + b.tau_u)
}

/// `(dY|G1,A1 - dY|G0,A1) - (dY|G1,A0 - dY|G0,A0)` over the four cell means.
pub fn triple_differences<T: Scalar>(d: &PanelDataset<T>) -> Result<Estimate<T>> {
    d.require_binary_group()?;
    if let Some(u) = d.units().iter().find(|u| u.a0 != T::zero()) {
        return Err(GdidError::InvalidData(format!(
            "triple differences needs A0 = 0 for every unit; unit `{}` has A0 = {}",
            u.unit_id, u.a0
        )));
    }
    if let Some(u) = d
        .units()
        .iter()
        .find(|u| u.a1 != T::zero() && u.a1 != T::one())
    {
        return Err(GdidError::InvalidData(format!(
            "A1 must be 0/1; unit `{}` has A1 = {}",
            u.unit_id, u.a1
        )));
    }
    let mut sums = [[T::zero(); 2]; 2];
    let mut counts = [[0usize; 2]; 2];
    for u in d.units() {
        let g = usize::from(u.group == T::one());
        let a = usize::from(u.a1 == T::one());
        sums[g][a] += u.delta();
        counts[g][a] += 1;
    }
    let mut means = [[T::zero(); 2]; 2];
    for g in 0..2 {
        for a in 0..2 {
            if counts[g][a] == 0 {
                return Err(GdidError::EmptyCell {
                    group: g as u8,
                    treated: a as u8,
                });
            }
            means[g][a] = sums[g][a] / T::from_count(counts[g][a]);
        }
    }
    let value = (means[1][1] - means[0][1]) - (means[1][0] - means[0][0]);
    let cells = [(1, 1), (0, 1), (1, 0), (0, 0)]
        .iter()
        .map(|&(g, a)| GroupCount {
            group: format!("{},A1={a}", d.group_label(T::from_count(g))),
            n: counts[g][a],
        })
        .collect();
    Estimate::new(value, EstimandKind::TripleDiffAtt, Method::Triple, cells)
}

/// Anything that maps a dataset to an [`Estimate`]; used by the bootstrap
/// and the Monte Carlo driver.
pub trait Estimator<T: Scalar>: Sync {
    fn estimate(&self, d: &PanelDataset<T>) -> Result<Estimate<T>>;
}

impl<T, F> Estimator<T> for F
where
    T: Scalar,
    F: Fn(&PanelDataset<T>) -> Result<Estimate<T>> + Sync,
{
    fn estimate(&self, d: &PanelDataset<T>) -> Result<Estimate<T>> {
        self(d)
    }
}

/// The built-in estimators as a value.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec<T> {
    Simple { design: DesignKind },
    Ipw { design: DesignKind, options: IpwOptions },
    Continuous { design: DesignKind, options: ContinuousOptions<T> },
    Triple,
}

impl<T: Scalar> EstimatorSpec<T> {
    pub fn method(&self) -> Method {
        match self {
            EstimatorSpec::Simple { .. } => Method::Simple,
            EstimatorSpec::Ipw { .. } => Method::Ipw,
            EstimatorSpec::Continuous { .. } => Method::Continuous,
            EstimatorSpec::Triple => Method::Triple,
        }
    }
}

impl<T: Scalar> Estimator<T> for EstimatorSpec<T> {
    fn estimate(&self, d: &PanelDataset<T>) -> Result<Estimate<T>> {
        match self {
            EstimatorSpec::Simple { design } => gdid_simple(d, *design),
            EstimatorSpec::Ipw { design, options } => gdid_ipw(d, *design, options),
            EstimatorSpec::Continuous { design, options } => gdid_continuous(d, *design, options),
            EstimatorSpec::Triple => triple_differences(d),
        }
    }
}

/// Estimates every level against `reference`, each pair on its own subset.
///
/// Each contrast rests on its own pairwise parallel-trends assumption.
pub fn pairwise_contrasts<T: Scalar, E: Estimator<T> + ?Sized>(
    d: &PanelDataset<T>,
    reference: &str,
    estimator: &E,
) -> Result<Vec<(String, Estimate<T>)>> {
    let labels: Vec<String> = d
        .distinct_groups()
        .into_iter()
        .map(|g| d.group_label(g))
        .collect();
    if !labels.iter().any(|l| l == reference) {
        return Err(GdidError::InvalidArgument(format!(
            "reference level `{reference}` not present"
        )));
    }
    labels
        .into_iter()
        .filter(|l| l != reference)
        .map(|focal| {
            let pair = d.contrast_subset(&focal, reference)?;
            Ok((focal, estimator.estimate(&pair)?))
        })
        .collect()
}
