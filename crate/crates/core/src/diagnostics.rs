//! Pre-baseline trend comparison between groups.
//!
//! A trend is the change in a group's mean outcome between adjacent
//! untreated time points. For the canonical and pre-post designs every unit
//! is untreated at `t = 0`, so `Y0` closes the pre-baseline series. In the
//! no-pre-period design the treated group is never seen untreated and the
//! comparison is not available.

use serde::Serialize;

use crate::error::{GdidError, Result};
use crate::estimators::Interval;
use crate::inference::{bootstrap_statistic, require_two_groups, BootstrapConfig};
use crate::panel::{DesignKind, PanelDataset};
use crate::scalar::Scalar;

pub const PARTIAL_NOTE: &str = "Partial assessment: similar pre-baseline trends are consistent with \
     group parallel trends after baseline but cannot establish them.";

pub const NOT_ASSESSABLE_NOTE: &str = "Not assessable: in the no-pre-period design the G=1 group is \
     treated at every observed time, so its untreated trend is never observed and pre-trends say \
     nothing about group parallel trends.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreTrendResult<T> {
    pub assessable: bool,
    /// Between-group gap in mean change for each adjacent pair of
    /// pre-baseline time points, oldest pair first.
    pub per_period_gap: Option<Vec<T>>,
    pub pooled_gap: Option<T>,
    pub pooled_se: Option<T>,
    pub ci: Option<Interval<T>>,
    pub verdict_note: String,
}

impl<T> PreTrendResult<T> {
    fn not_assessable() -> Self {
        PreTrendResult {
            assessable: false,
            per_period_gap: None,
            pooled_gap: None,
            pooled_se: None,
            ci: None,
            verdict_note: NOT_ASSESSABLE_NOTE.into(),
        }
    }
}

/// Per-pair gaps `mean_{G=1}(Y_{s+1} - Y_s) - mean_{G=0}(Y_{s+1} - Y_s)`.
pub fn pretrend_gaps<T: Scalar>(d: &PanelDataset<T>) -> Result<Vec<T>> {
    require_two_groups(d)?;
    let points = d.pre_period_names().len() + 1;
    if points < 2 {
        return Err(GdidError::InsufficientPrePeriods(points));
    }
    let mut sums = vec![[T::zero(); 2]; points - 1];
    let mut counts = [0usize; 2];
    for u in d.units() {
        let g = usize::from(u.group == T::one());
        counts[g] += 1;
        let path: Vec<T> = u.untreated_path().collect();
        for (s, w) in path.windows(2).enumerate() {
            sums[s][g] += w[1] - w[0];
        }
    }
    let (n1, n0) = (T::from_count(counts[1]), T::from_count(counts[0]));
    Ok(sums.iter().map(|s| s[1] / n1 - s[0] / n0).collect())
}

fn pooled<T: Scalar>(gaps: &[T]) -> T {
    gaps.iter().copied().sum::<T>() / T::from_count(gaps.len())
}

/// Compares pre-baseline trends across groups, with a bootstrap interval
/// for the pooled (average) gap.
pub fn pretrends<T: Scalar>(
    d: &PanelDataset<T>,
    design: DesignKind,
    cfg: &BootstrapConfig,
) -> Result<PreTrendResult<T>> {
    match design {
        DesignKind::Unclassified => return Err(GdidError::UnclassifiedDesign),
        DesignKind::NoPrePeriod => return Ok(PreTrendResult::not_assessable()),
        DesignKind::Canonical | DesignKind::PrePost => {}
    }
    let gaps = pretrend_gaps(d)?;
    let pooled_gap = pooled(&gaps);
    let inf = bootstrap_statistic(d, |s| pretrend_gaps(s).map(|g| pooled(&g)), cfg)?;
    Ok(PreTrendResult {
        assessable: true,
        per_period_gap: Some(gaps),
        pooled_gap: Some(pooled_gap),
        pooled_se: Some(inf.se),
        ci: Some(inf.ci_percentile),
        verdict_note: PARTIAL_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::PanelUnit;

    fn unit(id: &str, g: f64, pre: Vec<f64>, y0: f64) -> PanelUnit<f64> {
        PanelUnit {
            pre_outcomes: pre,
            ..PanelUnit::new(id, g, 0.0, 1.0, y0, y0 + 1.0)
        }
    }

    fn cfg() -> BootstrapConfig {
        BootstrapConfig {
            replicates: 50,
            ..Default::default()
        }
    }

    #[test]
    fn no_pre_period_is_not_assessable() {
        let d = PanelDataset::new(
            vec![
                PanelUnit::new("1", 1.0, 1.0, 1.0, 0.0, 1.0),
                PanelUnit::new("2", 0.0, 0.0, 0.0, 0.0, 1.0),
            ],
            vec![],
            vec![],
        )
        .unwrap();
        let r = pretrends(&d, DesignKind::NoPrePeriod, &cfg()).unwrap();
        assert!(!r.assessable);
        assert!(r.per_period_gap.is_none() && r.pooled_gap.is_none());
        assert!(r.pooled_se.is_none() && r.ci.is_none());
    }

    #[test]
    fn gaps_by_hand() {
        let names = vec!["m2".to_string(), "m1".to_string()];
        let d = PanelDataset::new(
            vec![
                unit("a", 1.0, vec![0.0, 2.0], 5.0),
                unit("b", 1.0, vec![1.0, 3.0], 4.0),
                unit("c", 0.0, vec![0.0, 1.0], 2.0),
                unit("d", 0.0, vec![2.0, 3.0], 4.0),
            ],
            vec![],
            names,
        )
        .unwrap();
        // G=1 changes: (2,2) then (3,1); G=0 changes: (1,1) then (1,1)
        let g = pretrend_gaps(&d).unwrap();
        assert_eq!(g, vec![1.0, 1.0]);
        let r = pretrends(&d, DesignKind::PrePost, &cfg()).unwrap();
        assert_eq!(r.pooled_gap, Some(1.0));
        assert!(r.assessable);
    }

    #[test]
    fn identical_paths_give_zero_gaps_and_single_pair_pools_exactly() {
        let d = PanelDataset::new(
            vec![
                unit("a", 1.0, vec![1.0], 3.0),
                unit("b", 1.0, vec![2.0], 4.0),
                unit("c", 0.0, vec![1.0], 3.0),
                unit("d", 0.0, vec![2.0], 4.0),
            ],
            vec![],
            vec!["m1".into()],
        )
        .unwrap();
        let r = pretrends(&d, DesignKind::Canonical, &cfg()).unwrap();
        assert_eq!(r.per_period_gap, Some(vec![0.0]));
        assert_eq!(r.pooled_gap, Some(0.0));
    }

    #[test]
    fn insufficient_pre_periods() {
        let d = PanelDataset::new(
            vec![unit("a", 1.0, vec![], 1.0), unit("b", 0.0, vec![], 1.0)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(
            pretrends(&d, DesignKind::PrePost, &cfg()),
            Err(GdidError::InsufficientPrePeriods(1))
        );
        assert_eq!(
            pretrends(&d, DesignKind::Unclassified, &cfg()),
            Err(GdidError::UnclassifiedDesign)
        );
    }
}
