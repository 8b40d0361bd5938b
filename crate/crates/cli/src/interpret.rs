//! Plain-language sentences for estimates.
//!
//! The sentence always names what was estimated for the design at hand and
//! ends with a caveat: a contrast across groups or periods does not make the
//! group or the period a cause of the difference.

use gdid_core::{DesignKind, EstimandKind, Interval};
use serde::Serialize;

/// Direction in which the treatment is understood to move the outcome.
///
/// Effect-modification sentences are phrased relative to it: with
/// `Reduce`, a positive contrast means the treatment reduced the outcome by
/// fewer units in group 1 than in group 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Increase,
    Reduce,
}

impl Direction {
    fn verb(self) -> &'static str {
        match self {
            Direction::Increase => "increase",
            Direction::Reduce => "reduce",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Labels {
    pub treatment_name: String,
    pub group1_name: String,
    pub group0_name: String,
    pub outcome_name: String,
    pub unit: String,
    pub period0_name: String,
    pub period1_name: String,
    pub direction: Direction,
    pub decimals: usize,
}

impl Default for Labels {
    fn default() -> Self {
        Labels {
            treatment_name: "the treatment".into(),
            group1_name: "group 1".into(),
            group0_name: "group 0".into(),
            outcome_name: "the outcome".into(),
            unit: "units".into(),
            period0_name: "the first period".into(),
            period1_name: "the second period".into(),
            direction: Direction::Increase,
            decimals: 2,
        }
    }
}

fn level_text(level: f64) -> String {
    let pct = format!("{:.4}", level * 100.0);
    pct.trim_end_matches('0').trim_end_matches('.').to_string()
}

struct Fmt<'a> {
    labels: &'a Labels,
    level: f64,
}

impl Fmt<'_> {
    fn num(&self, v: f64) -> String {
        let s = format!("{:.*}", self.labels.decimals, v);
        // avoid "-0.00"
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }

    /// Interval of `sign * value`, reordered.
    fn ci(&self, ci: Interval<f64>, sign: f64) -> String {
        let (a, b) = (sign * ci.lower, sign * ci.upper);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        format!("({}% CI: {}, {})", level_text(self.level), self.num(lo), self.num(hi))
    }
}

/// Renders the sentence for one estimate. `level` is the confidence level
/// of `ci`, e.g. `0.95`.
pub fn render_interpretation(
    design: DesignKind,
    estimand: EstimandKind,
    value: f64,
    ci: Interval<f64>,
    level: f64,
    labels: &Labels,
) -> String {
    let f = Fmt { labels, level };
    let l = labels;
    let zero = f.num(value) == f.num(0.0);
    let sign = if value < 0.0 { -1.0 } else { 1.0 };
    let size = f.num(value.abs());
    let treatment = capitalize(&l.treatment_name);

    match (estimand, design) {
        (EstimandKind::EffectModification, _) | (EstimandKind::BoundedAtt, _) => {
            let caveat = format!(
                " This contrast does not show that belonging to {g1} changes the effect of {t}: \
                 {g1} may simply be associated with varying effects of {t}.",
                g1 = l.group1_name,
                t = l.treatment_name,
            );
            if zero {
                return format!(
                    "{treatment} showed no estimated difference in its effect on {o} between {g1} and {g0} {ci}.{caveat}",
                    o = l.outcome_name,
                    g1 = l.group1_name,
                    g0 = l.group0_name,
                    ci = f.ci(ci, 1.0),
                );
            }
            // A positive contrast works against a reduction.
            let more = (value > 0.0) == (l.direction == Direction::Increase);
            format!(
                "{treatment} was estimated to {verb} {o} by {size} {cmp} {u} {ci} in {g1} than {g0}.{caveat}",
                verb = l.direction.verb(),
                o = l.outcome_name,
                cmp = if more { "more" } else { "fewer" },
                u = l.unit,
                ci = f.ci(ci, sign),
                g1 = l.group1_name,
                g0 = l.group0_name,
            )
        }
        (EstimandKind::AttChangeOverTime, _) => {
            let caveat = format!(
                " This contrast does not show that moving from {p0} to {p1} changes the effect of {g1}: \
                 {p1} may simply be associated with time-varying effects of {g1}.",
                p0 = l.period0_name,
                p1 = l.period1_name,
                g1 = l.group1_name,
            );
            let subject = capitalize(&l.group1_name);
            if zero {
                return format!(
                    "{subject} showed no estimated difference in its effect on {o} between {p1} and {p0} {ci}.{caveat}",
                    o = l.outcome_name,
                    p1 = l.period1_name,
                    p0 = l.period0_name,
                    ci = f.ci(ci, 1.0),
                );
            }
            format!(
                "{subject} was estimated to {verb} {o} by {size} additional {u} {ci} in {p1} compared to {p0} among {g1}.{caveat}",
                verb = if value > 0.0 { "increase" } else { "reduce" },
                o = l.outcome_name,
                u = l.unit,
                ci = f.ci(ci, sign),
                p1 = l.period1_name,
                p0 = l.period0_name,
                g1 = l.group1_name,
            )
        }
        (EstimandKind::AttPeriod1, _) | (EstimandKind::TripleDiffAtt, _) => {
            let among = if estimand == EstimandKind::TripleDiffAtt {
                format!("treated units of {}", l.group1_name)
            } else {
                l.group1_name.clone()
            };
            let caveat = format!(
                " The estimate describes {among} only; {g1} may simply be associated with effects of {t} \
                 that differ from those elsewhere.",
                g1 = l.group1_name,
                t = l.treatment_name,
            );
            if zero {
                return format!(
                    "{treatment} showed no estimated effect on {o} among {among} in {p1} {ci}.{caveat}",
                    o = l.outcome_name,
                    p1 = l.period1_name,
                    ci = f.ci(ci, 1.0),
                );
            }
            format!(
                "{treatment} was estimated to {verb} {o} by {size} {u} {ci} among {among} in {p1}.{caveat}",
                verb = if value > 0.0 { "increase" } else { "reduce" },
                o = l.outcome_name,
                u = l.unit,
                ci = f.ci(ci, sign),
                p1 = l.period1_name,
            )
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn covid() -> Labels {
        Labels {
            treatment_name: "Covid-19".into(),
            group1_name: "high UHC countries".into(),
            group0_name: "low UHC countries".into(),
            outcome_name: "immunization coverage".into(),
            unit: "percentage points".into(),
            period0_name: "the pre-Covid period".into(),
            period1_name: "the post-Covid period".into(),
            direction: Direction::Reduce,
            decimals: 2,
        }
    }

    fn ci(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn pre_post_sentence() {
        let s = render_interpretation(
            DesignKind::PrePost,
            EstimandKind::EffectModification,
            1.14,
            ci(0.39, 1.90),
            0.95,
            &covid(),
        );
        assert!(s.starts_with("Covid-19 was estimated to reduce immunization coverage by 1.14 fewer percentage points (95% CI: 0.39, 1.90) in high UHC countries than low UHC countries."), "{s}");
        assert!(s.contains("may simply be associated with"));
    }

    #[test]
    fn pre_post_negative_flips_comparison_and_interval() {
        let s = render_interpretation(
            DesignKind::PrePost,
            EstimandKind::EffectModification,
            -1.14,
            ci(-1.90, -0.39),
            0.9,
            &covid(),
        );
        assert!(s.contains("by 1.14 more percentage points (90% CI: 0.39, 1.90)"), "{s}");
        let inc = Labels { direction: Direction::Increase, ..covid() };
        let s = render_interpretation(DesignKind::PrePost, EstimandKind::EffectModification, 0.5, ci(0.1, 0.9), 0.95, &inc);
        assert!(s.contains("increase immunization coverage by 0.50 more percentage points (95% CI: 0.10, 0.90)"), "{s}");
    }

    #[test]
    fn no_pre_period_sentence() {
        let labels = Labels {
            treatment_name: "high UHC".into(),
            group1_name: "high UHC".into(),
            ..covid()
        };
        let s = render_interpretation(
            DesignKind::NoPrePeriod,
            EstimandKind::AttChangeOverTime,
            1.14,
            ci(0.39, 1.90),
            0.95,
            &labels,
        );
        assert!(s.starts_with("High UHC was estimated to increase immunization coverage by 1.14 additional percentage points (95% CI: 0.39, 1.90) in the post-Covid period compared to the pre-Covid period"), "{s}");
        assert!(s.contains("may simply be associated with time-varying effects"));
    }

    #[test]
    fn zero_and_canonical_variants() {
        let s = render_interpretation(
            DesignKind::PrePost,
            EstimandKind::EffectModification,
            0.001,
            ci(-0.5, 0.5),
            0.95,
            &covid(),
        );
        assert!(s.contains("no estimated difference"), "{s}");
        assert!(s.contains("(95% CI: -0.50, 0.50)"));
        let s = render_interpretation(
            DesignKind::Canonical,
            EstimandKind::AttPeriod1,
            -4.0,
            ci(-6.0, -2.0),
            0.95,
            &Labels::default(),
        );
        assert!(s.starts_with("The treatment was estimated to reduce the outcome by 4.00 units (95% CI: 2.00, 6.00) among group 1"), "{s}");
        assert!(s.contains("may simply be associated with"));
    }

    #[test]
    fn level_formatting() {
        assert_eq!(level_text(0.95), "95");
        assert_eq!(level_text(0.995), "99.5");
    }
}
