//! Two-period panel records, CSV ingestion and design detection.
//!
//! Each unit carries the observed tuple `(G, A0, Y0, A1, Y1)` together with
//! optional baseline covariates `Z` and optional pre-baseline outcomes.
//! Pre-baseline outcome columns are ordered oldest first, so the `k`-th of
//! `K` columns sits at time index `k - K - 1` (the last one at `t = -1`).

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{GdidError, Result};
use crate::scalar::{mean, sample_variance, Scalar};

/// Which group/period/treatment structure a dataset instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DesignKind {
    /// `A0 = 0`, `A1 = G`: untreated first period, group indexes treatment.
    Canonical,
    /// `A0 = 0`, `A1 = 1`: everyone untreated, then everyone treated.
    PrePost,
    /// `A0 = A1 = G`: treatment fixed by group in both periods.
    NoPrePeriod,
    Unclassified,
}

impl DesignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignKind::Canonical => "Canonical",
            DesignKind::PrePost => "PrePost",
            DesignKind::NoPrePeriod => "NoPrePeriod",
            DesignKind::Unclassified => "Unclassified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelUnit<T> {
    pub unit_id: String,
    /// Group code. `0`/`1` in binary designs, a dose for continuous groups,
    /// or a level index into [`PanelDataset::group_levels`].
    pub group: T,
    pub a0: T,
    pub a1: T,
    pub y0: T,
    pub y1: T,
    pub covariates: Vec<T>,
    /// Outcomes before `t = 0`, oldest first.
    pub pre_outcomes: Vec<T>,
}

impl<T: Scalar> PanelUnit<T> {
    /// Builds a unit with no covariates and no pre-baseline outcomes.
    pub fn new(unit_id: impl Into<String>, group: T, a0: T, a1: T, y0: T, y1: T) -> Self {
        PanelUnit {
            unit_id: unit_id.into(),
            group,
            a0,
            a1,
            y0,
            y1,
            covariates: Vec::new(),
            pre_outcomes: Vec::new(),
        }
    }

    /// First difference `Y1 - Y0`.
    #[inline]
    pub fn delta(&self) -> T {
        self.y1 - self.y0
    }

    /// Outcome series from the oldest pre-baseline period through `t = 0`.
    pub fn untreated_path(&self) -> impl Iterator<Item = T> + '_ {
        self.pre_outcomes.iter().copied().chain(std::iter::once(self.y0))
    }
}

/// Immutable collection of units sharing the same covariate and
/// pre-period layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset<T> {
    units: Vec<PanelUnit<T>>,
    covariate_names: Vec<String>,
    pre_period_names: Vec<String>,
    group_levels: Option<Vec<String>>,
}

impl<T: Scalar> PanelDataset<T> {
    /// Validates and wraps a set of units.
    pub fn new(
        units: Vec<PanelUnit<T>>,
        covariate_names: Vec<String>,
        pre_period_names: Vec<String>,
    ) -> Result<Self> {
        let d = PanelDataset {
            units,
            covariate_names,
            pre_period_names,
            group_levels: None,
        };
        d.check()?;
        Ok(d)
    }

    /// Wraps units whose group codes index into `levels`.
    pub fn with_group_levels(
        units: Vec<PanelUnit<T>>,
        covariate_names: Vec<String>,
        pre_period_names: Vec<String>,
        levels: Vec<String>,
    ) -> Result<Self> {
        let d = PanelDataset {
            units,
            covariate_names,
            pre_period_names,
            group_levels: Some(levels),
        };
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<()> {
        if self.units.is_empty() {
            return Err(GdidError::EmptyData);
        }
        let k_cov = self.covariate_names.len();
        let k_pre = self.pre_period_names.len();
        let mut ids = HashSet::with_capacity(self.units.len());
        for u in &self.units {
            if !ids.insert(u.unit_id.as_str()) {
                return Err(GdidError::DuplicateUnit(u.unit_id.clone()));
            }
            if u.covariates.len() != k_cov || u.pre_outcomes.len() != k_pre {
                return Err(GdidError::InvalidData(format!(
                    "unit `{}` has {} covariates and {} pre-period outcomes, expected {} and {}",
                    u.unit_id,
                    u.covariates.len(),
                    u.pre_outcomes.len(),
                    k_cov,
                    k_pre
                )));
            }
            let scalars = [u.group, u.a0, u.a1, u.y0, u.y1];
            if scalars
                .iter()
                .chain(&u.covariates)
                .chain(&u.pre_outcomes)
                .any(|v| !v.is_finite())
            {
                return Err(GdidError::InvalidData(format!(
                    "unit `{}` has a non-finite value",
                    u.unit_id
                )));
            }
        }
        if let Some(levels) = &self.group_levels {
            let n = levels.len();
            for u in &self.units {
                let ok = u.group >= T::zero()
                    && u.group.fract() == T::zero()
                    && u.group < T::from_count(n);
                if !ok {
                    return Err(GdidError::InvalidData(format!(
                        "unit `{}` has group code {} outside the {} declared levels",
                        u.unit_id, u.group, n
                    )));
                }
            }
        }
        Ok(())
    }

    /// Resampled copy that skips validation; unit ids may repeat.
    pub(crate) fn resampled(&self, indices: &[usize]) -> Self {
        PanelDataset {
            units: indices.iter().map(|&i| self.units[i].clone()).collect(),
            covariate_names: self.covariate_names.clone(),
            pre_period_names: self.pre_period_names.clone(),
            group_levels: self.group_levels.clone(),
        }
    }

    pub fn units(&self) -> &[PanelUnit<T>] {
        &self.units
    }

    pub fn into_units(self) -> Vec<PanelUnit<T>> {
        self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn pre_period_names(&self) -> &[String] {
        &self.pre_period_names
    }

    pub fn group_levels(&self) -> Option<&[String]> {
        self.group_levels.as_deref()
    }

    /// Human-readable label of a group code.
    pub fn group_label(&self, code: T) -> String {
        match &self.group_levels {
            Some(levels) => code
                .to_usize()
                .and_then(|i| levels.get(i).cloned())
                .unwrap_or_else(|| code.to_string()),
            None => code.to_string(),
        }
    }

    /// Distinct group codes in ascending order.
    pub fn distinct_groups(&self) -> Vec<T> {
        let mut gs: Vec<T> = self.units.iter().map(|u| u.group).collect();
        gs.sort_by(|a, b| a.partial_cmp(b).expect("finite group codes"));
        gs.dedup();
        gs
    }

    pub fn has_binary_group(&self) -> bool {
        self.units
            .iter()
            .all(|u| u.group == T::zero() || u.group == T::one())
    }

    /// Returns `(n1, n0)` for a 0/1-coded group.
    pub fn group_sizes(&self) -> Result<(usize, usize)> {
        self.require_binary_group()?;
        let n1 = self.units.iter().filter(|u| u.group == T::one()).count();
        Ok((n1, self.units.len() - n1))
    }

    pub(crate) fn require_binary_group(&self) -> Result<()> {
        if let Some(u) = self
            .units
            .iter()
            .find(|u| u.group != T::zero() && u.group != T::one())
        {
            return Err(GdidError::NonBinaryGroup(format!(
                "group {} on unit `{}`",
                self.group_label(u.group),
                u.unit_id
            )));
        }
        Ok(())
    }

    /// First differences split by a 0/1-coded group as `(G=1, G=0)`.
    pub fn deltas_by_group(&self) -> Result<(Vec<T>, Vec<T>)> {
        self.require_binary_group()?;
        let (g1, g0): (Vec<_>, Vec<_>) = self.units.iter().partition(|u| u.group == T::one());
        if g1.is_empty() || g0.is_empty() {
            return Err(degenerate(g1.len(), g0.len()));
        }
        Ok((
            g1.iter().map(|u| u.delta()).collect(),
            g0.iter().map(|u| u.delta()).collect(),
        ))
    }

    /// Recodes a two-valued group column to `0`/`1`.
    ///
    /// The reference level (coded `0`) is `reference` when given, otherwise
    /// the smaller of the two values (by level order for categorical groups,
    /// numerically otherwise). Labels are kept as group levels.
    pub fn recode_binary(&self, reference: Option<&str>) -> Result<Self> {
        let groups = self.distinct_groups();
        if groups.len() != 2 {
            return Err(GdidError::DegenerateGroup(format!(
                "expected exactly two group values, found {}",
                groups.len()
            )));
        }
        let (lo, hi) = (groups[0], groups[1]);
        let (ref_code, focal_code) = match reference {
            None => (lo, hi),
            Some(label) => {
                if self.group_label(lo) == label {
                    (lo, hi)
                } else if self.group_label(hi) == label {
                    (hi, lo)
                } else {
                    return Err(GdidError::InvalidArgument(format!(
                        "reference level `{label}` is not one of the group values"
                    )));
                }
            }
        };
        self.contrast_codes(focal_code, ref_code)
    }

    /// Keeps the units of two group levels, coding `focal` as `1` and
    /// `reference` as `0`.
    pub fn contrast_subset(&self, focal: &str, reference: &str) -> Result<Self> {
        if focal == reference {
            return Err(GdidError::InvalidArgument(
                "focal and reference levels must differ".into(),
            ));
        }
        let find = |label: &str| {
            self.distinct_groups()
                .into_iter()
                .find(|&g| self.group_label(g) == label)
                .ok_or_else(|| {
                    GdidError::InvalidArgument(format!("group level `{label}` not present"))
                })
        };
        let f = find(focal)?;
        let r = find(reference)?;
        self.contrast_codes(f, r)
    }

    fn contrast_codes(&self, focal: T, reference: T) -> Result<Self> {
        let relabel_treatment = |a: T, g: T| {
            // Treatment columns coded as the group value follow the recode.
            if self.group_levels.is_none() && a == g && !(a == T::zero() || a == T::one()) {
                if g == focal {
                    T::one()
                } else {
                    T::zero()
                }
            } else {
                a
            }
        };
        let units: Vec<PanelUnit<T>> = self
            .units
            .iter()
            .filter(|u| u.group == focal || u.group == reference)
            .map(|u| {
                let mut v = u.clone();
                v.a0 = relabel_treatment(u.a0, u.group);
                v.a1 = relabel_treatment(u.a1, u.group);
                v.group = if u.group == focal { T::one() } else { T::zero() };
                v
            })
            .collect();
        let levels = vec![self.group_label(reference), self.group_label(focal)];
        PanelDataset::with_group_levels(
            units,
            self.covariate_names.clone(),
            self.pre_period_names.clone(),
            levels,
        )
    }

    /// Copy keeping only the named covariates, in the given order.
    pub fn select_covariates(&self, names: &[&str]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.covariate_names
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| GdidError::Mapping(format!("unknown covariate `{n}`")))
            })
            .collect::<Result<_>>()?;
        let mut d = self.clone();
        for u in &mut d.units {
            u.covariates = idx.iter().map(|&i| u.covariates[i]).collect();
        }
        d.covariate_names = idx.iter().map(|&i| self.covariate_names[i].clone()).collect();
        Ok(d)
    }
}

pub(crate) fn degenerate(n1: usize, n0: usize) -> GdidError {
    GdidError::DegenerateGroup(format!("group sizes n1={n1}, n0={n0}; both must be non-empty"))
}

/// Classifies a dataset into one of the three identified designs.
///
/// Checks run in the order Canonical, PrePost, NoPrePeriod; with both groups
/// present at most one can match. Comparisons are exact, so a continuous
/// dose stored in both the group and treatment columns is recognised too.
pub fn detect_design<T: Scalar>(d: &PanelDataset<T>) -> DesignKind {
    let units = d.units();
    let zero = T::zero();
    let one = T::one();
    if units.iter().all(|u| u.a0 == zero && u.a1 == u.group) {
        DesignKind::Canonical
    } else if units.iter().all(|u| u.a0 == zero && u.a1 == one) {
        DesignKind::PrePost
    } else if units.iter().all(|u| u.a0 == u.group && u.a1 == u.group) {
        DesignKind::NoPrePeriod
    } else {
        DesignKind::Unclassified
    }
}

/// Outcome of [`validate`]: the dataset plus its confirmed design and
/// group sizes.
#[derive(Debug, Clone, Copy)]
pub struct ValidatedPanel<'a, T> {
    pub data: &'a PanelDataset<T>,
    pub design: DesignKind,
    /// Units with `G = 1`, or for non-binary groups the units above the
    /// smallest group value.
    pub n1: usize,
    pub n0: usize,
}

/// Confirms that the data instantiate the declared design.
pub fn validate<T: Scalar>(
    d: &PanelDataset<T>,
    declared: DesignKind,
) -> Result<ValidatedPanel<'_, T>> {
    if declared == DesignKind::Unclassified {
        return Err(GdidError::UnclassifiedDesign);
    }
    let groups = d.distinct_groups();
    let (n1, n0) = if d.has_binary_group() {
        d.group_sizes()?
    } else {
        let lo = groups[0];
        let n0 = d.units().iter().filter(|u| u.group == lo).count();
        (d.len() - n0, n0)
    };
    if n1 == 0 || n0 == 0 {
        return Err(degenerate(n1, n0));
    }
    let detected = detect_design(d);
    if detected != declared {
        return Err(GdidError::DesignMismatch { detected, declared });
    }
    Ok(ValidatedPanel {
        data: d,
        design: declared,
        n1,
        n0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats<T> {
    pub n: usize,
    pub mean_y0: T,
    pub mean_y1: T,
    pub mean_delta: T,
    /// `None` for a single-unit group.
    pub var_delta: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary<T> {
    pub group1: GroupStats<T>,
    pub group0: GroupStats<T>,
}

/// Per-group sample analogs of the conditional means entering the GDiD
/// contrast.
pub fn group_summary<T: Scalar>(d: &PanelDataset<T>) -> Result<GroupSummary<T>> {
    d.require_binary_group()?;
    let stats = |g: T| -> Option<GroupStats<T>> {
        let members: Vec<&PanelUnit<T>> = d.units().iter().filter(|u| u.group == g).collect();
        let y0: Vec<T> = members.iter().map(|u| u.y0).collect();
        let y1: Vec<T> = members.iter().map(|u| u.y1).collect();
        let dl: Vec<T> = members.iter().map(|u| u.delta()).collect();
        Some(GroupStats {
            n: members.len(),
            mean_y0: mean(&y0)?,
            mean_y1: mean(&y1)?,
            mean_delta: mean(&dl)?,
            var_delta: sample_variance(&dl),
        })
    };
    match (stats(T::one()), stats(T::zero())) {
        (Some(group1), Some(group0)) => Ok(GroupSummary { group1, group0 }),
        _ => {
            let (n1, n0) = d.group_sizes()?;
            Err(degenerate(n1, n0))
        }
    }
}

/// Names of the CSV columns that feed each field of a [`PanelUnit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    /// Unit identifier column; row numbers are used when absent.
    pub unit_id: Option<String>,
    pub group: String,
    pub a0: String,
    pub a1: String,
    pub y0: String,
    pub y1: String,
    pub covariates: Vec<String>,
    /// Pre-baseline outcome columns, oldest first.
    pub pre_periods: Vec<String>,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        ColumnMapping {
            unit_id: Some("unit".into()),
            group: "g".into(),
            a0: "a0".into(),
            a1: "a1".into(),
            y0: "y0".into(),
            y1: "y1".into(),
            covariates: Vec::new(),
            pre_periods: Vec::new(),
        }
    }
}

impl ColumnMapping {
    fn all_columns(&self) -> Vec<&str> {
        let mut cols: Vec<&str> = Vec::new();
        if let Some(id) = &self.unit_id {
            cols.push(id);
        }
        cols.extend([
            self.group.as_str(),
            self.a0.as_str(),
            self.a1.as_str(),
            self.y0.as_str(),
            self.y1.as_str(),
        ]);
        cols.extend(self.covariates.iter().map(String::as_str));
        cols.extend(self.pre_periods.iter().map(String::as_str));
        cols
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for c in self.all_columns() {
            if !seen.insert(c) {
                return Err(GdidError::Mapping(format!(
                    "column `{c}` is mapped to more than one field"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Skip rows with an empty mapped cell instead of failing.
    pub drop_incomplete: bool,
}

/// Reads a comma-separated file with a header row.
///
/// Numeric cells are parsed with Rust's locale-independent float grammar and
/// must be finite. Data rows are numbered from 1 in error messages. The
/// group column is numeric when every cell parses as a number; otherwise it
/// is categorical with levels in lexicographic order.
pub fn load_csv<T: Scalar, R: Read>(
    source: R,
    mapping: &ColumnMapping,
    options: LoadOptions,
) -> Result<PanelDataset<T>> {
    mapping.check_disjoint()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(csv_error(e)),
    };
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(GdidError::EmptyData);
    }
    let position = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| GdidError::Mapping(format!("column `{name}` not found in header")))
    };
    let id_col = mapping.unit_id.as_deref().map(position).transpose()?;
    let group_col = position(&mapping.group)?;
    let scalar_cols = [
        (position(&mapping.a0)?, mapping.a0.as_str()),
        (position(&mapping.a1)?, mapping.a1.as_str()),
        (position(&mapping.y0)?, mapping.y0.as_str()),
        (position(&mapping.y1)?, mapping.y1.as_str()),
    ];
    let cov_cols: Vec<usize> = mapping
        .covariates
        .iter()
        .map(|c| position(c))
        .collect::<Result<_>>()?;
    let pre_cols: Vec<usize> = mapping
        .pre_periods
        .iter()
        .map(|c| position(c))
        .collect::<Result<_>>()?;

    struct Row<T> {
        id: String,
        group: String,
        values: [T; 4],
        covariates: Vec<T>,
        pre: Vec<T>,
    }

    let mut rows: Vec<Row<T>> = Vec::new();
    let mut n_records = 0usize;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(csv_error)?;
        n_records += 1;
        let cell = |idx: usize| record.get(idx).unwrap_or("");
        let mut mapped = vec![group_col];
        mapped.extend(scalar_cols.iter().map(|(c, _)| *c));
        mapped.extend(&cov_cols);
        mapped.extend(&pre_cols);
        mapped.extend(id_col);
        if let Some(&blank) = mapped.iter().find(|&&c| cell(c).is_empty()) {
            if options.drop_incomplete {
                continue;
            }
            return Err(GdidError::MissingValue {
                row,
                column: headers[blank].to_string(),
            });
        }
        let parse = |idx: usize| parse_number::<T>(cell(idx), row, &headers[idx]);
        let values = [
            parse(scalar_cols[0].0)?,
            parse(scalar_cols[1].0)?,
            parse(scalar_cols[2].0)?,
            parse(scalar_cols[3].0)?,
        ];
        rows.push(Row {
            id: id_col.map_or_else(|| row.to_string(), |c| cell(c).to_string()),
            group: cell(group_col).to_string(),
            values,
            covariates: cov_cols.iter().map(|&c| parse(c)).collect::<Result<_>>()?,
            pre: pre_cols.iter().map(|&c| parse(c)).collect::<Result<_>>()?,
        });
    }
    if n_records == 0 || rows.is_empty() {
        return Err(GdidError::EmptyData);
    }

    let numeric_groups: Option<Vec<T>> = rows
        .iter()
        .map(|r| r.group.parse::<T>().ok().filter(|v| v.is_finite()))
        .collect();
    let (codes, levels) = match numeric_groups {
        Some(codes) => (codes, None),
        None => {
            let levels: Vec<String> = rows
                .iter()
                .map(|r| r.group.clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let codes = rows
                .iter()
                .map(|r| {
                    let i = levels.binary_search(&r.group).expect("level collected above");
                    T::from_count(i)
                })
                .collect();
            (codes, Some(levels))
        }
    };

    let units = rows
        .into_iter()
        .zip(codes)
        .map(|(r, group)| PanelUnit {
            unit_id: r.id,
            group,
            a0: r.values[0],
            a1: r.values[1],
            y0: r.values[2],
            y1: r.values[3],
            covariates: r.covariates,
            pre_outcomes: r.pre,
        })
        .collect();
    let d = PanelDataset {
        units,
        covariate_names: mapping.covariates.clone(),
        pre_period_names: mapping.pre_periods.clone(),
        group_levels: levels,
    };
    d.check()?;
    Ok(d)
}

fn parse_number<T: Scalar>(s: &str, row: usize, column: &str) -> Result<T> {
    match s.parse::<T>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(GdidError::Parse {
            row,
            column: column.to_string(),
            message: format!("`{s}` is not a finite number"),
        }),
    }
}

fn csv_error(e: csv::Error) -> GdidError {
    let row = e
        .position()
        .map(|p| (p.line() as usize).saturating_sub(1))
        .unwrap_or(0);
    GdidError::Parse {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

/// Writes a dataset in the layout [`load_csv`] reads back.
///
/// Numbers use Rust's shortest round-trip `Display` form, so
/// `load_csv(write_csv(d)) == d` bit for bit. Categorical groups are written
/// as their labels. The mapping's unit id column is required.
pub fn write_csv<T: Scalar, W: Write>(
    d: &PanelDataset<T>,
    mapping: &ColumnMapping,
    sink: W,
) -> Result<()> {
    mapping.check_disjoint()?;
    let id_name = mapping
        .unit_id
        .as_deref()
        .ok_or_else(|| GdidError::Mapping("writing requires a unit id column".into()))?;
    if mapping.covariates.len() != d.covariate_names.len()
        || mapping.pre_periods.len() != d.pre_period_names.len()
    {
        return Err(GdidError::Mapping(
            "mapping arity does not match the dataset".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| GdidError::InvalidData(format!("write failed: {e}"));
    debug_assert_eq!(mapping.all_columns()[0], id_name);
    w.write_record(mapping.all_columns()).map_err(io)?;
    for u in &d.units {
        let mut rec: Vec<String> = vec![
            u.unit_id.clone(),
            d.group_label(u.group),
            u.a0.to_string(),
            u.a1.to_string(),
            u.y0.to_string(),
            u.y1.to_string(),
        ];
        rec.extend(u.covariates.iter().map(|v| v.to_string()));
        rec.extend(u.pre_outcomes.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| GdidError::InvalidData(format!("write failed: {e}")))?;
    Ok(())
}
