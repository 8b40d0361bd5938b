//! JSON documents written to standard output.

use gdid_core::diagnostics::PreTrendResult;
use gdid_core::dgp::{DgpSpec, MonteCarloSummary, TruthReport};
use gdid_core::estimators::GroupCount;
use gdid_core::inference::InferenceResult;
use gdid_core::{DesignKind, EstimandKind, GdidError, Interval};
use serde::Serialize;

pub const REPORT_SCHEMA: &str = "gdid-report/1";
pub const PRETRENDS_SCHEMA: &str = "gdid-pretrends/1";
pub const SIMULATION_SCHEMA: &str = "gdid-simulation/1";
pub const ERROR_SCHEMA: &str = "gdid-error/1";

/// JSON Schema of [`Report`], shipped with the binary.
pub const REPORT_JSON_SCHEMA: &str = include_str!("../schema/gdid-report-1.json");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance<C: Serialize> {
    /// SHA-256 of the raw input bytes.
    pub input_sha256: String,
    pub tool_version: &'static str,
    pub seed: u64,
    pub config: C,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub estimand: EstimandKind,
    pub tau_l: f64,
    pub tau_u: f64,
    /// `[value + tau_l, value + tau_u]`.
    pub interval: Interval<f64>,
    /// Percentile interval endpoints shifted by the same bounds.
    pub interval_with_ci: Interval<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Contrast {
    pub g: f64,
    pub g_prime: f64,
}

/// One estimate with its inference and sentence.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    /// Levels compared, `focal` coded `G = 1`.
    pub focal: String,
    pub reference: String,
    pub estimand: EstimandKind,
    pub estimand_formula: &'static str,
    pub value: f64,
    pub n_by_group: Vec<GroupCount>,
    pub trimmed: usize,
    pub contrast: Option<Contrast>,
    pub analytic_se: Option<f64>,
    pub inference: InferenceResult<f64>,
    pub bounds: Option<BoundsReport>,
    pub interpretation: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<C: Serialize> {
    pub schema: &'static str,
    pub design: DesignKind,
    /// `"detected"` when the design came from `--design auto`.
    pub design_source: &'static str,
    pub method: &'static str,
    #[serde(flatten)]
    pub primary: EstimateReport,
    /// Further levels against the same reference, for multi-level groups.
    pub pairwise: Vec<EstimateReport>,
    pub diagnostics: Option<PreTrendResult<f64>>,
    pub provenance: Provenance<C>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreTrendsReport<C: Serialize> {
    pub schema: &'static str,
    pub design: DesignKind,
    #[serde(flatten)]
    pub result: PreTrendResult<f64>,
    pub provenance: Provenance<C>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport<C: Serialize> {
    pub schema: &'static str,
    pub spec: DgpSpec<f64>,
    pub truth: TruthReport<f64>,
    pub summary: MonteCarloSummary<f64>,
    pub provenance: Provenance<C>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub schema: &'static str,
    pub error: ErrorBody,
}

impl ErrorReport {
    pub fn new(e: &GdidError) -> Self {
        ErrorReport {
            schema: ERROR_SCHEMA,
            error: ErrorBody {
                code: e.code(),
                message: e.to_string(),
            },
        }
    }
}
