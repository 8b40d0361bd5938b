use thiserror::Error;

use crate::panel::DesignKind;

pub type Result<T, E = GdidError> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Errors fall into two classes: input/validation problems and numerical
/// failures. [`GdidError::is_numerical`] tells them apart; the CLI maps the
/// classes onto distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GdidError {
    #[error("column mapping error: {0}")]
    Mapping(String),
    #[error("parse error at data row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("missing value at data row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("input contains no data rows")]
    EmptyData,
    #[error("duplicate unit id `{0}`")]
    DuplicateUnit(String),
    #[error("invalid dataset: {0}")]
    InvalidData(String),
    #[error("detected design {detected:?} does not match declared design {declared:?}")]
    DesignMismatch {
        detected: DesignKind,
        declared: DesignKind,
    },
    #[error("design is unclassified; no causal estimand is attached to it")]
    UnclassifiedDesign,
    #[error("degenerate group: {0}")]
    DegenerateGroup(String),
    #[error("group column must be coded 0/1 for this operation, found {0}")]
    NonBinaryGroup(String),
    #[error("empty triple-differences cell (G={group}, A1={treated})")]
    EmptyCell { group: u8, treated: u8 },
    #[error("method `{method}` is not available for design {design:?}")]
    UnsupportedDesign { method: String, design: DesignKind },
    #[error("invalid bounds: tau_l ({lower}) > tau_u ({upper})")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("contrast point {value} lies outside the observed support [{min}, {max}]")]
    Extrapolation { value: f64, min: f64, max: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),
    #[error("fewer than two usable pre-treatment time points ({0} available)")]
    InsufficientPrePeriods(usize),

    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("logistic regression did not converge in {iterations} iterations (score {score:e})")]
    NoConvergence { iterations: usize, score: f64 },
    #[error("perfect or quasi separation: |beta|_inf = {max_abs_coef} exceeds {cap}")]
    Separation { max_abs_coef: f64, cap: f64 },
    #[error("outcome vector contains a single class")]
    OneClass,
    #[error("arity mismatch: expected {expected} columns, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("propensity overlap violated: {0}")]
    OverlapViolation(String),
    #[error("{failed} of {total} bootstrap replicates failed (cap is 5%)")]
    TooManyFailedReplicates { failed: usize, total: usize },
    #[error("{failed} of {total} Monte Carlo replicates failed (cap is 5%)")]
    TooManyFailedSimulations { failed: usize, total: usize },
    #[error("non-finite value produced: {0}")]
    NonFinite(String),
}

impl GdidError {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        use GdidError::*;
        match self {
            Mapping(_) => "MappingError",
            Parse { .. } => "ParseError",
            MissingValue { .. } => "MissingValue",
            EmptyData => "EmptyDataError",
            DuplicateUnit(_) => "DuplicateUnit",
            InvalidData(_) => "InvalidData",
            DesignMismatch { .. } => "DesignMismatch",
            UnclassifiedDesign => "UnclassifiedDesign",
            DegenerateGroup(_) => "DegenerateGroup",
            NonBinaryGroup(_) => "NonBinaryGroup",
            EmptyCell { .. } => "EmptyCell",
            UnsupportedDesign { .. } => "UnsupportedDesign",
            InvalidBounds { .. } => "InvalidBounds",
            Extrapolation { .. } => "ExtrapolationWarning",
            InvalidArgument(_) => "InvalidArgument",
            InvalidSpec(_) => "InvalidSpec",
            InsufficientPrePeriods(_) => "InsufficientPrePeriods",
            RankDeficient { .. } => "RankDeficient",
            NoConvergence { .. } => "NoConvergence",
            Separation { .. } => "Separation",
            OneClass => "OneClass",
            ArityMismatch { .. } => "ArityMismatch",
            OverlapViolation(_) => "OverlapViolation",
            TooManyFailedReplicates { .. } => "TooManyFailedReplicates",
            TooManyFailedSimulations { .. } => "TooManyFailedSimulations",
            NonFinite(_) => "NonFinite",
        }
    }

    /// True for failures of the fitting or resampling machinery, as opposed
    /// to problems with the input or the requested analysis.
    pub fn is_numerical(&self) -> bool {
        use GdidError::*;
        matches!(
            self,
            RankDeficient { .. }
                | NoConvergence { .. }
                | Separation { .. }
                | OneClass
                | OverlapViolation(_)
                | TooManyFailedReplicates { .. }
                | TooManyFailedSimulations { .. }
                | NonFinite(_)
        )
    }
}
