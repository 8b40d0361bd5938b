//! Group difference-in-differences (GDiD) estimation.
//!
//! The GDiD contrast `E[Y1 - Y0 | G=1] - E[Y1 - Y0 | G=0]` compares the
//! outcome change of two baseline groups. What it estimates depends on how
//! treatment relates to the group: in the canonical design it is the ATT of
//! the second period, in the pre-post design it is effect modification by
//! group, and in the no-pre-period design it is the change in the ATT over
//! time. This crate loads two-period panels, classifies the design,
//! computes the contrast (plain, IPW-adjusted, continuous-group and triple
//! differences), bootstraps intervals, compares pre-baseline trends and
//! simulates worlds with known truth.
//!
//! Everything is generic over the scalar type; the aliases below fix it to
//! `f64` or `f32`.

pub mod dgp;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod numerics;
pub mod panel;
pub mod scalar;

pub use error::{GdidError, Result};
pub use estimators::{EstimandKind, Estimator, EstimatorSpec, Interval, Method};
pub use panel::DesignKind;
pub use scalar::Scalar;

pub type Dataset = panel::PanelDataset<f64>;
pub type Unit = panel::PanelUnit<f64>;
pub type Estimate = estimators::Estimate<f64>;
pub type Inference = inference::InferenceResult<f64>;
pub type PreTrends = diagnostics::PreTrendResult<f64>;
pub type Spec = dgp::DgpSpec<f64>;

pub type Dataset32 = panel::PanelDataset<f32>;
pub type Unit32 = panel::PanelUnit<f32>;
pub type Estimate32 = estimators::Estimate<f32>;
pub type Spec32 = dgp::DgpSpec<f32>;
