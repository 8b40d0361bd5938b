//! Regression engines used by the estimators: ordinary least squares via a
//! Householder QR factorization and logistic regression via iteratively
//! reweighted least squares.

mod linalg;
mod logistic;
mod ols;

pub use linalg::Matrix;
pub use logistic::{fit_logistic, fit_logistic_with, predict_prob, LogisticFit, LogisticOptions};
pub use ols::{fit_ols, OlsFit};
