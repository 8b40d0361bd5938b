use serde::Serialize;

use super::linalg::{dot, Matrix, Qr};
use crate::error::{GdidError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit<T> {
    pub coefficients: Vec<T>,
    pub rank: usize,
    pub residual_sum_squares: T,
}

impl<T: Scalar> OlsFit<T> {
    /// Fitted value for one design row.
    pub fn predict_row(&self, row: &[T]) -> Result<T> {
        if row.len() != self.coefficients.len() {
            return Err(GdidError::ArityMismatch {
                expected: self.coefficients.len(),
                got: row.len(),
            });
        }
        Ok(dot(row, &self.coefficients))
    }
}

/// Least squares by Householder QR; never forms `X'X`.
pub fn fit_ols<T: Scalar>(x: &Matrix<T>, y: &[T]) -> Result<OlsFit<T>> {
    if x.rows() != y.len() {
        return Err(GdidError::ArityMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if x.rows() < x.cols() {
        return Err(GdidError::RankDeficient {
            rank: x.rows(),
            cols: x.cols(),
        });
    }
    let qr = Qr::new(x);
    let (coefficients, rss) = qr.solve(y)?;
    Ok(OlsFit {
        coefficients,
        rank: qr.rank(),
        residual_sum_squares: rss,
    })
}
