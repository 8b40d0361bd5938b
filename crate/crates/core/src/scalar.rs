//! Floating point scalar abstraction shared by every estimator.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, ToPrimitive};

/// Real scalar used for outcomes, covariates and all derived statistics.
///
/// Implemented for `f32` and `f64`. Numerical tolerances that depend on the
/// precision of the type live here so that fitting routines stay generic.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
    /// Default sup-norm tolerance on the logistic score equations.
    const SCORE_TOL: f64;
    /// Relative threshold on the diagonal of `R` below which a column is
    /// treated as linearly dependent.
    const RANK_TOL: f64;

    /// Converts an `f64` literal. Panics only if the value is not
    /// representable, which cannot happen for finite inputs.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite f64 literal is representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as NumCast>::from(n).expect("usize is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const SCORE_TOL: f64 = 1e-8;
    const RANK_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const SCORE_TOL: f64 = 1e-3;
    const RANK_TOL: f64 = 1e-5;
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean<T: Scalar>(xs: &[T]) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().copied().sum::<T>() / T::from_count(xs.len()))
}

/// Sample variance with an `n - 1` denominator; `None` below two values.
pub fn sample_variance<T: Scalar>(xs: &[T]) -> Option<T> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    Some(ss / T::from_count(xs.len() - 1))
}
