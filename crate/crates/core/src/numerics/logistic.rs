use serde::Serialize;

use super::linalg::{Matrix, Qr};
use crate::error::{GdidError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticFit<T> {
    /// Intercept first when the design carries one.
    pub coefficients: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm of `X'(y - p)` at the returned coefficients.
    pub max_abs_score: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    /// Stop once the score sup-norm falls to this value.
    pub score_tol: f64,
    pub max_iter: usize,
    /// `|beta|_inf` above this is reported as separation.
    pub separation_cap: f64,
}

impl LogisticOptions {
    pub fn for_scalar<T: Scalar>() -> Self {
        LogisticOptions {
            score_tol: T::SCORE_TOL,
            max_iter: 100,
            separation_cap: 50.0,
        }
    }
}

/// Logistic regression with the default options for `T`.
pub fn fit_logistic<T: Scalar>(x: &Matrix<T>, y: &[T]) -> Result<LogisticFit<T>> {
    fit_logistic_with(x, y, LogisticOptions::for_scalar::<T>())
}

/// Newton/IRLS for the logistic log-likelihood.
///
/// Each step solves the weighted least-squares problem
/// `min |W^1/2 (X d - W^-1 (y - p))|` by QR, then halves the step until the
/// log-likelihood does not decrease.
pub fn fit_logistic_with<T: Scalar>(
    x: &Matrix<T>,
    y: &[T],
    opts: LogisticOptions,
) -> Result<LogisticFit<T>> {
    let (n, k) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(GdidError::ArityMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if y.iter().any(|&v| v != T::zero() && v != T::one()) {
        return Err(GdidError::InvalidArgument(
            "logistic response must be coded 0/1".into(),
        ));
    }
    let ones = y.iter().filter(|&&v| v == T::one()).count();
    if ones == 0 || ones == n {
        return Err(GdidError::OneClass);
    }
    let qr = Qr::new(x);
    if n < k || qr.rank() < k {
        return Err(GdidError::RankDeficient {
            rank: qr.rank(),
            cols: k,
        });
    }

    let tol = T::lit(opts.score_tol);
    let cap = T::lit(opts.separation_cap);
    let w_floor = T::epsilon() * T::epsilon();
    let mut beta = vec![T::zero(); k];
    let mut eta = vec![T::zero(); n];
    let mut ll = log_likelihood(&eta, y);

    for iter in 0..=opts.max_iter {
        let p: Vec<T> = eta.iter().map(|&e| sigmoid(e)).collect();
        let resid: Vec<T> = y.iter().zip(&p).map(|(&yi, &pi)| yi - pi).collect();
        let score = x.tr_mul_vec(&resid);
        let sup = score.iter().fold(T::zero(), |a, &s| a.max(s.abs()));
        if !sup.is_finite() {
            return Err(GdidError::NonFinite("logistic score".into()));
        }
        if sup <= tol {
            // One extra full Newton step takes a converged fit to rounding
            // level; kept only if it shrinks the score.
            let polished = newton_step(x, &p, &resid, w_floor)
                .ok()
                .map(|step| beta.iter().zip(&step).map(|(&b, &s)| b + s).collect::<Vec<T>>())
                .and_then(|cand| {
                    let cand_eta = x.mul_vec(&cand).ok()?;
                    let s = score_sup(x, y, &cand_eta);
                    (s < sup).then_some((cand, s))
                });
            let (coefficients, max_abs_score) = polished.unwrap_or((beta, sup));
            return Ok(LogisticFit {
                coefficients,
                converged: true,
                iterations: iter,
                max_abs_score,
            });
        }
        if iter == opts.max_iter {
            return Err(GdidError::NoConvergence {
                iterations: iter,
                score: sup.to_f64_lossy(),
            });
        }

        let step = newton_step(x, &p, &resid, w_floor)?;

        // Near the optimum the likelihood gain drops below the rounding
        // error of the sum; changes inside that slack count as no decrease.
        let slack = T::lit(64.0) * T::epsilon() * (ll.abs() + T::one());
        let mut scale = T::one();
        let mut accepted = None;
        for _ in 0..40 {
            let cand: Vec<T> = beta
                .iter()
                .zip(&step)
                .map(|(&b, &s)| b + scale * s)
                .collect();
            let cand_eta = x.mul_vec(&cand)?;
            let cand_ll = log_likelihood(&cand_eta, y);
            if cand_ll.is_finite() && cand_ll >= ll - slack {
                accepted = Some((cand, cand_eta, cand_ll));
                break;
            }
            scale = scale * T::lit(0.5);
        }
        let Some((b, e, l)) = accepted else {
            return Err(GdidError::NoConvergence {
                iterations: iter + 1,
                score: sup.to_f64_lossy(),
            });
        };
        beta = b;
        eta = e;
        ll = l;
        let max_abs = beta.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
        if max_abs > cap {
            return Err(GdidError::Separation {
                max_abs_coef: max_abs.to_f64_lossy(),
                cap: opts.separation_cap,
            });
        }
    }
    unreachable!("loop returns on its final iteration")
}

fn newton_step<T: Scalar>(x: &Matrix<T>, p: &[T], resid: &[T], w_floor: T) -> Result<Vec<T>> {
    let (n, k) = (x.rows(), x.cols());
    let mut wx = Matrix::zeros(n, k);
    let mut z = vec![T::zero(); n];
    for i in 0..n {
        let w = (p[i] * (T::one() - p[i])).max(w_floor);
        let sw = w.sqrt();
        for j in 0..k {
            wx.set(i, j, x.get(i, j) * sw);
        }
        z[i] = resid[i] / sw;
    }
    Ok(Qr::new(&wx).solve(&z)?.0)
}

fn score_sup<T: Scalar>(x: &Matrix<T>, y: &[T], eta: &[T]) -> T {
    let resid: Vec<T> = y.iter().zip(eta).map(|(&yi, &e)| yi - sigmoid(e)).collect();
    x.tr_mul_vec(&resid)
        .iter()
        .fold(T::zero(), |a, &s| a.max(s.abs()))
}

/// Fitted `P(y = 1 | x)` for each row, strictly inside `(0, 1)`.
pub fn predict_prob<T: Scalar>(fit: &LogisticFit<T>, x: &Matrix<T>) -> Result<Vec<T>> {
    if !fit.converged {
        return Err(GdidError::NoConvergence {
            iterations: fit.iterations,
            score: fit.max_abs_score.to_f64_lossy(),
        });
    }
    if x.cols() != fit.coefficients.len() {
        return Err(GdidError::ArityMismatch {
            expected: fit.coefficients.len(),
            got: x.cols(),
        });
    }
    let lo = T::min_positive_value();
    let hi = T::one() - T::epsilon();
    Ok(x.mul_vec(&fit.coefficients)?
        .into_iter()
        .map(|e| sigmoid(e).max(lo).min(hi))
        .collect())
}

#[inline]
fn sigmoid<T: Scalar>(eta: T) -> T {
    if eta >= T::zero() {
        T::one() / (T::one() + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (T::one() + e)
    }
}

/// `log(1 + e^x)` without overflow.
#[inline]
fn softplus<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

fn log_likelihood<T: Scalar>(eta: &[T], y: &[T]) -> T {
    eta.iter()
        .zip(y)
        .map(|(&e, &yi)| yi * e - softplus(e))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn no_covariates(n: usize) -> Matrix<f64> {
        Matrix::with_intercept(&vec![[0.0_f64; 0]; n]).unwrap()
    }

    #[test]
    fn intercept_only_is_logit_of_mean() {
        let y: Vec<f64> = (0..40).map(|i| if i % 4 == 0 { 1.0 } else { 0.0 }).collect();
        let x = no_covariates(40);
        let f = fit_logistic(&x, &y).unwrap();
        assert!(f.converged);
        assert!((f.coefficients[0] - (0.25_f64 / 0.75).ln()).abs() < 1e-12);
        let p = predict_prob(&f, &x).unwrap();
        assert!(p.iter().all(|&v| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn separated_data_reported() {
        let rows: Vec<[f64; 1]> = (0..20).map(|i| [i as f64]).collect();
        let y: Vec<f64> = (0..20).map(|i| if i >= 10 { 1.0 } else { 0.0 }).collect();
        let x = Matrix::with_intercept(&rows).unwrap();
        assert!(matches!(
            fit_logistic(&x, &y),
            Err(GdidError::Separation { .. })
        ));
    }

    #[test]
    fn one_class_and_rank_errors() {
        let x = no_covariates(5);
        assert_eq!(fit_logistic(&x, &[1.0; 5]), Err(GdidError::OneClass));
        let rows = [[1.0_f64, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0]];
        let x = Matrix::with_intercept(&rows).unwrap();
        assert!(matches!(
            fit_logistic(&x, &[0.0, 1.0, 0.0, 1.0]),
            Err(GdidError::RankDeficient { .. })
        ));
    }

    #[test]
    fn zero_coefficients_predict_one_half_and_extremes_stay_open() {
        let fit = LogisticFit {
            coefficients: vec![0.0_f64, 0.0],
            converged: true,
            iterations: 0,
            max_abs_score: 0.0,
        };
        let x = Matrix::from_rows(&[[1.0_f64, 3.0], [1.0, -2.0]]).unwrap();
        assert_eq!(predict_prob(&fit, &x).unwrap(), vec![0.5, 0.5]);

        let fit = LogisticFit {
            coefficients: vec![0.0_f64, 1.0],
            ..fit
        };
        let x = Matrix::from_rows(&[[1.0_f64, 1e6], [1.0, -1e6]]).unwrap();
        let p = predict_prob(&fit, &x).unwrap();
        assert!(p[0] < 1.0 && p[0] > 0.5 && p[0].is_finite());
        assert!(p[1] > 0.0 && p[1].is_finite());
        assert!(matches!(
            predict_prob(&fit, &Matrix::from_rows(&[[1.0_f64]]).unwrap()),
            Err(GdidError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn simulated_coefficients_within_three_standard_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 50_000;
        let (b0, b1) = (-0.5_f64, 1.0_f64);
        let rows: Vec<[f64; 1]> = (0..n).map(|_| [StandardNormal.sample(&mut rng)]).collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| {
                let p = 1.0 / (1.0 + (-(b0 + b1 * r[0])).exp());
                if rng.gen::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let x = Matrix::with_intercept(&rows).unwrap();
        let f = fit_logistic(&x, &y).unwrap();
        assert!(f.max_abs_score <= 1e-8);

        // Standard errors from the inverse Fisher information at the fit.
        let p = predict_prob(&f, &x).unwrap();
        let (mut i00, mut i01, mut i11) = (0.0, 0.0, 0.0);
        for (r, &pi) in rows.iter().zip(&p) {
            let w = pi * (1.0 - pi);
            i00 += w;
            i01 += w * r[0];
            i11 += w * r[0] * r[0];
        }
        let det = i00 * i11 - i01 * i01;
        let se0 = (i11 / det).sqrt();
        let se1 = (i00 / det).sqrt();
        assert!((f.coefficients[0] - b0).abs() < 3.0 * se0);
        assert!((f.coefficients[1] - b1).abs() < 3.0 * se1);
    }

    #[test]
    fn single_precision_fit() {
        let rows: Vec<[f32; 1]> = (0..200).map(|i| [(i % 10) as f32 / 10.0]).collect();
        let y: Vec<f32> = (0..200).map(|i| ((i * 7) % 3 == 0) as u8 as f32).collect();
        let x = Matrix::with_intercept(&rows).unwrap();
        let f = fit_logistic(&x, &y).unwrap();
        assert!(f.converged);
    }
}
