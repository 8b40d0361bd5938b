use crate::error::{GdidError, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GdidError::ArityMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Stacks equal-length rows.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(GdidError::ArityMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Design matrix with a leading column of ones.
    pub fn with_intercept<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let with_one: Vec<Vec<T>> = rows
            .iter()
            .map(|r| std::iter::once(T::one()).chain(r.as_ref().iter().copied()).collect())
            .collect();
        if with_one.is_empty() {
            return Ok(Matrix::zeros(0, 1));
        }
        Matrix::from_rows(&with_one)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `X b`.
    pub fn mul_vec(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.cols {
            return Err(GdidError::ArityMismatch {
                expected: self.cols,
                got: b.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), b)).collect())
    }

    /// `X' v`.
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate().take(self.rows) {
            for (o, &x) in out.iter_mut().zip(self.row(i)) {
                *o += x * vi;
            }
        }
        out
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Householder QR factorization of a tall matrix.
pub(crate) struct Qr<T> {
    m: usize,
    n: usize,
    /// Upper-triangular factor, row-major `n x n`.
    r: Vec<T>,
    /// Reflector `k` acts on rows `k..m`: `H = I - beta v v'`.
    reflectors: Vec<(T, Vec<T>)>,
    rank: usize,
}

impl<T: Scalar> Qr<T> {
    pub(crate) fn new(x: &Matrix<T>) -> Self {
        let (m, n) = (x.rows(), x.cols());
        // column-major working copy
        let mut cols: Vec<Vec<T>> = (0..n).map(|j| x.column(j)).collect();
        let col_norms: Vec<T> = cols.iter().map(|c| norm(c)).collect();
        let mut reflectors = Vec::with_capacity(n.min(m));
        for k in 0..n.min(m) {
            let nk = norm(&cols[k][k..]);
            let mut v = cols[k][k..].to_vec();
            let beta = if nk == T::zero() {
                T::zero()
            } else {
                let alpha = if v[0] > T::zero() { -nk } else { nk };
                v[0] -= alpha;
                let vtv: T = v.iter().map(|&e| e * e).sum();
                if vtv == T::zero() {
                    T::zero()
                } else {
                    T::lit(2.0) / vtv
                }
            };
            if beta != T::zero() {
                for c in cols.iter_mut().skip(k) {
                    let s = dot(&v, &c[k..]) * beta;
                    for (ci, &vi) in c[k..].iter_mut().zip(&v) {
                        *ci -= s * vi;
                    }
                }
            }
            reflectors.push((beta, v));
        }
        let mut r = vec![T::zero(); n * n];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..=j.min(m.saturating_sub(1)) {
                if i < n {
                    r[i * n + j] = c[i];
                }
            }
        }
        let tol = T::lit(T::RANK_TOL);
        let max_diag = (0..n.min(m))
            .map(|k| r[k * n + k].abs())
            .fold(T::zero(), T::max);
        let rank = (0..n.min(m))
            .filter(|&k| {
                let d = r[k * n + k].abs();
                col_norms[k] > T::zero() && d > tol * col_norms[k] && d > tol * max_diag
            })
            .count();
        Qr {
            m,
            n,
            r,
            reflectors,
            rank,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }

    /// Applies `Q'` to a vector of length `m`.
    pub(crate) fn qt_mul(&self, y: &[T]) -> Vec<T> {
        let mut out = y.to_vec();
        for (k, (beta, v)) in self.reflectors.iter().enumerate() {
            if *beta == T::zero() {
                continue;
            }
            let s = dot(v, &out[k..]) * *beta;
            for (o, &vi) in out[k..].iter_mut().zip(v) {
                *o -= s * vi;
            }
        }
        out
    }

    /// Least-squares solution of `X b = y` and the residual sum of squares.
    /// Requires full column rank.
    pub(crate) fn solve(&self, y: &[T]) -> Result<(Vec<T>, T)> {
        if self.rank < self.n || self.m < self.n {
            return Err(GdidError::RankDeficient {
                rank: self.rank,
                cols: self.n,
            });
        }
        let qty = self.qt_mul(y);
        let n = self.n;
        let mut b = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = qty[i];
            for j in (i + 1)..n {
                s -= self.r[i * n + j] * b[j];
            }
            b[i] = s / self.r[i * n + i];
        }
        let rss = qty[n..].iter().map(|&e| e * e).sum();
        Ok((b, rss))
    }
}

fn norm<T: Scalar>(v: &[T]) -> T {
    // scaled to avoid overflow on large entries
    let scale = v.iter().fold(T::zero(), |acc, &e| acc.max(e.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    scale * v.iter().map(|&e| (e / scale) * (e / scale)).sum::<T>().sqrt()
}
