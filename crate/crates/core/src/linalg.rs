//! Minimal dense linear algebra: a row-major matrix, vector helpers, a
//! Gaussian solver, and a cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Nothing here is tuned for large problems; the networks and analyses in
//! this crate live at a few hundred dimensions at most.

use crate::error::{Error, Result};
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

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from row slices; every row must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(Error::dim(n_cols, r.len(), "ragged row in from_rows"));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(rows * cols, data.len(), "from_vec length"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::dim(self.cols, v.len(), "matvec input"));
        }
        Ok(self
            .rows_iter()
            .map(|row| dot(row, v))
            .collect())
    }

    /// `self^T * v` without materializing the transpose.
    pub fn transpose_matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(Error::dim(self.rows, v.len(), "transpose_matvec input"));
        }
        let mut out = vec![T::zero(); self.cols];
        for (row, &vi) in self.rows_iter().zip(v) {
            for (o, &r) in out.iter_mut().zip(row) {
                *o += r * vi;
            }
        }
        Ok(out)
    }

    /// Column-wise mean of the rows.
    pub fn mean_row(&self) -> Vec<T> {
        let mut mean = vec![T::zero(); self.cols];
        for row in self.rows_iter() {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        let n = T::cast(self.rows as f64);
        for m in &mut mean {
            *m /= n;
        }
        mean
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Scalar>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Normalizes `v` in place; returns the original norm.
pub fn normalize<T: Scalar>(v: &mut [T]) -> T {
    let n = norm(v);
    if n > T::zero() {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot collapses below `tiny` relative to the
/// matrix scale, signalling a (numerically) singular system.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.n_rows();
    assert_eq!(a.n_cols(), n, "solve needs a square matrix");
    assert_eq!(b.len(), n, "solve rhs length");
    let mut m = a.clone();
    let mut x: Vec<T> = b.to_vec();

    let scale = m
        .as_slice()
        .iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()))
        .max(T::one());
    let tiny = scale * T::cast(1e-12);

    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m[(r, col)].abs()))
            .fold((col, T::zero()), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        if pivot_abs < tiny {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            x.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let factor = m[(r, col)] / m[(col, col)];
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
            let xc = x[col];
            x[r] -= factor * xc;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in (col + 1)..n {
            acc -= m[(col, j)] * x[j];
        }
        x[col] = acc / m[(col, col)];
    }
    Some(x)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as matrix rows,
/// both sorted by descending eigenvalue. Convergence is declared when every
/// off-diagonal magnitude drops below 1e-12 (scaled by the matrix norm);
/// symmetric inputs of the sizes used here always get there.
pub fn jacobi_eigen<T: Scalar>(matrix: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    let n = matrix.n_rows();
    if matrix.n_cols() != n {
        return Err(Error::dim(n, matrix.n_cols(), "jacobi_eigen square input"));
    }
    let mut a = matrix.clone();
    // Eigenvector accumulator: rows of `v` end up as the eigenvectors.
    let mut v = Matrix::<T>::identity(n);

    let scale = a
        .as_slice()
        .iter()
        .fold(T::zero(), |acc, x| acc.max(x.abs()))
        .max(T::one());
    let tol = scale * T::cast(1e-12);
    let max_sweeps = 100;

    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < tol * T::cast(1e-3) {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (T::cast(2.0) * apq);
                // Smaller-magnitude rotation root keeps the process stable.
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                for j in 0..n {
                    let ajp = a[(j, p)];
                    let ajq = a[(j, q)];
                    a[(j, p)] = c * ajp - s * ajq;
                    a[(j, q)] = s * ajp + c * ajq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj - s * aqj;
                    a[(q, j)] = s * apj + c * aqj;
                }
                for j in 0..n {
                    let vpj = v[(p, j)];
                    let vqj = v[(q, j)];
                    v[(p, j)] = c * vpj - s * vqj;
                    v[(q, j)] = s * vpj + c * vqj;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let eigenvalues: Vec<T> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (out_row, &src_row) in order.iter().enumerate() {
        for j in 0..n {
            eigenvectors[(out_row, j)] = v[(src_row, j)];
        }
    }
    Ok((eigenvalues, eigenvectors))
}
