//! Dense column-major matrices with tensor operators (vec, vech, Kronecker
//! product) and symmetric positive definite factorizations.
//!
//! Design:
//! - Storage is column-major: entry (i, j) of a `rows x cols` matrix lives at
//!   `data[i + rows * j]`, so [`Mat::vec`] (column stacking) is the identity
//!   on storage. Every vectorization convention downstream assumes this
//!   order.
//! - `Mat<T>` is generic over the scalar via `num-traits`. Integer matrices
//!   exercise the exact-arithmetic identities in tests; `f64` does the real
//!   work and is the default type parameter re-exported at the crate root.
//! - Shape misuse panics at the call site; data-dependent failures
//!   (asymmetry, lost positive definiteness) return errors.
//! - Positive definiteness is decided by Cholesky pivots against a relative
//!   tolerance: every pivot must exceed [`SPD_PIVOT_REL_TOL`] times the
//!   largest diagonal entry of the (symmetrized) input.
//! - [`SpdMat::sqrt`] is the symmetric spectral square root from a Jacobi
//!   eigendecomposition, not a Cholesky triangle.

use std::fmt;

use num_traits::{Float, Num, NumAssign, NumCast};

use crate::error::{Error, Result};

/// Relative Cholesky pivot tolerance for positive definiteness checks.
pub const SPD_PIVOT_REL_TOL: f64 = 1e-10;

/// Relative symmetry tolerance used by [`Mat::vech`].
pub const VECH_SYM_REL_TOL: f64 = 1e-8;

/// Scalars a [`Mat`] can hold. Blanket-implemented; `f32`, `f64` and the
/// signed integers all qualify.
pub trait Scalar:
    Num + NumAssign + Copy + PartialOrd + fmt::Debug + fmt::Display + 'static
{
}

impl<T> Scalar for T where
    T: Num + NumAssign + Copy + PartialOrd + fmt::Debug + fmt::Display + 'static
{
}

/// Dense matrix, column-major storage.
#[derive(Clone, PartialEq)]
pub struct Mat<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Serializes row by row (a JSON matrix reads as a list of rows).
impl<T: Scalar + serde::Serialize> serde::Serialize for Mat<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<T> = (0..self.cols).map(|j| self.get(i, j)).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<T: Scalar> Mat<T> {
    /// Builds a matrix from column-major data. Panics if the shape is empty
    /// or `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix shape must be at least 1x1");
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        Mat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::new(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        assert!(!rows.is_empty(), "need at least one row");
        let cols = rows[0].len();
        assert!(cols >= 1, "need at least one column");
        let mut m = Mat::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {i}");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column-major backing slice; `data()[i + rows * j]` is entry (i, j).
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        debug_assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i + self.rows * j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i + self.rows * j] = v;
    }

    /// Column j as a contiguous slice.
    pub fn col(&self, j: usize) -> &[T] {
        assert!(j < self.cols);
        &self.data[self.rows * j..self.rows * (j + 1)]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        assert!(j < self.cols);
        &mut self.data[self.rows * j..self.rows * (j + 1)]
    }

    /// Row i copied out (strided access).
    pub fn row_vec(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn set_row(&mut self, i: usize, row: &[T]) {
        assert_eq!(row.len(), self.cols);
        for (j, v) in row.iter().enumerate() {
            self.set(i, j, *v);
        }
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| *a + *b)
            .collect();
        Mat::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| *a - *b)
            .collect();
        Mat::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, k: T) -> Mat<T> {
        Mat::new(self.rows, self.cols, self.data.iter().map(|a| *a * k).collect())
    }

    /// self * other.
    pub fn matmul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            for k in 0..self.cols {
                let b = other.get(k, j);
                if b == T::zero() {
                    continue;
                }
                let a_col = self.col(k);
                let o_col = out.col_mut(j);
                for i in 0..a_col.len() {
                    o_col[i] += a_col[i] * b;
                }
            }
        }
        out
    }

    /// self' * other, accumulated through column dot products.
    pub fn transpose_mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.rows, other.rows, "row counts must agree");
        Mat::from_fn(self.cols, other.cols, |i, j| {
            dot(self.col(i), other.col(j))
        })
    }

    /// self * other'.
    pub fn mul_by_transpose(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.cols, "column counts must agree");
        let mut out = Mat::zeros(self.rows, other.rows);
        for j in 0..other.rows {
            for k in 0..self.cols {
                let b = other.get(j, k);
                if b == T::zero() {
                    continue;
                }
                let a_col = self.col(k);
                let o_col = out.col_mut(j);
                for i in 0..a_col.len() {
                    o_col[i] += a_col[i] * b;
                }
            }
        }
        out
    }

    /// self' * self; exactly symmetric by construction.
    pub fn gram(&self) -> Mat<T> {
        let mut out = Mat::zeros(self.cols, self.cols);
        for j in 0..self.cols {
            for i in 0..=j {
                let v = dot(self.col(i), self.col(j));
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![T::zero(); self.rows];
        for (j, vj) in v.iter().enumerate() {
            if *vj == T::zero() {
                continue;
            }
            for (i, a) in self.col(j).iter().enumerate() {
                out[i] += *a * *vj;
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut t = T::zero();
        for i in 0..self.rows {
            t += self.get(i, i);
        }
        t
    }

    /// Column-stacking operator: `vec(A)[i + rows * j] = A(i, j)`.
    pub fn vec(&self) -> Vec<T> {
        self.data.clone()
    }

    /// Kronecker product: block (i, j) of the result is `self(i, j) * other`.
    pub fn kron(&self, other: &Mat<T>) -> Mat<T> {
        let (m, n) = (self.rows, self.cols);
        let (p, q) = (other.rows, other.cols);
        let mut out = Mat::zeros(m * p, n * q);
        for j in 0..n {
            for i in 0..m {
                let a = self.get(i, j);
                for jj in 0..q {
                    for ii in 0..p {
                        out.set(i * p + ii, j * q + jj, a * other.get(ii, jj));
                    }
                }
            }
        }
        out
    }

    /// Rebuilds the symmetric matrix whose [`Mat::vech`] is `v`.
    pub fn from_vech(dim: usize, v: &[T]) -> Mat<T> {
        assert_eq!(v.len(), dim * (dim + 1) / 2, "vech length must be dim*(dim+1)/2");
        let mut m = Mat::zeros(dim, dim);
        let mut k = 0;
        for j in 0..dim {
            for i in j..dim {
                m.set(i, j, v[k]);
                m.set(j, i, v[k]);
                k += 1;
            }
        }
        m
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

impl<T: Scalar + Float + NumCast> Mat<T> {
    pub fn frobenius_norm(&self) -> T {
        let mut acc = T::zero();
        for v in &self.data {
            acc += *v * *v;
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
    }

    pub fn max_abs_diff(&self, other: &Mat<T>) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| {
                let d = (*a - *b).abs();
                if d > m {
                    d
                } else {
                    m
                }
            })
    }

    /// Largest |A(i,j) - A(j,i)| over the square matrix.
    pub fn max_asymmetry(&self) -> T {
        assert!(self.is_square());
        let mut m = T::zero();
        for j in 0..self.cols {
            for i in 0..j {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > m {
                    m = d;
                }
            }
        }
        m
    }

    /// (A + A') / 2.
    pub fn symmetrized(&self) -> Mat<T> {
        assert!(self.is_square());
        let half = T::from(0.5).unwrap();
        Mat::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i)) * half
        })
    }

    /// Half-vectorization: stacks the lower triangle (diagonal included)
    /// column by column. Length is `m (m + 1) / 2`.
    ///
    /// # Errors
    /// [`Error::AsymmetricInput`] if any |A(i,j) - A(j,i)| exceeds
    /// [`VECH_SYM_REL_TOL`] times the largest |entry|.
    pub fn vech(&self) -> Result<Vec<T>> {
        assert!(self.is_square(), "vech requires a square matrix");
        let tol = T::from(VECH_SYM_REL_TOL).unwrap() * self.max_abs();
        let asym = self.max_asymmetry();
        if asym > tol {
            return Err(Error::AsymmetricInput {
                max_abs_diff: asym.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut out = Vec::with_capacity(self.rows * (self.rows + 1) / 2);
        for j in 0..self.cols {
            for i in j..self.rows {
                out.push(self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Lower Cholesky factor, with every pivot checked against
    /// `rel_tol * max(diagonal)`.
    ///
    /// # Errors
    /// [`Error::NearSingular`] as soon as a pivot falls to or below the
    /// tolerance.
    pub fn cholesky_lower(&self, rel_tol: f64) -> Result<Mat<T>> {
        assert!(self.is_square(), "cholesky requires a square matrix");
        let n = self.rows;
        let mut max_diag = T::zero();
        for i in 0..n {
            if self.get(i, i) > max_diag {
                max_diag = self.get(i, i);
            }
        }
        let tol = T::from(rel_tol).unwrap() * max_diag;
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut pivot = self.get(j, j);
            for k in 0..j {
                pivot -= l.get(j, k) * l.get(j, k);
            }
            // !(pivot > tol) rather than pivot <= tol: must also trip on NaN.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(pivot > tol) || !pivot.is_finite() {
                return Err(Error::NearSingular {
                    pivot: pivot.to_f64().unwrap_or(f64::NAN),
                    tol: tol.to_f64().unwrap_or(f64::NAN),
                });
            }
            let ljj = pivot.sqrt();
            l.set(j, j, ljj);
            for i in (j + 1)..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, v / ljj);
            }
        }
        Ok(l)
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Returns eigenvalues in descending order and the matching eigenvector
    /// columns. The caller is responsible for symmetry.
    pub fn jacobi_eigen(&self) -> (Vec<T>, Mat<T>) {
        assert!(self.is_square(), "eigendecomposition requires a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Mat::identity(n);
        let eps = T::epsilon();
        let scale = {
            let f = a.frobenius_norm();
            if f > T::zero() {
                f
            } else {
                T::one()
            }
        };
        for _sweep in 0..64 {
            let mut off = T::zero();
            for q in 0..n {
                for p in 0..q {
                    off += a.get(p, q) * a.get(p, q);
                }
            }
            if off.sqrt() <= eps * scale * T::from(n).unwrap() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= eps * scale {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (T::from(2).unwrap() * apq);
                    let t = {
                        let denom = theta.abs() + (theta * theta + T::one()).sqrt();
                        if theta >= T::zero() {
                            T::one() / denom
                        } else {
                            -T::one() / denom
                        }
                    };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    let tau = s / (T::one() + c);

                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    a.set(p, p, app - t * apq);
                    a.set(q, q, aqq + t * apq);
                    a.set(p, q, T::zero());
                    a.set(q, p, T::zero());
                    for k in 0..n {
                        if k == p || k == q {
                            continue;
                        }
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, akp - s * (akq + tau * akp));
                        a.set(p, k, a.get(k, p));
                        a.set(k, q, akq + s * (akp - tau * akq));
                        a.set(q, k, a.get(k, q));
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, vkp - s * (vkq + tau * vkp));
                        v.set(k, q, vkq + s * (vkp - tau * vkq));
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a.get(j, j)
                .partial_cmp(&a.get(i, i))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&i| a.get(i, i)).collect();
        let vectors = Mat::from_fn(n, n, |i, j| v.get(i, order[j]));
        (values, vectors)
    }

    /// Symmetric square root of a positive semidefinite matrix; eigenvalues
    /// in `[-rel_tol * scale, 0)` are clamped to zero.
    ///
    /// # Errors
    /// [`Error::NotPositiveSemidefinite`] when an eigenvalue is negative
    /// beyond the tolerance.
    pub fn psd_sqrt(&self, rel_tol: f64) -> Result<Mat<T>> {
        assert!(self.is_square());
        let sym = self.symmetrized();
        let (values, vectors) = sym.jacobi_eigen();
        let scale = values.iter().fold(T::zero(), |m, v| {
            if v.abs() > m {
                v.abs()
            } else {
                m
            }
        });
        let tol = T::from(rel_tol).unwrap() * if scale > T::zero() { scale } else { T::one() };
        let mut roots = Vec::with_capacity(values.len());
        for &lambda in &values {
            if lambda < -tol {
                return Err(Error::NotPositiveSemidefinite {
                    min_eigenvalue: lambda.to_f64().unwrap_or(f64::NAN),
                });
            }
            roots.push(if lambda > T::zero() { lambda.sqrt() } else { T::zero() });
        }
        let n = self.rows;
        let scaled = Mat::from_fn(n, n, |i, j| vectors.get(i, j) * roots[j]);
        Ok(scaled.mul_by_transpose(&vectors).symmetrized())
    }
}

/// Symmetric positive definite matrix with its Cholesky factor cached.
///
/// Construction symmetrizes the input, then requires every Cholesky pivot to
/// exceed [`SPD_PIVOT_REL_TOL`] times the largest diagonal entry.
#[derive(Clone)]
pub struct SpdMat<T = f64> {
    mat: Mat<T>,
    chol: Mat<T>,
}

impl<T: Scalar> fmt::Debug for SpdMat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spd{:?}", self.mat)
    }
}

impl<T: Scalar + Float + NumCast> SpdMat<T> {
    /// # Errors
    /// [`Error::NearSingular`] if the symmetrized input fails the pivot
    /// tolerance.
    pub fn new(mat: Mat<T>) -> Result<Self> {
        assert!(mat.is_square(), "SpdMat requires a square matrix");
        let sym = mat.symmetrized();
        let chol = sym.cholesky_lower(SPD_PIVOT_REL_TOL)?;
        Ok(SpdMat { mat: sym, chol })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn chol_lower(&self) -> &Mat<T> {
        &self.chol
    }

    /// Solves A x = b through the cached factor.
    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let l = &self.chol;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= l.get(i, k) * y[k];
            }
            y[i] = v / l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in (i + 1)..n {
                v -= l.get(k, i) * y[k];
            }
            y[i] = v / l.get(i, i);
        }
        y
    }

    /// Solves A X = B column by column.
    pub fn solve_mat(&self, b: &Mat<T>) -> Mat<T> {
        assert_eq!(b.rows(), self.dim());
        let mut out = Mat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let col = self.solve_vec(b.col(j));
            out.col_mut(j).copy_from_slice(&col);
        }
        out
    }

    /// Inverse, itself validated as positive definite.
    pub fn inverse(&self) -> Result<SpdMat<T>> {
        let inv = self.solve_mat(&Mat::identity(self.dim()));
        SpdMat::new(inv.symmetrized())
    }

    /// Symmetric square root V diag(sqrt(lambda)) V' from the Jacobi
    /// eigendecomposition, revalidated as positive definite.
    pub fn sqrt(&self) -> Result<SpdMat<T>> {
        let root = self.mat.psd_sqrt(SPD_PIVOT_REL_TOL)?;
        SpdMat::new(root)
    }
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse<T: Scalar + Float + NumCast>(s: &SpdMat<T>) -> Result<SpdMat<T>> {
    s.inverse()
}

/// Symmetric square root of a symmetric positive definite matrix.
pub fn spd_sqrt<T: Scalar + Float + NumCast>(s: &SpdMat<T>) -> Result<SpdMat<T>> {
    s.sqrt()
}
