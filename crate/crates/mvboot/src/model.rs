//! Multivariate linear regression by ordinary least squares.
//!
//! The model is Y_i = B X_i + e_i with X_i in R^p, Y_i in R^r, fitted as
//! B_hat = Y'X (X'X)^(-1) through the positive definite factorization of
//! X'X. The residual covariance uses the biased divisor n and subtracts the
//! residual mean outer product even when a design with an intercept makes
//! that mean zero:
//!
//! ```text
//! Sigma_hat = n^(-1) sum_i e_i e_i' - mu_hat mu_hat'
//! ```

use crate::error::{Error, Result};
use crate::tensorlinalg::{Mat, SpdMat};

/// Fixed-shape regression data: X is n x p, Y is n x r, with n > p.
#[derive(Clone, Debug)]
pub struct Dataset {
    x: Mat,
    y: Mat,
    predictor_names: Vec<String>,
    response_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset with default column names `x1..xp`, `y1..yr`.
    ///
    /// # Errors
    /// [`Error::InvalidData`] when row counts disagree, n <= p, or any entry
    /// is not finite.
    pub fn new(x: Mat, y: Mat) -> Result<Self> {
        let predictor_names = (1..=x.cols()).map(|j| format!("x{j}")).collect();
        let response_names = (1..=y.cols()).map(|j| format!("y{j}")).collect();
        Dataset::with_names(x, y, predictor_names, response_names)
    }

    pub fn with_names(
        x: Mat,
        y: Mat,
        predictor_names: Vec<String>,
        response_names: Vec<String>,
    ) -> Result<Self> {
        if x.rows() != y.rows() {
            return Err(Error::InvalidData(format!(
                "X has {} rows but Y has {}",
                x.rows(),
                y.rows()
            )));
        }
        if x.rows() <= x.cols() {
            return Err(Error::InvalidData(format!(
                "need more observations than predictors: n = {}, p = {}",
                x.rows(),
                x.cols()
            )));
        }
        if predictor_names.len() != x.cols() || response_names.len() != y.cols() {
            return Err(Error::InvalidData("name lists must match column counts".into()));
        }
        if !x.data().iter().chain(y.data()).all(|v| v.is_finite()) {
            return Err(Error::InvalidData("non-finite entry in data".into()));
        }
        Ok(Dataset {
            x,
            y,
            predictor_names,
            response_names,
        })
    }

    pub fn x(&self) -> &Mat {
        &self.x
    }

    pub fn y(&self) -> &Mat {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn r(&self) -> usize {
        self.y.cols()
    }

    pub fn predictor_names(&self) -> &[String] {
        &self.predictor_names
    }

    pub fn response_names(&self) -> &[String] {
        &self.response_names
    }

    /// Label for component k of vec(B_hat) under column-major stacking:
    /// component k pairs response `k mod r` with predictor `k div r`.
    pub fn component_label(&self, k: usize) -> String {
        let r = self.r();
        format!("{}:{}", self.response_names[k % r], self.predictor_names[k / r])
    }
}

/// Fitted model: coefficients, residuals, residual covariance, and the
/// design cross-product kept for downstream standardization.
#[derive(Clone, Debug)]
pub struct FitResult {
    beta_hat: Mat,
    residuals: Mat,
    sigma_hat: Mat,
    mu_hat: Vec<f64>,
    xtx: SpdMat,
}

impl FitResult {
    /// Coefficient matrix, r x p.
    pub fn beta_hat(&self) -> &Mat {
        &self.beta_hat
    }

    /// vec(B_hat), column-major.
    pub fn vec_beta(&self) -> Vec<f64> {
        self.beta_hat.vec()
    }

    /// Residual matrix, n x r.
    pub fn residuals(&self) -> &Mat {
        &self.residuals
    }

    /// Residual covariance (biased divisor n, mean subtracted); symmetric
    /// nonnegative definite, exactly zero for noiseless data.
    pub fn sigma_hat(&self) -> &Mat {
        &self.sigma_hat
    }

    /// Residual column means.
    pub fn mu_hat(&self) -> &[f64] {
        &self.mu_hat
    }

    /// X'X, validated positive definite.
    pub fn xtx(&self) -> &SpdMat {
        &self.xtx
    }

    pub fn n(&self) -> usize {
        self.residuals.rows()
    }

    pub fn p(&self) -> usize {
        self.beta_hat.cols()
    }

    pub fn r(&self) -> usize {
        self.beta_hat.rows()
    }
}

/// Fits the model by ordinary least squares.
///
/// # Errors
/// [`Error::SingularDesign`] when X'X fails the positive definiteness
/// check; [`Error::DegenerateResiduals`] if the residual covariance is
/// negative definite beyond rounding.
pub fn fit_ols(data: &Dataset) -> Result<FitResult> {
    let xtx = SpdMat::new(data.x().gram()).map_err(|e| Error::SingularDesign(e.to_string()))?;
    let xtx_inv = xtx
        .inverse()
        .map_err(|e| Error::SingularDesign(e.to_string()))?;
    let beta_hat = data.y().transpose_mul(data.x()).matmul(xtx_inv.mat());
    let fitted = data.x().mul_by_transpose(&beta_hat);
    let residuals = data.y().sub(&fitted);
    let (sigma_hat, mu_hat) = sigma_hat_checked(&residuals)?;
    Ok(FitResult {
        beta_hat,
        residuals,
        sigma_hat,
        mu_hat,
        xtx,
    })
}

/// Residual covariance with the biased divisor n and literal mean
/// subtraction, plus the residual mean vector.
///
/// # Errors
/// [`Error::DegenerateResiduals`] if the smallest eigenvalue is below
/// -1e-10.
pub fn sigma_hat(residuals: &Mat) -> Result<(Mat, Vec<f64>)> {
    sigma_hat_checked(residuals)
}

fn sigma_hat_checked(residuals: &Mat) -> Result<(Mat, Vec<f64>)> {
    let (sigma, mu) = row_covariance(residuals);
    let (values, _) = sigma.jacobi_eigen();
    let min_eigenvalue = values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -1e-10 {
        return Err(Error::DegenerateResiduals { min_eigenvalue });
    }
    Ok((sigma, mu))
}

/// Second-moment covariance of the rows of `m`: n^(-1) M'M - mean mean'.
/// No definiteness check; shared with the bootstrap engines where the
/// replicate covariance is nonnegative by construction.
pub(crate) fn row_covariance(m: &Mat) -> (Mat, Vec<f64>) {
    let n = m.rows() as f64;
    let mean: Vec<f64> = (0..m.cols())
        .map(|j| m.col(j).iter().sum::<f64>() / n)
        .collect();
    let second = m.gram().scale(1.0 / n);
    let r = m.cols();
    let sigma = Mat::from_fn(r, r, |i, j| second.get(i, j) - mean[i] * mean[j]);
    (sigma, mean)
}
