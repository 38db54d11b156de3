//! Crate-wide error type.
//!
//! Numeric conditions (singularity, asymmetry, degenerate draws) are errors;
//! shape violations that can only arise from caller bugs panic at the call
//! site instead. `Error::exit_code` fixes the process exit code for each
//! class when an error escapes the command-line driver.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input to an operator that requires symmetry was asymmetric beyond tolerance.
    #[error("asymmetric input: max |A[i,j] - A[j,i]| = {max_abs_diff:.3e} exceeds tolerance {tol:.3e}")]
    AsymmetricInput { max_abs_diff: f64, tol: f64 },

    /// A Cholesky pivot fell below the scale-relative positive-definiteness tolerance.
    #[error("matrix numerically singular: pivot {pivot:.3e} below tolerance {tol:.3e}")]
    NearSingular { pivot: f64, tol: f64 },

    /// The design cross-product X'X failed the positive-definiteness check.
    #[error("singular design: {0}")]
    SingularDesign(String),

    /// Residual covariance failed nonnegative-definiteness beyond rounding error.
    #[error("degenerate residual covariance: min eigenvalue {min_eigenvalue:.3e}")]
    DegenerateResiduals { min_eigenvalue: f64 },

    /// A pairs-bootstrap replicate kept drawing singular resampled designs.
    #[error("replicate {replicate}: resampled design still singular after {attempts} redraws")]
    SingularResamples { replicate: usize, attempts: usize },

    /// Too few bootstrap draws for the requested percentile ranks to be distinct.
    #[error("insufficient draws: B = {b} cannot separate the alpha = {alpha} percentile ranks")]
    InsufficientDraws { b: usize, alpha: f64 },

    /// Mallows distance between empirical laws requires equal atom counts.
    #[error("unequal support sizes: {left} vs {right}")]
    UnequalSupportSizes { left: usize, right: usize },

    /// Point dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A supplied analytic gradient disagrees with central finite differences.
    #[error("gradient mismatch at ({row},{col}): supplied {supplied:.6e}, finite difference {finite_difference:.6e}")]
    GradientMismatch {
        row: usize,
        col: usize,
        supplied: f64,
        finite_difference: f64,
    },

    /// The joint (X, error) covariance block matrix is not positive definite.
    #[error("joint covariance block matrix is not positive definite: {0}")]
    BlockNotSpd(String),

    /// A noise covariance must be symmetric positive semidefinite.
    #[error("covariance is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// Dataset construction contract violated (shapes, finiteness, n > p).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Bad configuration (flag values, config file contents, method misuse).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A requested CSV column is absent from the header.
    #[error("missing column: {0}")]
    MissingColumn(String),

    /// A numeric CSV cell failed to parse.
    #[error("non-numeric cell at data row {row}, column {column}: {value:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    /// The CSV contained a header but no data rows.
    #[error("no data rows in input")]
    EmptyData,

    /// Factor encoding produced a rank-deficient design.
    #[error("rank-deficient design after factor encoding: {0}")]
    RankDeficientAfterEncoding(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 0 ok, 2 configuration, 3 ingestion, 4 singular
    /// design, 5 bootstrap failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) => 2,
            Error::MissingColumn(_)
            | Error::NonNumericCell { .. }
            | Error::EmptyData
            | Error::RankDeficientAfterEncoding(_)
            | Error::InvalidData(_)
            | Error::Io(_)
            | Error::Csv(_) => 3,
            Error::SingularDesign(_) | Error::NearSingular { .. } => 4,
            Error::SingularResamples { .. }
            | Error::InsufficientDraws { .. }
            | Error::DegenerateResiduals { .. } => 5,
            _ => 1,
        }
    }

    /// One-line machine-readable rendering for stderr.
    pub fn machine_line(&self) -> String {
        format!(
            "{{\"error\":{},\"code\":{}}}",
            serde_json::to_string(&self.to_string()).unwrap_or_else(|_| "\"error\"".into()),
            self.exit_code()
        )
    }
}
