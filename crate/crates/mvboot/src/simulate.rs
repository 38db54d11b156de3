//! Synthetic data generators and experiment drivers: a fixed-design
//! generator (frozen X, fresh error streams), a jointly Gaussian
//! random-design generator with predictor/error cross-covariance, table
//! experiments comparing bootstrap percentile intervals against their
//! closed-form counterparts, and Monte Carlo coverage studies.
//!
//! Every generated value is a pure function of (seed, stream, path):
//! designs come from the design stream, error matrices from the noise
//! stream indexed by `error_stream`, so regenerating with a new error
//! stream redraws noise under the identical X. Matrices fill row by row,
//! each row consuming its draws left to right.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{fixed_design_intervals, sandwich_intervals};
use crate::bootstrap::{
    pairs_bootstrap, residual_bootstrap, BootConfig, BootstrapDraws, BootstrapMethod,
};
use crate::error::{Error, Result};
use crate::model::{fit_ols, Dataset, FitResult};
use crate::rng::{
    derive_seed, standard_normal, stream_rng, STREAM_COVERAGE, STREAM_DESIGN, STREAM_NOISE,
    STREAM_TABLE,
};
use crate::tensorlinalg::{Mat, SpdMat, SPD_PIVOT_REL_TOL};

/// Marginal law of the error rows (always scaled to covariance sigma).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ErrorLaw {
    /// Rows i.i.d. N(0, sigma).
    #[serde(rename = "gaussian")]
    #[default]
    Gaussian,
    /// Multivariate t with df degrees of freedom (shared denominator),
    /// rescaled by sqrt((df-2)/df) so the covariance is still sigma.
    #[serde(rename = "student-t")]
    StudentT { df: u32 },
}

/// Fixed-design generator: X has i.i.d. standard normal entries frozen by
/// the seed; Y = X B' + E with error rows i.i.d. from the error law.
#[derive(Clone, Debug, Serialize)]
pub struct FixedDesignSpec {
    n: usize,
    beta: Mat,
    sigma: Mat,
    seed: u64,
    error_stream: u64,
    error_law: ErrorLaw,
}

impl FixedDesignSpec {
    /// # Errors
    /// [`Error::InvalidConfig`] for inconsistent shapes or n <= p;
    /// [`Error::NotPositiveSemidefinite`] if sigma has a negative
    /// eigenvalue. A singular (even zero) sigma is legal: it yields
    /// degenerate noise, which downstream checks must tolerate.
    pub fn new(n: usize, beta: Mat, sigma: Mat, seed: u64) -> Result<Self> {
        if beta.rows() == 0 || beta.cols() == 0 {
            return Err(Error::InvalidConfig("beta must be nonempty".into()));
        }
        if n <= beta.cols() {
            return Err(Error::InvalidConfig(format!(
                "need n > p, got n = {n}, p = {}",
                beta.cols()
            )));
        }
        if sigma.rows() != beta.rows() || sigma.cols() != beta.rows() {
            return Err(Error::InvalidConfig(format!(
                "sigma must be {r} x {r} to match beta's {r} responses",
                r = beta.rows()
            )));
        }
        sigma.psd_sqrt(SPD_PIVOT_REL_TOL)?;
        Ok(FixedDesignSpec {
            n,
            beta,
            sigma,
            seed,
            error_stream: 0,
            error_law: ErrorLaw::Gaussian,
        })
    }

    /// Default experiment geometry: r = 3 responses, p = 2 predictors,
    /// the shipped beta/sigma from [`default_generator_config`].
    pub fn bench_default(n: usize, seed: u64) -> Self {
        let cfg = default_generator_config();
        FixedDesignSpec::new(n, cfg.beta_mat(), cfg.sigma_mat(), seed)
            .expect("default generator config is valid")
    }

    pub fn with_error_stream(mut self, error_stream: u64) -> Self {
        self.error_stream = error_stream;
        self
    }

    pub fn with_error_law(mut self, error_law: ErrorLaw) -> Self {
        self.error_law = error_law;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.beta.cols()
    }

    pub fn r(&self) -> usize {
        self.beta.rows()
    }

    pub fn beta(&self) -> &Mat {
        &self.beta
    }

    pub fn sigma(&self) -> &Mat {
        &self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn error_stream(&self) -> u64 {
        self.error_stream
    }

    pub fn error_law(&self) -> ErrorLaw {
        self.error_law
    }
}

/// Random-design generator: rows (X_i, e_i) are jointly Gaussian with
/// block covariance [[sigma_x, sigma_xe], [sigma_xe', sigma]], and
/// Y_i = B X_i + e_i.
///
/// A nonzero cross block makes OLS inconsistent for the generating B;
/// the meaningful target is then [`JointDesignSpec::estimand`].
#[derive(Clone, Debug, Serialize)]
pub struct JointDesignSpec {
    n: usize,
    beta: Mat,
    sigma_x: Mat,
    sigma_xe: Mat,
    sigma: Mat,
    seed: u64,
    #[serde(skip)]
    block_chol: Mat,
}

impl JointDesignSpec {
    /// # Errors
    /// [`Error::InvalidConfig`] for shape mismatches; [`Error::BlockNotSpd`]
    /// when the assembled (p+r) x (p+r) covariance is not positive
    /// definite.
    pub fn new(
        n: usize,
        beta: Mat,
        sigma_x: Mat,
        sigma_xe: Mat,
        sigma: Mat,
        seed: u64,
    ) -> Result<Self> {
        let r = beta.rows();
        let p = beta.cols();
        if r == 0 || p == 0 {
            return Err(Error::InvalidConfig("beta must be nonempty".into()));
        }
        if n <= p {
            return Err(Error::InvalidConfig(format!(
                "need n > p, got n = {n}, p = {p}"
            )));
        }
        if sigma_x.rows() != p || sigma_x.cols() != p {
            return Err(Error::InvalidConfig("sigma_x must be p x p".into()));
        }
        if sigma_xe.rows() != p || sigma_xe.cols() != r {
            return Err(Error::InvalidConfig("sigma_xe must be p x r".into()));
        }
        if sigma.rows() != r || sigma.cols() != r {
            return Err(Error::InvalidConfig("sigma must be r x r".into()));
        }
        let d = p + r;
        let block = Mat::from_fn(d, d, |i, j| match (i < p, j < p) {
            (true, true) => sigma_x.get(i, j),
            (true, false) => sigma_xe.get(i, j - p),
            (false, true) => sigma_xe.get(j, i - p),
            (false, false) => sigma.get(i - p, j - p),
        });
        let block_chol = block
            .symmetrized()
            .cholesky_lower(SPD_PIVOT_REL_TOL)
            .map_err(|e| Error::BlockNotSpd(format!("joint (X, e) covariance: {e}")))?;
        Ok(JointDesignSpec {
            n,
            beta,
            sigma_x,
            sigma_xe,
            sigma,
            seed,
            block_chol,
        })
    }

    /// Default experiment geometry matching [`default_generator_config`],
    /// including its cross-covariance block.
    pub fn bench_default(n: usize, seed: u64) -> Self {
        let cfg = default_generator_config();
        JointDesignSpec::new(
            n,
            cfg.beta_mat(),
            cfg.sigma_x_mat(),
            cfg.sigma_xe_mat(),
            cfg.sigma_mat(),
            seed,
        )
        .expect("default generator config is valid")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.beta.cols()
    }

    pub fn r(&self) -> usize {
        self.beta.rows()
    }

    pub fn beta(&self) -> &Mat {
        &self.beta
    }

    pub fn sigma_x(&self) -> &Mat {
        &self.sigma_x
    }

    pub fn sigma_xe(&self) -> &Mat {
        &self.sigma_xe
    }

    pub fn sigma(&self) -> &Mat {
        &self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// What OLS actually estimates under this generator:
    /// B(mu) = E(Y X') E(X X')^(-1) = B + sigma_xe' sigma_x^(-1).
    pub fn estimand(&self) -> Result<Mat> {
        let sx_inv = SpdMat::new(self.sigma_x.clone())?.inverse()?;
        Ok(self.beta.add(&self.sigma_xe.transpose().matmul(sx_inv.mat())))
    }
}

/// The shipped generator defaults, echoed verbatim into every experiment
/// report so results are reproducible from the output alone.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorConfig {
    pub version: u32,
    pub r: usize,
    pub p: usize,
    pub beta: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<f64>>,
    pub sigma_x: Vec<Vec<f64>>,
    pub sigma_xe: Vec<Vec<f64>>,
}

impl GeneratorConfig {
    pub fn beta_mat(&self) -> Mat {
        rows_to_mat(&self.beta)
    }

    pub fn sigma_mat(&self) -> Mat {
        rows_to_mat(&self.sigma)
    }

    pub fn sigma_x_mat(&self) -> Mat {
        rows_to_mat(&self.sigma_x)
    }

    pub fn sigma_xe_mat(&self) -> Mat {
        rows_to_mat(&self.sigma_xe)
    }
}

fn rows_to_mat(rows: &[Vec<f64>]) -> Mat {
    Mat::from_rows(rows)
}

/// Version 1 defaults: r = 3, p = 2; coefficients inside [-1, 1]; unit
/// error variances with 0.3 correlations; predictor covariance with 0.3
/// correlation; cross-covariance entries 0.2.
pub fn default_generator_config() -> GeneratorConfig {
    GeneratorConfig {
        version: 1,
        r: 3,
        p: 2,
        beta: vec![
            vec![0.6, -0.35],
            vec![0.25, 0.9],
            vec![-0.8, 0.1],
        ],
        sigma: vec![
            vec![1.0, 0.3, 0.3],
            vec![0.3, 1.0, 0.3],
            vec![0.3, 0.3, 1.0],
        ],
        sigma_x: vec![vec![1.0, 0.3], vec![0.3, 1.0]],
        sigma_xe: vec![vec![0.2, 0.2, 0.2], vec![0.2, 0.2, 0.2]],
    }
}

/// The frozen design: n x p i.i.d. standard normals drawn row-major from
/// the design stream of `seed`.
pub fn design_matrix(n: usize, p: usize, seed: u64) -> Mat {
    let mut rng = stream_rng(seed, STREAM_DESIGN, &[]);
    let mut x = Mat::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            x.set(i, j, standard_normal(&mut rng));
        }
    }
    x
}

/// Error matrix for a fixed-design spec: row i consumes r normals (plus
/// df more for the Student-t denominator), then maps through the
/// symmetric square root of sigma.
fn sample_errors(spec: &FixedDesignSpec) -> Result<Mat> {
    let (n, r) = (spec.n, spec.r());
    let s = spec.sigma.psd_sqrt(SPD_PIVOT_REL_TOL)?;
    let mut rng = stream_rng(spec.seed, STREAM_NOISE, &[spec.error_stream]);
    let mut z = Mat::zeros(n, r);
    for i in 0..n {
        for j in 0..r {
            z.set(i, j, standard_normal(&mut rng));
        }
        if let ErrorLaw::StudentT { df } = spec.error_law {
            if df < 3 {
                return Err(Error::InvalidConfig(format!(
                    "student-t law needs df >= 3 for a finite variance, got {df}"
                )));
            }
            let mut chisq = 0.0;
            for _ in 0..df {
                let g = standard_normal(&mut rng);
                chisq += g * g;
            }
            // Multivariate t scale, renormalized to unit covariance.
            let scale = ((df as f64 - 2.0) / chisq).sqrt();
            for j in 0..r {
                z.set(i, j, z.get(i, j) * scale);
            }
        }
    }
    Ok(z.mul_by_transpose(&s))
}

/// Generates a fixed-design dataset; see [`gen_fixed_with_errors`] to also
/// keep the true error matrix.
pub fn gen_fixed(spec: &FixedDesignSpec) -> Result<Dataset> {
    gen_fixed_with_errors(spec).map(|(d, _)| d)
}

/// Generates a fixed-design dataset along with the true errors that
/// produced it (needed by checks that compare residuals to errors).
pub fn gen_fixed_with_errors(spec: &FixedDesignSpec) -> Result<(Dataset, Mat)> {
    let x = design_matrix(spec.n, spec.p(), spec.seed);
    let errors = sample_errors(spec)?;
    let y = x.mul_by_transpose(&spec.beta).add(&errors);
    Ok((Dataset::new(x, y)?, errors))
}

/// Generates a random-design dataset with jointly Gaussian (X_i, e_i).
pub fn gen_joint(spec: &JointDesignSpec) -> Result<Dataset> {
    let (n, p, r) = (spec.n, spec.p(), spec.r());
    let d = p + r;
    let mut rng = stream_rng(spec.seed, STREAM_DESIGN, &[]);
    let mut x = Mat::zeros(n, p);
    let mut y = Mat::zeros(n, r);
    let mut z = vec![0.0; d];
    let mut w = vec![0.0; d];
    for i in 0..n {
        for zk in z.iter_mut() {
            *zk = standard_normal(&mut rng);
        }
        // w = L z, L lower triangular.
        for (a, wa) in w.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (b, &zb) in z.iter().enumerate().take(a + 1) {
                acc += spec.block_chol.get(a, b) * zb;
            }
            *wa = acc;
        }
        for j in 0..p {
            x.set(i, j, w[j]);
        }
        for k in 0..r {
            let mut mean = 0.0;
            for j in 0..p {
                mean += spec.beta.get(k, j) * w[j];
            }
            y.set(i, k, mean + w[p + k]);
        }
    }
    Dataset::new(x, y)
}

/// Which published comparison layout a table experiment reproduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableKind {
    /// Fixed design: residual bootstrap vs. normal-theory intervals.
    #[serde(rename = "table1")]
    Table1,
    /// Random design: pairs bootstrap vs. sandwich intervals.
    #[serde(rename = "table2")]
    Table2,
}

/// One sample size's comparison: percentile and closed-form endpoints for
/// every component of vec(B_hat). Display layers show the first two; the
/// full set is kept so endpoint agreement can be audited component-wise.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub bootstrap: Vec<[f64; 2]>,
    pub closed_form: Vec<[f64; 2]>,
}

/// A full table experiment with its generator configuration echoed.
#[derive(Clone, Debug, Serialize)]
pub struct TableExperiment {
    pub kind: TableKind,
    pub seed: u64,
    pub replicate_rule: String,
    pub config: GeneratorConfig,
    pub rows: Vec<TableRow>,
}

/// Runs the bootstrap-vs-closed-form comparison at each sample size: one
/// dataset per n, B = 4n replicates, alpha = 0.05, every component of
/// vec(B_hat) recorded.
pub fn run_table_experiment(kind: TableKind, sizes: &[usize], seed: u64) -> Result<TableExperiment> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let data_seed = derive_seed(seed, STREAM_TABLE, &[n as u64]);
        let b = BootConfig::default_replicates(n);
        let cfg = BootConfig::new(b, data_seed)?;
        let (boot, closed) = match kind {
            TableKind::Table1 => {
                let spec = FixedDesignSpec::bench_default(n, data_seed);
                let data = gen_fixed(&spec)?;
                let fit = fit_ols(&data)?;
                let draws = residual_bootstrap(&fit, data.x(), &cfg)?;
                (
                    draws.percentile_interval(None)?,
                    fixed_design_intervals(&fit, cfg.alpha())?,
                )
            }
            TableKind::Table2 => {
                let spec = JointDesignSpec::bench_default(n, data_seed);
                let data = gen_joint(&spec)?;
                let fit = fit_ols(&data)?;
                let draws = pairs_bootstrap(&data, &cfg)?;
                (
                    draws.percentile_interval(None)?,
                    sandwich_intervals(&data, &fit, cfg.alpha())?,
                )
            }
        };
        rows.push(TableRow {
            n,
            bootstrap: boot.components.iter().map(|c| [c.lower, c.upper]).collect(),
            closed_form: closed
                .components
                .iter()
                .map(|c| [c.lower, c.upper])
                .collect(),
        });
    }
    Ok(TableExperiment {
        kind,
        seed,
        replicate_rule: "B = 4n".into(),
        config: default_generator_config(),
        rows,
    })
}

/// Which generator a coverage study draws from.
#[derive(Clone, Debug)]
pub enum DesignSpec {
    Fixed(FixedDesignSpec),
    Joint(JointDesignSpec),
}

/// Monte Carlo coverage of nominal (1 - alpha) percentile intervals.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub method: BootstrapMethod,
    pub alpha: f64,
    pub reps: usize,
    pub replicates: usize,
    /// Per-component frequency that the interval covered the estimand.
    pub coverage: Vec<f64>,
    /// Per-component mean interval width.
    pub mean_width: Vec<f64>,
}

/// Repeats generate -> bootstrap -> percentile interval `reps` times and
/// reports per-component coverage of the generator's estimand (the
/// generating coefficients for fixed designs; under a random design with
/// cross-covariance, the OLS limit B + sigma_xe' sigma_x^(-1)).
///
/// Fixed designs keep X frozen and advance only the error stream per rep;
/// joint designs redraw everything per rep. `replicates` of `None` uses
/// B = 4n. Reps parallelize; results merge in rep order.
pub fn coverage_study(
    design: &DesignSpec,
    method: BootstrapMethod,
    replicates: Option<usize>,
    reps: usize,
    alpha: f64,
    seed: u64,
) -> Result<CoverageReport> {
    if reps == 0 {
        return Err(Error::InvalidConfig("coverage needs reps >= 1".into()));
    }
    let (n, estimand) = match design {
        DesignSpec::Fixed(s) => (s.n(), s.beta().vec()),
        DesignSpec::Joint(s) => (s.n(), s.estimand()?.vec()),
    };
    let b = replicates.unwrap_or_else(|| BootConfig::default_replicates(n));
    let per_rep: Vec<(Vec<bool>, Vec<f64>)> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<(Vec<bool>, Vec<f64>)> {
            let rep_seed = derive_seed(seed, STREAM_COVERAGE, &[rep as u64]);
            let cfg = BootConfig::new(b, rep_seed)?.with_alpha(alpha)?;
            let draws: BootstrapDraws = match (design, method) {
                (DesignSpec::Fixed(s), BootstrapMethod::Residual) => {
                    let data = gen_fixed(&s.clone().with_error_stream(rep as u64))?;
                    let fit = fit_ols(&data)?;
                    residual_bootstrap(&fit, data.x(), &cfg)?
                }
                (DesignSpec::Fixed(s), BootstrapMethod::Pairs) => {
                    let data = gen_fixed(&s.clone().with_error_stream(rep as u64))?;
                    pairs_bootstrap(&data, &cfg)?
                }
                (DesignSpec::Joint(s), BootstrapMethod::Residual) => {
                    let data = gen_joint(&s.clone().with_seed(rep_seed))?;
                    let fit = fit_ols(&data)?;
                    residual_bootstrap(&fit, data.x(), &cfg)?
                }
                (DesignSpec::Joint(s), BootstrapMethod::Pairs) => {
                    let data = gen_joint(&s.clone().with_seed(rep_seed))?;
                    pairs_bootstrap(&data, &cfg)?
                }
            };
            let table = draws.percentile_interval(Some(alpha))?;
            let covered: Vec<bool> = estimand
                .iter()
                .enumerate()
                .map(|(k, &v)| table.covers(k, v))
                .collect();
            Ok((covered, table.widths()))
        })
        .collect::<Result<Vec<_>>>()?;

    let k = estimand.len();
    let mut coverage = vec![0.0; k];
    let mut mean_width = vec![0.0; k];
    for (covered, widths) in &per_rep {
        for i in 0..k {
            if covered[i] {
                coverage[i] += 1.0;
            }
            mean_width[i] += widths[i];
        }
    }
    for i in 0..k {
        coverage[i] /= reps as f64;
        mean_width[i] /= reps as f64;
    }
    Ok(CoverageReport {
        method,
        alpha,
        reps,
        replicates: b,
        coverage,
        mean_width,
    })
}

/// What an experiment config file asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentKind {
    Table1,
    Table2,
    CoverageFixed,
    CoverageJoint,
}

/// Parsed experiment description (flat key = value file).
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub sizes: Vec<usize>,
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    pub replicates: Option<usize>,
    pub method: Option<BootstrapMethod>,
    pub error_law: ErrorLaw,
}

/// Parses the flat experiment config format. Recognized keys:
/// `kind` (table1 | table2 | coverage-fixed | coverage-joint),
/// `sizes` (comma-separated, tables only), `n`, `reps`, `alpha`, `seed`,
/// `b` (bootstrap replicates; default 4n), `method` (residual | pairs),
/// `error_law` (gaussian | student-t), `df` (student-t only).
/// Lines starting with `#` and blank lines are ignored.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let mut kind = None;
    let mut sizes = vec![100, 500, 1000, 5000];
    let mut n = 500usize;
    let mut reps = 500usize;
    let mut alpha = 0.05;
    let mut seed = crate::rng::DEFAULT_SEED;
    let mut replicates = None;
    let mut method = None;
    let mut law_name: Option<String> = None;
    let mut df: u32 = 8;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            Error::InvalidConfig(format!("line {}: bad {what} value {value:?}", lineno + 1))
        };
        match key {
            "kind" => {
                kind = Some(match value {
                    "table1" => ExperimentKind::Table1,
                    "table2" => ExperimentKind::Table2,
                    "coverage-fixed" => ExperimentKind::CoverageFixed,
                    "coverage-joint" => ExperimentKind::CoverageJoint,
                    _ => return Err(bad("kind")),
                })
            }
            "sizes" => {
                sizes = value
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("sizes"))?;
                if sizes.is_empty() {
                    return Err(bad("sizes"));
                }
            }
            "n" => n = value.parse().map_err(|_| bad("n"))?,
            "reps" => reps = value.parse().map_err(|_| bad("reps"))?,
            "alpha" => alpha = value.parse().map_err(|_| bad("alpha"))?,
            "seed" => seed = value.parse().map_err(|_| bad("seed"))?,
            "b" => replicates = Some(value.parse().map_err(|_| bad("b"))?),
            "method" => {
                method = Some(match value {
                    "residual" => BootstrapMethod::Residual,
                    "pairs" => BootstrapMethod::Pairs,
                    _ => return Err(bad("method")),
                })
            }
            "error_law" => law_name = Some(value.to_string()),
            "df" => df = value.parse().map_err(|_| bad("df"))?,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "line {}: unknown key {key:?}",
                    lineno + 1
                )))
            }
        }
    }

    let kind = kind.ok_or_else(|| Error::InvalidConfig("missing required key: kind".into()))?;
    let error_law = match law_name.as_deref() {
        None | Some("gaussian") => ErrorLaw::Gaussian,
        Some("student-t") => ErrorLaw::StudentT { df },
        Some(other) => {
            return Err(Error::InvalidConfig(format!(
                "bad error_law value {other:?}"
            )))
        }
    };
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    Ok(ExperimentConfig {
        kind,
        sizes,
        n,
        reps,
        alpha,
        seed,
        replicates,
        method,
        error_law,
    })
}

/// Result of running an experiment config.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum ExperimentOutput {
    Table(TableExperiment),
    Coverage(CoverageReport),
}

/// Dispatches a parsed experiment config to the matching driver.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.kind {
        ExperimentKind::Table1 => Ok(ExperimentOutput::Table(run_table_experiment(
            TableKind::Table1,
            &cfg.sizes,
            cfg.seed,
        )?)),
        ExperimentKind::Table2 => Ok(ExperimentOutput::Table(run_table_experiment(
            TableKind::Table2,
            &cfg.sizes,
            cfg.seed,
        )?)),
        ExperimentKind::CoverageFixed => {
            let spec =
                FixedDesignSpec::bench_default(cfg.n, cfg.seed).with_error_law(cfg.error_law);
            let method = cfg.method.unwrap_or(BootstrapMethod::Residual);
            Ok(ExperimentOutput::Coverage(coverage_study(
                &DesignSpec::Fixed(spec),
                method,
                cfg.replicates,
                cfg.reps,
                cfg.alpha,
                cfg.seed,
            )?))
        }
        ExperimentKind::CoverageJoint => {
            let spec = JointDesignSpec::bench_default(cfg.n, cfg.seed);
            let method = cfg.method.unwrap_or(BootstrapMethod::Pairs);
            Ok(ExperimentOutput::Coverage(coverage_study(
                &DesignSpec::Joint(spec),
                method,
                cfg.replicates,
                cfg.reps,
                cfg.alpha,
                cfg.seed,
            )?))
        }
    }
}

/// Fits OLS on data drawn from a fixed-design spec; convenience for
/// checks that repeatedly regenerate and refit.
pub fn fit_fixed(spec: &FixedDesignSpec) -> Result<(Dataset, FitResult)> {
    let data = gen_fixed(spec)?;
    let fit = fit_ols(&data)?;
    Ok((data, fit))
}
