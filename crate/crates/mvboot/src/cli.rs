//! Command-line front end: CSV ingestion with factor encoding, model
//! fitting, the two bootstrap engines, simulation experiments, and the
//! distance-bound check suite.
//!
//! Output discipline: everything the user sees is assembled into one
//! string and printed once, so identical runs are byte-identical. Numbers
//! are rounded to 3 decimals, half away from zero, in both table and JSON
//! modes (the JSON carries exactly the printed endpoints).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{fixed_design_intervals, sandwich_intervals};
use crate::bootstrap::{pairs_bootstrap, residual_bootstrap, BootConfig};
use crate::error::{Error, Result};
use crate::intervals::IntervalTable;
use crate::mallows::{check_lemma6, check_lemma_bounds, check_theorem3_bound, BoundReport, EmpiricalDist};
use crate::model::{fit_ols, Dataset, FitResult};
use crate::rng::{standard_normal, stream_rng, DEFAULT_SEED, STREAM_MALLOWS};
use crate::simulate::{
    parse_experiment_config, run_experiment, CoverageReport, ExperimentOutput, FixedDesignSpec,
    TableExperiment,
};
use crate::tensorlinalg::Mat;

/// Multivariate linear regression with residual and pairs bootstrap
/// inference.
#[derive(Parser, Debug)]
#[command(name = "mvboot", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit the model and print coefficients and the residual covariance
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residual bootstrap (fixed design): percentile vs normal intervals
    BootFixed {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        boot: BootArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Pairs bootstrap (random design): percentile vs sandwich intervals
    BootPairs {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        boot: BootArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a table or coverage experiment from a key = value config file
    Simulate {
        /// Experiment config file
        #[arg(long)]
        input: PathBuf,
        /// Override the config file's seed
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the distribution-distance bound check suite
    MallowsCheck {
        /// Random instances per check
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
pub struct DataArgs {
    /// CSV file with a header row
    #[arg(long)]
    pub input: PathBuf,
    /// Response columns (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    pub responses: Vec<String>,
    /// Predictor columns (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    pub predictors: Vec<String>,
    /// Predictors to expand into treatment-coded dummies
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<String>,
    /// Fit without the leading column of ones
    #[arg(long)]
    pub no_intercept: bool,
}

#[derive(Args, Debug)]
pub struct BootArgs {
    /// Bootstrap replicates (default: 4n)
    #[arg(long = "B")]
    pub b: Option<usize>,
    /// Two-sided miscoverage level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Master seed for all resampling streams
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

/// Ingestion result: the design/response matrices plus the factor coding
/// metadata needed for honest report headers.
#[derive(Debug)]
pub struct IngestedData {
    pub dataset: Dataset,
    /// (factor column, reference level), in flag order.
    pub reference_levels: Vec<(String, String)>,
}

/// Reads a CSV with a header row into a [`Dataset`].
///
/// Factor columns expand to treatment-coded dummies: levels sort
/// alphabetically, the first becomes the reference and is dropped, and
/// each remaining level gets a `col=level` column. An intercept column of
/// ones is prepended unless disabled. Non-factor cells must parse as
/// finite decimal reals.
pub fn ingest_csv(
    path: &Path,
    responses: &[String],
    predictors: &[String],
    factors: &[String],
    intercept: bool,
) -> Result<IngestedData> {
    if responses.is_empty() {
        return Err(Error::InvalidConfig("need at least one response".into()));
    }
    if predictors.is_empty() {
        return Err(Error::InvalidConfig("need at least one predictor".into()));
    }
    for r in responses {
        if predictors.contains(r) {
            return Err(Error::InvalidConfig(format!(
                "column {r:?} cannot be both response and predictor"
            )));
        }
    }
    for f in factors {
        if !predictors.contains(f) {
            return Err(Error::InvalidConfig(format!(
                "factor {f:?} must also be listed in --predictors"
            )));
        }
    }

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let col_index = |name: &String| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.clone()))
    };
    let response_idx: Vec<usize> = responses.iter().map(col_index).collect::<Result<_>>()?;
    let predictor_idx: Vec<usize> = predictors.iter().map(col_index).collect::<Result<_>>()?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = rows.len();

    let parse_cell = |row: usize, col: usize| -> Result<f64> {
        let cell = rows[row][col].trim();
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::NonNumericCell {
                row: row + 1,
                column: headers[col].clone(),
                value: cell.to_string(),
            }),
        }
    };

    let mut y = Mat::zeros(n, responses.len());
    for (j, &c) in response_idx.iter().enumerate() {
        for i in 0..n {
            y.set(i, j, parse_cell(i, c)?);
        }
    }

    // Assemble predictor columns in flag order; factors expand in place.
    let mut x_cols: Vec<(String, Vec<f64>)> = Vec::new();
    if intercept {
        x_cols.push(("(Intercept)".to_string(), vec![1.0; n]));
    }
    let mut reference_levels = Vec::new();
    for (name, &c) in predictors.iter().zip(&predictor_idx) {
        if factors.contains(name) {
            let mut levels: Vec<String> =
                rows.iter().map(|row| row[c].trim().to_string()).collect();
            levels.sort_unstable();
            levels.dedup();
            if levels.len() < 2 {
                return Err(Error::RankDeficientAfterEncoding(format!(
                    "factor {name:?} has {} level(s); treatment coding needs at least 2",
                    levels.len()
                )));
            }
            reference_levels.push((name.clone(), levels[0].clone()));
            for level in &levels[1..] {
                let col = rows
                    .iter()
                    .map(|row| if row[c].trim() == level.as_str() { 1.0 } else { 0.0 })
                    .collect();
                x_cols.push((format!("{name}={level}"), col));
            }
        } else {
            let mut col = Vec::with_capacity(n);
            for i in 0..n {
                col.push(parse_cell(i, c)?);
            }
            x_cols.push((name.clone(), col));
        }
    }

    let p = x_cols.len();
    let mut x = Mat::zeros(n, p);
    let mut predictor_names = Vec::with_capacity(p);
    for (j, (name, col)) in x_cols.into_iter().enumerate() {
        predictor_names.push(name);
        x.col_mut(j).copy_from_slice(&col);
    }

    let dataset = Dataset::with_names(x, y, predictor_names, responses.to_vec())?;
    Ok(IngestedData {
        dataset,
        reference_levels,
    })
}

/// Rounds to 3 decimals with ties going away from zero, normalizing -0.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0 + 0.0
}

fn fmt3(x: f64) -> String {
    format!("{:.3}", round3(x))
}

#[derive(Serialize)]
struct JsonComponent {
    label: String,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct JsonTable {
    method: String,
    components: Vec<JsonComponent>,
}

#[derive(Serialize)]
struct JsonBootReport<'a> {
    command: &'a str,
    input: String,
    n: usize,
    alpha: f64,
    replicates: usize,
    seed: u64,
    intercept: bool,
    reference_levels: BTreeMap<String, String>,
    tables: Vec<JsonTable>,
}

#[derive(Serialize)]
struct JsonCoefficient {
    response: String,
    predictor: String,
    estimate: f64,
}

#[derive(Serialize)]
struct JsonFitReport<'a> {
    command: &'a str,
    input: String,
    n: usize,
    p: usize,
    r: usize,
    intercept: bool,
    reference_levels: BTreeMap<String, String>,
    coefficients: Vec<JsonCoefficient>,
    residual_covariance: Vec<Vec<f64>>,
}

fn json_table(table: &IntervalTable) -> JsonTable {
    JsonTable {
        method: table.method.to_string(),
        components: table
            .components
            .iter()
            .map(|c| JsonComponent {
                label: c.label.clone(),
                lower: round3(c.lower),
                upper: round3(c.upper),
            })
            .collect(),
    }
}

fn coding_header(reference_levels: &[(String, String)], intercept: bool) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "intercept: {}\n",
        if intercept { "yes" } else { "no" }
    ));
    for (factor, reference) in reference_levels {
        s.push_str(&format!(
            "factor {factor}: treatment coding, reference level {reference}\n"
        ));
    }
    s
}

fn render_interval_report(
    command: &str,
    ingested: &IngestedData,
    tables: &[&IntervalTable],
    cfg: &BootConfig,
    intercept: bool,
    input: &Path,
    format: Format,
) -> String {
    let data = &ingested.dataset;
    let labels: Vec<String> = (0..data.r() * data.p())
        .map(|k| data.component_label(k))
        .collect();
    match format {
        Format::Json => {
            let report = JsonBootReport {
                command,
                input: input.display().to_string(),
                n: data.n(),
                alpha: cfg.alpha(),
                replicates: cfg.replicates(),
                seed: cfg.seed(),
                intercept,
                reference_levels: ingested
                    .reference_levels
                    .iter()
                    .cloned()
                    .collect::<BTreeMap<_, _>>(),
                tables: tables
                    .iter()
                    .map(|t| {
                        let mut jt = json_table(t);
                        for (c, label) in jt.components.iter_mut().zip(&labels) {
                            c.label = label.clone();
                        }
                        jt
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = String::new();
            s.push_str(&format!(
                "{command}: n = {}, B = {}, alpha = {}, seed = {}\n",
                data.n(),
                cfg.replicates(),
                cfg.alpha(),
                cfg.seed()
            ));
            s.push_str(&coding_header(&ingested.reference_levels, intercept));
            let width = labels.iter().map(String::len).max().unwrap_or(9).max(9);
            s.push_str(&format!("{:<width$}", "component"));
            for t in tables {
                s.push_str(&format!("  {:>25}", t.method.to_string()));
            }
            s.push('\n');
            for (k, label) in labels.iter().enumerate() {
                s.push_str(&format!("{label:<width$}"));
                for t in tables {
                    let c = &t.components[k];
                    s.push_str(&format!(
                        "  {:>25}",
                        format!("({}, {})", fmt3(c.lower), fmt3(c.upper))
                    ));
                }
                s.push('\n');
            }
            s
        }
    }
}

fn render_fit(
    ingested: &IngestedData,
    fit: &FitResult,
    intercept: bool,
    input: &Path,
    format: Format,
) -> String {
    let data = &ingested.dataset;
    match format {
        Format::Json => {
            let mut coefficients = Vec::new();
            for a in 0..data.p() {
                for j in 0..data.r() {
                    coefficients.push(JsonCoefficient {
                        response: data.response_names()[j].clone(),
                        predictor: data.predictor_names()[a].clone(),
                        estimate: round3(fit.beta_hat().get(j, a)),
                    });
                }
            }
            let report = JsonFitReport {
                command: "fit",
                input: input.display().to_string(),
                n: data.n(),
                p: data.p(),
                r: data.r(),
                intercept,
                reference_levels: ingested
                    .reference_levels
                    .iter()
                    .cloned()
                    .collect::<BTreeMap<_, _>>(),
                coefficients,
                residual_covariance: (0..data.r())
                    .map(|i| (0..data.r()).map(|j| round3(fit.sigma_hat().get(i, j))).collect())
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = String::new();
            s.push_str(&format!(
                "fit: n = {}, p = {}, r = {}\n",
                data.n(),
                data.p(),
                data.r()
            ));
            s.push_str(&coding_header(&ingested.reference_levels, intercept));
            let rw = data
                .response_names()
                .iter()
                .map(String::len)
                .max()
                .unwrap_or(8)
                .max(8);
            s.push_str("coefficients:\n");
            s.push_str(&format!("{:<rw$}", "response"));
            for name in data.predictor_names() {
                s.push_str(&format!("  {name:>12}"));
            }
            s.push('\n');
            for j in 0..data.r() {
                s.push_str(&format!("{:<rw$}", data.response_names()[j]));
                for a in 0..data.p() {
                    s.push_str(&format!("  {:>12}", fmt3(fit.beta_hat().get(j, a))));
                }
                s.push('\n');
            }
            s.push_str("residual covariance:\n");
            for i in 0..data.r() {
                s.push_str(&format!("{:<rw$}", data.response_names()[i]));
                for j in 0..data.r() {
                    s.push_str(&format!("  {:>12}", fmt3(fit.sigma_hat().get(i, j))));
                }
                s.push('\n');
            }
            s
        }
    }
}

fn render_table_experiment(exp: &TableExperiment, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rounded_table_experiment(exp))
                .expect("serializable report");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = String::new();
            let (kind, boot_name, closed_name) = match exp.kind {
                crate::simulate::TableKind::Table1 => ("table1", "bootstrap", "normal"),
                crate::simulate::TableKind::Table2 => ("table2", "bootstrap", "sandwich"),
            };
            s.push_str(&format!(
                "{kind}: seed = {}, {}, generator config v{}\n",
                exp.seed, exp.replicate_rule, exp.config.version
            ));
            s.push_str(&format!(
                "{:>6}  {:>25}  {:>25}  {:>25}  {:>25}\n",
                "n",
                format!("{boot_name} [1]"),
                format!("{closed_name} [1]"),
                format!("{boot_name} [2]"),
                format!("{closed_name} [2]"),
            ));
            for row in &exp.rows {
                s.push_str(&format!("{:>6}", row.n));
                for k in 0..2 {
                    let b = row.bootstrap[k];
                    let c = row.closed_form[k];
                    s.push_str(&format!(
                        "  {:>25}  {:>25}",
                        format!("({}, {})", fmt3(b[0]), fmt3(b[1])),
                        format!("({}, {})", fmt3(c[0]), fmt3(c[1]))
                    ));
                }
                s.push('\n');
            }
            s
        }
    }
}

fn rounded_table_experiment(exp: &TableExperiment) -> TableExperiment {
    let mut out = exp.clone();
    for row in &mut out.rows {
        for cell in row.bootstrap.iter_mut().chain(row.closed_form.iter_mut()) {
            cell[0] = round3(cell[0]);
            cell[1] = round3(cell[1]);
        }
    }
    out
}

fn render_coverage(report: &CoverageReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut rounded = report.clone();
            for v in rounded.coverage.iter_mut().chain(rounded.mean_width.iter_mut()) {
                *v = round3(*v);
            }
            let mut s = serde_json::to_string_pretty(&rounded).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = String::new();
            s.push_str(&format!(
                "coverage: method = {}, alpha = {}, reps = {}, B = {}\n",
                report.method, report.alpha, report.reps, report.replicates
            ));
            s.push_str(&format!(
                "{:>10}  {:>10}  {:>12}\n",
                "component", "coverage", "mean width"
            ));
            for (k, (c, w)) in report.coverage.iter().zip(&report.mean_width).enumerate() {
                s.push_str(&format!("{:>10}  {:>10}  {:>12}\n", k + 1, fmt3(*c), fmt3(*w)));
            }
            s
        }
    }
}

#[derive(Serialize)]
struct MallowsSuiteReport {
    seed: u64,
    trials: usize,
    law_bound_passes: usize,
    law_bound_reports: Vec<BoundReport>,
    residual_raw: BoundReport,
    residual_centered: BoundReport,
    covariance_displacement_passes: usize,
    covariance_displacement_total: usize,
}

/// Runs the built-in bound-check suite on seeded random instances. The
/// exit status stays 0 even when a probe fails its bound: the pass flags
/// are the data a caller inspects.
fn run_mallows_suite(trials: usize, seed: u64) -> Result<MallowsSuiteReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("need trials >= 1".into()));
    }
    // Law-distance bound on random small fixed designs.
    let mut law_reports = Vec::with_capacity(trials);
    for inst in 0..trials as u64 {
        let mut rng = stream_rng(seed, STREAM_MALLOWS, &[inst, 100]);
        let n = 4 + (inst % 5) as usize;
        let x = Mat::from_fn(n, 2, |_, _| standard_normal(&mut rng));
        let mut make_atoms = |scale: f64| -> Result<EmpiricalDist> {
            let mut pts: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..2).map(|_| scale * standard_normal(&mut rng)).collect())
                .collect();
            for k in 0..2 {
                let mean: f64 = pts.iter().map(|p| p[k]).sum::<f64>() / pts.len() as f64;
                for p in &mut pts {
                    p[k] -= mean;
                }
            }
            EmpiricalDist::from_points(pts)
        };
        let f = make_atoms(1.0)?;
        let g = make_atoms(1.5)?;
        law_reports.push(check_theorem3_bound(&x, &f, &g, 1, seed ^ inst)?);
    }
    let law_passes = law_reports.iter().filter(|r| r.pass).count();

    // Residual-law bounds on the default generator geometry.
    let spec = FixedDesignSpec::bench_default(100, seed);
    let (residual_raw, residual_centered) = check_lemma_bounds(&spec, 100, seed)?;

    // Covariance displacement bound on random vector pairs.
    let mut cov_passes = 0;
    let cov_total = 100;
    let mut rng = stream_rng(seed, STREAM_MALLOWS, &[7, 7]);
    for _ in 0..cov_total {
        let u: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| standard_normal(&mut rng)).collect())
            .collect();
        let v: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| standard_normal(&mut rng)).collect())
            .collect();
        if check_lemma6(&u, &v)?.pass {
            cov_passes += 1;
        }
    }

    Ok(MallowsSuiteReport {
        seed,
        trials,
        law_bound_passes: law_passes,
        law_bound_reports: law_reports,
        residual_raw,
        residual_centered,
        covariance_displacement_passes: cov_passes,
        covariance_displacement_total: cov_total,
    })
}

fn render_mallows(report: &MallowsSuiteReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = String::new();
            s.push_str(&format!(
                "mallows-check: seed = {}, trials = {}\n",
                report.seed, report.trials
            ));
            s.push_str(&format!(
                "law-distance bound: {}/{} instances passed\n",
                report.law_bound_passes, report.trials
            ));
            for (i, r) in report.law_bound_reports.iter().enumerate() {
                s.push_str(&format!(
                    "  instance {:>3}: estimate = {}, bound = {}, slack = {}, pass = {}\n",
                    i + 1,
                    fmt3(r.estimate),
                    fmt3(r.bound),
                    r.slack,
                    r.pass
                ));
            }
            for (name, r) in [
                ("residual law (raw)", &report.residual_raw),
                ("residual law (centered)", &report.residual_centered),
            ] {
                s.push_str(&format!(
                    "{name}: estimate = {:.6}, bound = {:.6}, slack = {:.6}, pass = {}\n",
                    r.estimate, r.bound, r.slack, r.pass
                ));
            }
            s.push_str(&format!(
                "covariance displacement bound: {}/{} instances passed\n",
                report.covariance_displacement_passes, report.covariance_displacement_total
            ));
            s
        }
    }
}

/// Executes a parsed command line and returns the full report text.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Fit { data, out } => {
            let ingested = ingest_csv(
                &data.input,
                &data.responses,
                &data.predictors,
                &data.factors,
                !data.no_intercept,
            )?;
            let fit = fit_ols(&ingested.dataset)?;
            let text = render_fit(&ingested, &fit, !data.no_intercept, &data.input, out.format);
            emit(out.output.as_deref(), text)
        }
        Command::BootFixed { data, boot, out } => {
            let ingested = ingest_csv(
                &data.input,
                &data.responses,
                &data.predictors,
                &data.factors,
                !data.no_intercept,
            )?;
            let fit = fit_ols(&ingested.dataset)?;
            let n = ingested.dataset.n();
            let cfg = BootConfig::new(boot.b.unwrap_or_else(|| BootConfig::default_replicates(n)), boot.seed)?
                .with_alpha(boot.alpha)?;
            let draws = residual_bootstrap(&fit, ingested.dataset.x(), &cfg)?;
            let percentile = draws.percentile_interval(None)?;
            let normal = fixed_design_intervals(&fit, cfg.alpha())?;
            let text = render_interval_report(
                "boot-fixed",
                &ingested,
                &[&percentile, &normal],
                &cfg,
                !data.no_intercept,
                &data.input,
                out.format,
            );
            emit(out.output.as_deref(), text)
        }
        Command::BootPairs { data, boot, out } => {
            let ingested = ingest_csv(
                &data.input,
                &data.responses,
                &data.predictors,
                &data.factors,
                !data.no_intercept,
            )?;
            let fit = fit_ols(&ingested.dataset)?;
            let n = ingested.dataset.n();
            let cfg = BootConfig::new(boot.b.unwrap_or_else(|| BootConfig::default_replicates(n)), boot.seed)?
                .with_alpha(boot.alpha)?;
            let draws = pairs_bootstrap(&ingested.dataset, &cfg)?;
            let percentile = draws.percentile_interval(None)?;
            let sandwich = sandwich_intervals(&ingested.dataset, &fit, cfg.alpha())?;
            let text = render_interval_report(
                "boot-pairs",
                &ingested,
                &[&percentile, &sandwich],
                &cfg,
                !data.no_intercept,
                &data.input,
                out.format,
            );
            emit(out.output.as_deref(), text)
        }
        Command::Simulate { input, seed, out } => {
            let text = std::fs::read_to_string(&input)?;
            let mut cfg = parse_experiment_config(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rendered = match run_experiment(&cfg)? {
                ExperimentOutput::Table(t) => render_table_experiment(&t, out.format),
                ExperimentOutput::Coverage(c) => render_coverage(&c, out.format),
            };
            emit(out.output.as_deref(), rendered)
        }
        Command::MallowsCheck { trials, seed, out } => {
            let report = run_mallows_suite(trials, seed)?;
            emit(out.output.as_deref(), render_mallows(&report, out.format))
        }
    }
}

fn emit(path: Option<&Path>, text: String) -> Result<String> {
    if let Some(p) = path {
        std::fs::write(p, &text)?;
        Ok(String::new())
    } else {
        Ok(text)
    }
}
