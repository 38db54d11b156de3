//! Cross-checks between the bootstrap engines and their closed-form
//! limits. These are the agreements the asymptotics promise; tolerances
//! are set from the Monte Carlo error at the pinned sizes and seeds.

use mvboot::asymptotics::{sandwich_parts, vec_beta_covariance};
use mvboot::bootstrap::{pairs_bootstrap, residual_bootstrap, BootConfig, BootstrapMethod};
use mvboot::model::fit_ols;
use mvboot::rng::DEFAULT_SEED;
use mvboot::simulate::{
    coverage_study, gen_fixed, gen_joint, DesignSpec, FixedDesignSpec, JointDesignSpec,
};
use mvboot::tensorlinalg::Mat;

const SEED: u64 = DEFAULT_SEED;

fn relative_frobenius(a: &Mat, b: &Mat) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm()
}

/// The residual bootstrap's replicate covariance has a closed conditional
/// form: (X'X)^(-1) (x) Sigma_hat. Var* should estimate it within Monte
/// Carlo error at B = 4000.
#[test]
fn residual_var_star_matches_conditional_covariance() {
    let spec = FixedDesignSpec::bench_default(500, SEED);
    let data = gen_fixed(&spec).unwrap();
    let fit = fit_ols(&data).unwrap();
    let cfg = BootConfig::new(4000, SEED).unwrap();
    let draws = residual_bootstrap(&fit, data.x(), &cfg).unwrap();
    let closed = vec_beta_covariance(&fit).unwrap();
    let rel = relative_frobenius(draws.var_star(), &closed);
    assert!(rel < 0.10, "relative gap {rel} exceeds 10%");
}

/// Under independent X and homoskedastic errors the sandwich collapses to
/// the fixed-design form W^(-1) (x) Sigma (scaled by 1/n).
#[test]
fn sandwich_reduces_under_homoskedasticity() {
    let base = JointDesignSpec::bench_default(5000, SEED);
    let spec = JointDesignSpec::new(
        5000,
        base.beta().clone(),
        base.sigma_x().clone(),
        Mat::zeros(base.p(), base.r()),
        base.sigma().clone(),
        SEED,
    )
    .unwrap();
    let data = gen_joint(&spec).unwrap();
    let fit = fit_ols(&data).unwrap();
    let parts = sandwich_parts(&data, &fit).unwrap();
    let fixed_form = vec_beta_covariance(&fit).unwrap();
    let rel = relative_frobenius(&parts.vec_beta_cov(data.n()), &fixed_form);
    assert!(rel < 0.10, "relative gap {rel} exceeds 10%");
}

/// Pairs-bootstrap Var* and the sandwich estimate target the same
/// covariance; at n = 1000 and B = 4000 they agree within joint Monte
/// Carlo error.
#[test]
fn pairs_var_star_matches_sandwich() {
    let spec = JointDesignSpec::bench_default(1000, SEED);
    let data = gen_joint(&spec).unwrap();
    let fit = fit_ols(&data).unwrap();
    let cfg = BootConfig::new(4000, SEED).unwrap();
    let draws = pairs_bootstrap(&data, &cfg).unwrap();
    let sandwich = sandwich_parts(&data, &fit).unwrap().vec_beta_cov(data.n());
    let rel = relative_frobenius(draws.var_star(), &sandwich);
    assert!(rel < 0.15, "relative gap {rel} exceeds 15%");
}

/// Percentile and normal interval widths agree once n is moderate.
#[test]
fn interval_widths_agree_at_moderate_n() {
    let spec = FixedDesignSpec::bench_default(500, SEED);
    let data = gen_fixed(&spec).unwrap();
    let fit = fit_ols(&data).unwrap();
    let cfg = BootConfig::new(2000, SEED).unwrap();
    let draws = residual_bootstrap(&fit, data.x(), &cfg).unwrap();
    let boot = draws.percentile_interval(None).unwrap();
    let normal = mvboot::asymptotics::fixed_design_intervals(&fit, 0.05).unwrap();
    for (bw, nw) in boot.widths().iter().zip(normal.widths()) {
        let rel = (bw - nw).abs() / nw;
        assert!(rel < 0.10, "width gap {rel} exceeds 10%");
    }
}

/// Coverage tracks the nominal level away from 95% too: alpha = 0.5
/// intervals cover the truth about half the time.
#[test]
fn coverage_tracks_nominal_at_alpha_half() {
    let design = DesignSpec::Fixed(FixedDesignSpec::bench_default(200, SEED));
    let report = coverage_study(
        &design,
        BootstrapMethod::Residual,
        Some(400),
        200,
        0.5,
        SEED,
    )
    .unwrap();
    for &c in &report.coverage {
        assert!(
            (0.39..=0.61).contains(&c),
            "alpha=0.5 coverage {c} outside [0.39, 0.61]"
        );
    }
}

/// Interval widths shrink like 1/sqrt(n): quadrupling n halves the mean
/// width, within Monte Carlo slack.
#[test]
fn interval_width_scales_with_root_n() {
    let mean_width = |n: usize| -> f64 {
        let spec = FixedDesignSpec::bench_default(n, SEED);
        let data = gen_fixed(&spec).unwrap();
        let fit = fit_ols(&data).unwrap();
        let cfg = BootConfig::new(2000, SEED).unwrap();
        let draws = residual_bootstrap(&fit, data.x(), &cfg).unwrap();
        let w = draws.percentile_interval(None).unwrap().widths();
        w.iter().sum::<f64>() / w.len() as f64
    };
    let w_small = mean_width(400);
    let w_large = mean_width(1600);
    let ratio = w_large / w_small;
    assert!(
        (ratio - 0.5).abs() < 0.075,
        "width ratio {ratio} should be near 0.5"
    );
}

/// The two engines agree with each other on fixed-design data at scale:
/// their percentile intervals target the same limit law when the errors
/// are homoskedastic.
#[test]
fn engines_agree_on_homoskedastic_fixed_design() {
    let spec = FixedDesignSpec::bench_default(2000, SEED);
    let data = gen_fixed(&spec).unwrap();
    let fit = fit_ols(&data).unwrap();
    let cfg = BootConfig::new(4000, SEED).unwrap();
    let res = residual_bootstrap(&fit, data.x(), &cfg)
        .unwrap()
        .percentile_interval(None)
        .unwrap();
    let pairs = pairs_bootstrap(&data, &cfg)
        .unwrap()
        .percentile_interval(None)
        .unwrap();
    for (a, b) in res.components.iter().zip(&pairs.components) {
        let scale = (a.upper - a.lower).max(1e-12);
        assert!(
            (a.lower - b.lower).abs() / scale < 0.15
                && (a.upper - b.upper).abs() / scale < 0.15,
            "engines disagree: ({}, {}) vs ({}, {})",
            a.lower,
            a.upper,
            b.lower,
            b.upper
        );
    }
}
