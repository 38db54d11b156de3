//! Large-sample covariance approximations and the interval constructions
//! built on them: fixed-design normal intervals, the heteroskedasticity-
//! robust sandwich for random designs, bootstrap pivot statistics, and a
//! delta method for smooth functionals of the coefficients.
//!
//! Conventions: B_hat is r x p, vec() stacks columns, so component k pairs
//! response k mod r with predictor k div r, and the fixed-design covariance
//! of vec(B_hat) is (X'X)^(-1) (x) Sigma_hat.

use crate::bootstrap::{BootstrapDraws, BootstrapMethod};
use crate::error::{Error, Result};
use crate::intervals::{IntervalMethod, IntervalTable};
use crate::model::{Dataset, FitResult};
use crate::stats::normal_quantile;
use crate::tensorlinalg::{Mat, SpdMat, SPD_PIVOT_REL_TOL};

/// Exact conditional covariance of vec(B_hat) under the fitted error law:
/// (X'X)^(-1) (x) Sigma_hat.
pub fn vec_beta_covariance(fit: &FitResult) -> Result<Mat> {
    let xtx_inv = fit.xtx().inverse()?;
    Ok(xtx_inv.mat().kron(fit.sigma_hat()))
}

/// Normal-theory intervals for every component of vec(B_hat) using the
/// fixed-design covariance. A zero residual covariance collapses each
/// interval to its point estimate.
pub fn fixed_design_intervals(fit: &FitResult, alpha: f64) -> Result<IntervalTable> {
    check_alpha(alpha)?;
    let cov = vec_beta_covariance(fit)?;
    Ok(normal_table(
        IntervalMethod::NormalFixed,
        &fit.vec_beta(),
        &cov,
        alpha,
    ))
}

/// The three factors of the sandwich covariance for random designs.
#[derive(Clone, Debug)]
pub struct SandwichParts {
    w: SpdMat,
    m_hat: Mat,
    delta_hat: Mat,
}

impl SandwichParts {
    /// W = n^(-1) X'X.
    pub fn w(&self) -> &SpdMat {
        &self.w
    }

    /// M_hat = n^(-1) sum_i v_i v_i' with v_i = vec(e_hat_i x_i'), the
    /// score outer-product moment.
    pub fn m_hat(&self) -> &Mat {
        &self.m_hat
    }

    /// Delta_hat = (W^(-1) (x) I_r) M_hat (W^(-1) (x) I_r).
    pub fn delta_hat(&self) -> &Mat {
        &self.delta_hat
    }

    /// Large-sample covariance of vec(B_hat): Delta_hat / n.
    pub fn vec_beta_cov(&self, n: usize) -> Mat {
        self.delta_hat.scale(1.0 / n as f64)
    }
}

/// Computes the sandwich factors from a fitted model and its data.
///
/// With homoskedastic errors the middle factor reduces to
/// W (x) Sigma, and Delta_hat to W^(-1) (x) Sigma.
pub fn sandwich_parts(data: &Dataset, fit: &FitResult) -> Result<SandwichParts> {
    let n = data.n();
    let p = data.p();
    let r = data.r();
    let x = data.x();
    let resid = fit.residuals();
    let w = SpdMat::new(x.gram().scale(1.0 / n as f64))?;

    let rp = r * p;
    let mut m_hat = Mat::zeros(rp, rp);
    let mut v = vec![0.0; rp];
    for i in 0..n {
        for k in 0..p {
            let xik = x.get(i, k);
            for j in 0..r {
                v[j + r * k] = resid.get(i, j) * xik;
            }
        }
        for b in 0..rp {
            if v[b] == 0.0 {
                continue;
            }
            let col = m_hat.col_mut(b);
            for a in 0..rp {
                col[a] += v[a] * v[b];
            }
        }
    }
    m_hat = m_hat.scale(1.0 / n as f64);

    let w_inv = w.inverse()?;
    let outer = w_inv.mat().kron(&Mat::identity(r));
    let delta_hat = outer.matmul(&m_hat).matmul(&outer).symmetrized();
    Ok(SandwichParts { w, m_hat, delta_hat })
}

/// Normal-theory intervals for vec(B_hat) with the sandwich covariance
/// Delta_hat / n.
pub fn sandwich_intervals(data: &Dataset, fit: &FitResult, alpha: f64) -> Result<IntervalTable> {
    check_alpha(alpha)?;
    let parts = sandwich_parts(data, fit)?;
    let cov = parts.vec_beta_cov(data.n());
    Ok(normal_table(
        IntervalMethod::NormalSandwich,
        &fit.vec_beta(),
        &cov,
        alpha,
    ))
}

/// Studentized pivot for every residual-bootstrap replicate:
/// t_b = ((X'X)^(1/2) (x) Sigma_hat*_b^(-1/2)) (vec(B_hat*_b) - vec(B_hat)).
///
/// When the replicate covariances track Sigma_hat, the components of t_b
/// are approximately independent standard normals.
///
/// # Errors
/// [`Error::InvalidConfig`] for pairs draws (the pivot normalization is a
/// fixed-design construction), [`Error::DegenerateResiduals`] when some
/// replicate's Sigma_hat*_b is singular.
pub fn pivot_statistics(draws: &BootstrapDraws, fit: &FitResult) -> Result<Vec<Vec<f64>>> {
    if draws.method() != BootstrapMethod::Residual {
        return Err(Error::InvalidConfig(
            "pivot statistics require residual-bootstrap draws".into(),
        ));
    }
    let r = draws.r();
    let p = draws.p();
    let rp = r * p;
    let xtx_sqrt = fit.xtx().sqrt()?;
    let center = fit.vec_beta();
    let mut out = Vec::with_capacity(draws.draws().len());
    for (d, sigma_star) in draws.draws().iter().zip(draws.sigma_stars()) {
        let inv_sqrt = inverse_psd_sqrt(sigma_star)?;
        let scale = xtx_sqrt.mat().kron(&inv_sqrt);
        let diff: Vec<f64> = d.iter().zip(&center).map(|(a, b)| a - b).collect();
        debug_assert_eq!(diff.len(), rp);
        out.push(scale.matvec(&diff));
    }
    Ok(out)
}

/// Symmetric inverse square root via the spectral decomposition; rejects
/// matrices whose smallest eigenvalue is not safely positive.
fn inverse_psd_sqrt(m: &Mat) -> Result<Mat> {
    let (eig, vecs) = m.symmetrized().jacobi_eigen();
    let max = eig.first().copied().unwrap_or(0.0);
    let min = eig.last().copied().unwrap_or(0.0);
    let tol = SPD_PIVOT_REL_TOL * max.max(0.0);
    // !(min > tol) rather than min <= tol: must also trip on NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(min > tol) || max <= 0.0 {
        return Err(Error::DegenerateResiduals {
            min_eigenvalue: min,
        });
    }
    let k = m.rows();
    let mut out = Mat::zeros(k, k);
    for (idx, lambda) in eig.iter().enumerate() {
        let w = 1.0 / lambda.sqrt();
        let v = vecs.col(idx).to_vec();
        for j in 0..k {
            let col = out.col_mut(j);
            let s = w * v[j];
            for i in 0..k {
                col[i] += v[i] * s;
            }
        }
    }
    Ok(out)
}

/// First-order variance propagation for a smooth map f of the coefficient
/// vector: returns (f(center), G Cov G') where G is the Jacobian of f.
///
/// A supplied Jacobian (rows = outputs, columns = inputs) is cross-checked
/// against central finite differences with step max(1e-6, 1e-6 |x_k|);
/// omit it to use the finite-difference Jacobian directly.
///
/// # Errors
/// [`Error::GradientMismatch`] when a supplied entry disagrees with the
/// finite-difference estimate by more than 1e-4 relative;
/// [`Error::DimensionMismatch`] for inconsistent shapes.
pub fn delta_method(
    center: &[f64],
    cov: &Mat,
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    gradient: Option<&Mat>,
) -> Result<(Vec<f64>, Mat)> {
    let d = center.len();
    if cov.rows() != d || cov.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: cov.rows() * cov.cols(),
        });
    }
    let value = f(center);
    let q = value.len();

    let mut fd = Mat::zeros(q, d);
    let mut lo = center.to_vec();
    let mut hi = center.to_vec();
    for k in 0..d {
        let h = 1e-6_f64.max(1e-6 * center[k].abs());
        hi[k] = center[k] + h;
        lo[k] = center[k] - h;
        let up = f(&hi);
        let down = f(&lo);
        if up.len() != q || down.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                got: up.len(),
            });
        }
        let denom = hi[k] - lo[k];
        for row in 0..q {
            fd.set(row, k, (up[row] - down[row]) / denom);
        }
        hi[k] = center[k];
        lo[k] = center[k];
    }

    let g = match gradient {
        Some(g) => {
            if g.rows() != q || g.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: q * d,
                    got: g.rows() * g.cols(),
                });
            }
            for row in 0..q {
                for col in 0..d {
                    let s = g.get(row, col);
                    let est = fd.get(row, col);
                    if (s - est).abs() > 1e-4 * 1.0_f64.max(s.abs().max(est.abs())) {
                        return Err(Error::GradientMismatch {
                            row,
                            col,
                            supplied: s,
                            finite_difference: est,
                        });
                    }
                }
            }
            g.clone()
        }
        None => fd,
    };

    let out_cov = g.matmul(cov).mul_by_transpose(&g).symmetrized();
    Ok((value, out_cov))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

fn normal_table(method: IntervalMethod, center: &[f64], cov: &Mat, alpha: f64) -> IntervalTable {
    let z = normal_quantile(1.0 - alpha / 2.0);
    let mut lower = Vec::with_capacity(center.len());
    let mut upper = Vec::with_capacity(center.len());
    for (k, &c) in center.iter().enumerate() {
        let half = z * cov.get(k, k).max(0.0).sqrt();
        lower.push(c - half);
        upper.push(c + half);
    }
    IntervalTable::new(method, lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bootstrap::{residual_bootstrap, pairs_bootstrap, BootConfig};
    use crate::model::fit_ols;
    use crate::rng::{standard_normal, stream_rng, STREAM_NOISE};

    fn noisy_dataset(n: usize, p: usize, r: usize, seed: u64) -> Dataset {
        let mut rng = stream_rng(seed, STREAM_NOISE, &[]);
        let x = Mat::from_fn(n, p, |_, _| standard_normal(&mut rng));
        let beta = Mat::from_fn(r, p, |i, j| 0.5 * (i as f64 + 1.0) - 0.3 * j as f64);
        let noise = Mat::from_fn(n, r, |_, _| 0.5 * standard_normal(&mut rng));
        let y = x.mul_by_transpose(&beta).add(&noise);
        Dataset::new(x, y).unwrap()
    }

    #[test]
    fn zero_noise_intervals_are_points() {
        let x = Mat::from_fn(8, 2, |i, j| (i + j + 1) as f64 + ((i * j) as f64).sqrt());
        let beta = Mat::from_rows(&[vec![2.0, -1.0]]);
        let y = x.mul_by_transpose(&beta);
        let data = Dataset::new(x, y).unwrap();
        let fit = fit_ols(&data).unwrap();
        let t = fixed_design_intervals(&fit, 0.05).unwrap();
        for (ci, c) in t.components.iter().zip(fit.vec_beta()) {
            assert!((ci.lower - c).abs() < 1e-9);
            assert!((ci.upper - c).abs() < 1e-9);
        }
    }

    #[test]
    fn scalar_interval_matches_closed_form() {
        // Intercept-only fit: variance of the mean is Sigma_hat / n.
        let x = Mat::from_fn(4, 1, |_, _| 1.0);
        let y = Mat::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![6.0]]);
        let data = Dataset::new(x, y).unwrap();
        let fit = fit_ols(&data).unwrap();
        assert!((fit.sigma_hat().get(0, 0) - 3.5).abs() < 1e-12);
        let t = fixed_design_intervals(&fit, 0.05).unwrap();
        let half = 1.959963984540054 * (3.5_f64 / 4.0).sqrt();
        assert!((t.components[0].lower - (3.0 - half)).abs() < 1e-10);
        assert!((t.components[0].upper - (3.0 + half)).abs() < 1e-10);
    }

    #[test]
    fn covariance_entries_follow_component_pairing() {
        let data = noisy_dataset(60, 2, 2, 11);
        let fit = fit_ols(&data).unwrap();
        let cov = vec_beta_covariance(&fit).unwrap();
        let xtx_inv = fit.xtx().inverse().unwrap();
        let r = data.r();
        // Cov(B[j,a], B[j',a']) = (X'X)^(-1)[a,a'] * Sigma_hat[j,j'].
        for j in 0..r {
            for a in 0..data.p() {
                for j2 in 0..r {
                    for a2 in 0..data.p() {
                        let got = cov.get(j + r * a, j2 + r * a2);
                        let want = xtx_inv.mat().get(a, a2) * fit.sigma_hat().get(j, j2);
                        assert!((got - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn score_moment_matches_direct_accumulation() {
        let data = noisy_dataset(15, 2, 2, 3);
        let fit = fit_ols(&data).unwrap();
        let parts = sandwich_parts(&data, &fit).unwrap();
        let (n, p, r) = (data.n(), data.p(), data.r());
        let rp = r * p;
        let mut direct = Mat::zeros(rp, rp);
        for i in 0..n {
            let mut v = vec![0.0; rp];
            for k in 0..p {
                for j in 0..r {
                    v[j + r * k] = fit.residuals().get(i, j) * data.x().get(i, k);
                }
            }
            for a in 0..rp {
                for b in 0..rp {
                    direct.set(a, b, direct.get(a, b) + v[a] * v[b] / n as f64);
                }
            }
        }
        assert!(parts.m_hat().max_abs_diff(&direct) < 1e-12);
        // W is the scaled gram matrix.
        assert!(
            parts
                .w()
                .mat()
                .max_abs_diff(&data.x().gram().scale(1.0 / n as f64))
                < 1e-12
        );
    }

    #[test]
    fn single_predictor_sandwich_is_white_form() {
        // p = 1: Delta_hat = W^(-2) * n^(-1) sum x_i^2 e_i e_i'.
        let data = noisy_dataset(40, 1, 2, 8);
        let fit = fit_ols(&data).unwrap();
        let parts = sandwich_parts(&data, &fit).unwrap();
        let n = data.n();
        let w: f64 = (0..n).map(|i| data.x().get(i, 0).powi(2)).sum::<f64>() / n as f64;
        let mut mid = Mat::zeros(2, 2);
        for i in 0..n {
            let x2 = data.x().get(i, 0).powi(2);
            for a in 0..2 {
                for b in 0..2 {
                    mid.set(
                        a,
                        b,
                        mid.get(a, b)
                            + x2 * fit.residuals().get(i, a) * fit.residuals().get(i, b)
                                / n as f64,
                    );
                }
            }
        }
        let want = mid.scale(1.0 / (w * w));
        assert!(parts.delta_hat().max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn pivots_match_explicit_formula() {
        let data = noisy_dataset(30, 2, 2, 21);
        let fit = fit_ols(&data).unwrap();
        let cfg = BootConfig::new(16, 77).unwrap();
        let draws = residual_bootstrap(&fit, data.x(), &cfg).unwrap();
        let pivots = pivot_statistics(&draws, &fit).unwrap();
        assert_eq!(pivots.len(), 16);
        let xtx_sqrt = fit.xtx().sqrt().unwrap();
        for (b, t) in pivots.iter().enumerate() {
            let inv_sqrt = inverse_psd_sqrt(&draws.sigma_stars()[b]).unwrap();
            let scale = xtx_sqrt.mat().kron(&inv_sqrt);
            let diff: Vec<f64> = draws.draws()[b]
                .iter()
                .zip(fit.vec_beta())
                .map(|(a, c)| a - c)
                .collect();
            let want = scale.matvec(&diff);
            for (got, w) in t.iter().zip(&want) {
                assert!((got - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pivots_reject_pairs_draws() {
        let data = noisy_dataset(25, 2, 2, 5);
        let fit = fit_ols(&data).unwrap();
        let cfg = BootConfig::new(8, 1).unwrap();
        let draws = pairs_bootstrap(&data, &cfg).unwrap();
        assert!(matches!(
            pivot_statistics(&draws, &fit),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn pivots_reject_degenerate_replicate_covariance() {
        // Noiseless data: every replicate's residual covariance is zero.
        let x = Mat::from_fn(10, 1, |i, _| 1.0 + i as f64);
        let y = x.scale(2.0);
        let data = Dataset::new(x, y).unwrap();
        let fit = fit_ols(&data).unwrap();
        let cfg = BootConfig::new(4, 9).unwrap();
        let draws = residual_bootstrap(&fit, data.x(), &cfg).unwrap();
        assert!(matches!(
            pivot_statistics(&draws, &fit),
            Err(Error::DegenerateResiduals { .. })
        ));
    }

    #[test]
    fn inverse_sqrt_squares_back() {
        let m = Mat::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]);
        let inv_sqrt = inverse_psd_sqrt(&m).unwrap();
        let inv = inv_sqrt.matmul(&inv_sqrt);
        let prod = inv.matmul(&m);
        assert!(prod.max_abs_diff(&Mat::identity(2)) < 1e-12);
    }

    #[test]
    fn delta_identity_preserves_covariance() {
        let cov = Mat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let center = [1.0, -2.0];
        let grad = Mat::identity(2);
        let (val, out) = delta_method(&center, &cov, &|x| x.to_vec(), Some(&grad)).unwrap();
        assert_eq!(val, vec![1.0, -2.0]);
        assert!(out.max_abs_diff(&cov) < 1e-12);
    }

    #[test]
    fn delta_linear_map_transforms_covariance() {
        let cov = Mat::from_rows(&[vec![1.0, 0.2], vec![0.2, 2.0]]);
        let a = Mat::from_rows(&[vec![1.0, 1.0], vec![2.0, -1.0]]);
        let f = |x: &[f64]| vec![x[0] + x[1], 2.0 * x[0] - x[1]];
        let (_, out) = delta_method(&[0.5, 0.5], &cov, &f, None).unwrap();
        let want = a.matmul(&cov).mul_by_transpose(&a);
        assert!(out.max_abs_diff(&want) < 1e-8);
    }

    #[test]
    fn delta_quadratic_matches_gradient() {
        let cov = Mat::from_rows(&[vec![0.7]]);
        let center = [3.0];
        let f = |x: &[f64]| vec![x[0] * x[0]];
        let (val, out) = delta_method(&center, &cov, &f, None).unwrap();
        assert!((val[0] - 9.0).abs() < 1e-12);
        // Var = (2c)^2 * v.
        assert!((out.get(0, 0) - 36.0 * 0.7).abs() < 1e-6);
    }

    #[test]
    fn delta_rejects_wrong_gradient() {
        let cov = Mat::identity(1);
        let bad = Mat::from_rows(&[vec![5.0]]);
        let f = |x: &[f64]| vec![x[0] * x[0]];
        match delta_method(&[3.0], &cov, &f, Some(&bad)) {
            Err(Error::GradientMismatch { row, col, .. }) => {
                assert_eq!((row, col), (0, 0));
            }
            other => panic!("expected GradientMismatch, got {other:?}"),
        }
    }

    #[test]
    fn sandwich_intervals_are_centered() {
        let data = noisy_dataset(80, 2, 2, 40);
        let fit = fit_ols(&data).unwrap();
        let t = sandwich_intervals(&data, &fit, 0.05).unwrap();
        for (ci, c) in t.components.iter().zip(fit.vec_beta()) {
            assert!(ci.lower <= c && c <= ci.upper);
            assert!(((ci.lower + ci.upper) / 2.0 - c).abs() < 1e-10);
        }
    }
}
