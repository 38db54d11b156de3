//! Per-component confidence interval tables for vec(B_hat).

use serde::Serialize;

/// How an interval table was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IntervalMethod {
    /// Order statistics of bootstrap draws.
    #[serde(rename = "percentile")]
    Percentile,
    /// Normal theory with the fixed-design plug-in covariance (X'X)^(-1) (x) Sigma_hat.
    #[serde(rename = "normal-fixed")]
    NormalFixed,
    /// Normal theory with the sandwich covariance Delta_hat / n.
    #[serde(rename = "normal-sandwich")]
    NormalSandwich,
}

impl std::fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IntervalMethod::Percentile => "percentile",
            IntervalMethod::NormalFixed => "normal-fixed",
            IntervalMethod::NormalSandwich => "normal-sandwich",
        })
    }
}

/// One component of vec(B_hat) with its interval endpoints.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentInterval {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
}

/// Lower/upper bounds for every component of vec(B_hat) under one method.
/// Component order is the column-major stacking of the r x p coefficient
/// matrix: component k pairs response `k mod r` with predictor `k div r`.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalTable {
    pub method: IntervalMethod,
    pub components: Vec<ComponentInterval>,
}

impl IntervalTable {
    pub fn new(method: IntervalMethod, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        let components = lower
            .into_iter()
            .zip(upper)
            .enumerate()
            .map(|(k, (lower, upper))| ComponentInterval {
                label: format!("vec(beta)_{}", k + 1),
                lower,
                upper,
            })
            .collect();
        IntervalTable { method, components }
    }

    /// Replaces the default `vec(beta)_k` labels.
    pub fn with_labels(mut self, labels: &[String]) -> Self {
        assert_eq!(labels.len(), self.components.len());
        for (c, l) in self.components.iter_mut().zip(labels) {
            c.label = l.clone();
        }
        self
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Interval widths per component.
    pub fn widths(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.upper - c.lower).collect()
    }

    /// True when `value` lies inside component k's closed interval.
    ///
    /// Endpoints get a relative guard of `1e-9 * (1 + |value|)` so that a
    /// degenerate interval whose endpoints equal the target up to rounding
    /// (for example under noiseless data) still counts as covering.
    pub fn covers(&self, k: usize, value: f64) -> bool {
        let c = &self.components[k];
        let tol = 1e-9 * (1.0 + value.abs());
        c.lower - tol <= value && value <= c.upper + tol
    }
}
