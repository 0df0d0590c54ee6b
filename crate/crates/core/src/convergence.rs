//! Closed-form approximation-rate calculators.
//!
//! Three scalar estimates, each instantiated at equality with all asymptotic
//! constants set to one (callers must treat results as
//! bound-at-equality figures, not achievable guarantees):
//!
//! - the accuracy `ε` reachable by a depth-`L`, `N`-parameter network under
//!   the bounded-depth lower bound `N = ε^{−1/(2(L−2))}`, solved for `ε`;
//! - the complexity scaling `log(1/ε)` of smooth targets;
//! - the dense `d/T` versus sparse `s·ln(d)/T` first-order rate comparison.
//!
//! Parameter counts and accuracies are carried in log10: the headline
//! instantiation (`L = 20`, `N = 10^10`) produces `ε = 10^-360`, far below
//! linear-space representability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depth and parameter count of a network shape. The parameter count is
/// held as log10 only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkShape {
    depth_l: u32,
    log10_params: f64,
}

impl NetworkShape {
    /// From a linear parameter count. Exact powers of ten are snapped to
    /// integer exponents so log-space arithmetic stays exact.
    pub fn new(depth_l: u32, params_n: f64) -> Result<Self> {
        if params_n <= 0.0 || !params_n.is_finite() {
            return Err(Error::Validation(format!(
                "parameter count {params_n} must be a positive real"
            )));
        }
        Self::from_log10_params(depth_l, log10_snapped(params_n))
    }

    pub fn from_log10_params(depth_l: u32, log10_params: f64) -> Result<Self> {
        if depth_l < 3 {
            return Err(Error::Domain(format!(
                "depth {depth_l} < 3 leaves the exponent 1/(2(L−2)) undefined or degenerate"
            )));
        }
        if !log10_params.is_finite() {
            return Err(Error::Validation("log10 parameter count must be finite".into()));
        }
        Ok(Self {
            depth_l,
            log10_params,
        })
    }

    pub fn depth_l(&self) -> u32 {
        self.depth_l
    }

    pub fn log10_params(&self) -> f64 {
        self.log10_params
    }
}

fn log10_snapped(n: f64) -> f64 {
    let raw = n.log10();
    let rounded = raw.round();
    if rounded.abs() <= 300.0 && 10f64.powi(rounded as i32) == n {
        rounded
    } else {
        raw
    }
}

/// Base for reported complexity logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    Natural,
    Ten,
}

impl LogBase {
    pub fn label(&self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Ten => "ten",
        }
    }
}

/// Solves the bounded-depth size bound at equality for the accuracy:
/// `log10 ε = −2(L−2)·log10 N`.
pub fn bounded_depth_epsilon(shape: &NetworkShape) -> f64 {
    -2.0 * (shape.depth_l as f64 - 2.0) * shape.log10_params
}

/// `log(1/ε)` in the requested base, taken directly from the log10 input so
/// `ε` itself is never materialized. Up to unspecified Θ-constants.
pub fn log_complexity(epsilon_log10: f64, base: LogBase) -> Result<f64> {
    if !epsilon_log10.is_finite() {
        return Err(Error::Validation("log10 epsilon must be finite".into()));
    }
    if epsilon_log10 > 0.0 {
        return Err(Error::Domain(format!(
            "epsilon = 10^{epsilon_log10} > 1 is outside the approximation regime"
        )));
    }
    Ok(match base {
        LogBase::Ten => -epsilon_log10,
        LogBase::Natural => -epsilon_log10 * std::f64::consts::LN_10,
    })
}

/// Dimension, sparsity, and iteration budget of a rate query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateQuery {
    dim_d: f64,
    sparsity_s: f64,
    iterations_t: f64,
}

impl RateQuery {
    pub fn new(dim_d: f64, sparsity_s: f64, iterations_t: f64) -> Result<Self> {
        for (name, v) in [("d", dim_d), ("s", sparsity_s), ("T", iterations_t)] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "{name} = {v} must be a positive real"
                )));
            }
        }
        if sparsity_s > dim_d {
            return Err(Error::Validation(format!(
                "sparsity {sparsity_s} exceeds dimension {dim_d}"
            )));
        }
        Ok(Self {
            dim_d,
            sparsity_s,
            iterations_t,
        })
    }

    pub fn dim_d(&self) -> f64 {
        self.dim_d
    }

    pub fn sparsity_s(&self) -> f64 {
        self.sparsity_s
    }

    pub fn iterations_t(&self) -> f64 {
        self.iterations_t
    }
}

/// First-order rates with Θ-constants set to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateComparison {
    /// `d / T`.
    pub dense_rate: f64,
    /// `s · ln(d) / T`.
    pub sparse_rate: f64,
    /// `d / (s · ln d)`; computed directly so it is independent of `T`.
    pub speedup: f64,
}

pub fn sparse_rate_compare(query: &RateQuery) -> Result<RateComparison> {
    if query.dim_d <= 1.0 {
        return Err(Error::Domain(format!(
            "dimension {} must exceed 1 for a meaningful logarithm",
            query.dim_d
        )));
    }
    let log_d = query.dim_d.ln();
    Ok(RateComparison {
        dense_rate: query.dim_d / query.iterations_t,
        sparse_rate: query.sparsity_s * log_d / query.iterations_t,
        speedup: query.dim_d / (query.sparsity_s * log_d),
    })
}
