//! Measure of epsilon-tubes in a bounded function cube, plus projection onto
//! the three-vector agentic subspace.
//!
//! Functions on a finite domain of size `n` with values bounded by `M` are
//! points of the cube `[0, M]^n`. The functions within per-coordinate
//! distance `ε` of an ideal point occupy the box with sides
//! `I_i = [max(0, f_ideal[i] − ε), min(M, f_ideal[i] + ε)]`, whose measure is
//! the product of the side lengths and whose probability under the uniform
//! draw is `(2ε/M)^n` when no side is clipped.
//!
//! All measures and probabilities are carried in log10 throughout: the
//! quantities of interest underflow every fixed-width float in linear space,
//! so linear accumulation is forbidden by contract. The Monte Carlo
//! estimator is the one deliberate exception (it estimates the probability
//! itself) and reports a detection-limit flag instead of pretending to see
//! events rarer than its sample budget resolves.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular values below `RANK_CUTOFF · σ_max` count as zero.
const RANK_CUTOFF: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// The cube `[0, bound_m]^n` together with an ideal point and a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CubeDoc", into = "CubeDoc")]
pub struct FunctionCube {
    f_ideal: Vec<f64>,
    bound_m: f64,
    epsilon: f64,
}

impl FunctionCube {
    pub fn new(f_ideal: Vec<f64>, bound_m: f64, epsilon: f64) -> Result<Self> {
        if f_ideal.is_empty() {
            return Err(Error::Validation("cube dimension must be at least 1".into()));
        }
        if bound_m <= 0.0 || !bound_m.is_finite() {
            return Err(Error::Validation(format!(
                "bound M = {bound_m} must be a positive real"
            )));
        }
        if epsilon <= 0.0 || !epsilon.is_finite() {
            return Err(Error::Validation(format!(
                "epsilon {epsilon} must be a positive real"
            )));
        }
        for (i, &f) in f_ideal.iter().enumerate() {
            if !f.is_finite() || f < 0.0 || f > bound_m {
                return Err(Error::Validation(format!(
                    "f_ideal[{i}] = {f} outside [0, {bound_m}]"
                )));
            }
        }
        Ok(Self {
            f_ideal,
            bound_m,
            epsilon,
        })
    }

    /// Cube whose ideal point sits at the center `M/2` of every coordinate;
    /// interior whenever `2ε < M`.
    pub fn centered(n: usize, bound_m: f64, epsilon: f64) -> Result<Self> {
        Self::new(vec![bound_m / 2.0; n], bound_m, epsilon)
    }

    pub fn n(&self) -> usize {
        self.f_ideal.len()
    }

    pub fn bound_m(&self) -> f64 {
        self.bound_m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn f_ideal(&self) -> &[f64] {
        &self.f_ideal
    }

    /// True when every coordinate satisfies `ε ≤ f_ideal[i] ≤ M − ε`, so no
    /// interval is clipped by the cube boundary.
    pub fn is_interior(&self) -> bool {
        self.f_ideal
            .iter()
            .all(|&f| f - self.epsilon >= 0.0 && f + self.epsilon <= self.bound_m)
    }
}

/// Log-space measure report for one epsilon-tube.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub log10_measure: f64,
    /// `n · log10(M)`, the log-measure of the whole cube.
    pub log10_total: f64,
    pub log10_probability: f64,
    pub interval_lengths: Vec<f64>,
}

/// Empirical counterpart of [`MeasureReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
    /// Set when the analytic probability is below `10 / samples`: the
    /// estimator cannot resolve the event and `estimate = 0` is expected.
    pub underpowered: bool,
}

/// The three basis vectors spanning the agentic subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisDoc", into = "BasisDoc")]
pub struct SubspaceBasis {
    c0: Vec<f64>,
    e0: Vec<f64>,
    a0: Vec<f64>,
}

impl SubspaceBasis {
    pub fn new(c0: Vec<f64>, e0: Vec<f64>, a0: Vec<f64>) -> Result<Self> {
        if c0.is_empty() || c0.len() != e0.len() || c0.len() != a0.len() {
            return Err(Error::Dimension(format!(
                "basis vectors have lengths {}, {}, {}",
                c0.len(),
                e0.len(),
                a0.len()
            )));
        }
        for v in c0.iter().chain(e0.iter()).chain(a0.iter()) {
            if !v.is_finite() {
                return Err(Error::Validation(
                    "basis contains a non-finite entry".into(),
                ));
            }
        }
        Ok(Self { c0, e0, a0 })
    }

    pub fn len(&self) -> usize {
        self.c0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c0.is_empty()
    }

    pub fn vectors(&self) -> [&[f64]; 3] {
        [&self.c0, &self.e0, &self.a0]
    }

    /// Linear combination `alpha·c0 + beta·e0 + gamma·a0`.
    pub fn combine(&self, alpha: f64, beta: f64, gamma: f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| alpha * self.c0[i] + beta * self.e0[i] + gamma * self.a0[i])
            .collect()
    }
}

/// Least-squares projection result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionResult {
    /// Minimum-norm coefficients `(alpha, beta, gamma)`.
    pub coefficients: [f64; 3],
    /// Euclidean distance from the input to the subspace.
    pub residual_norm: f64,
    /// Numerically determined dimension of the span; at most 3.
    pub effective_rank: usize,
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Exact tube measure, accumulated in log10 space.
///
/// Interior coordinates contribute exactly `2ε`, so an all-interior tube
/// reproduces the closed form `log10 P = n·log10(2ε/M)`.
pub fn epsilon_tube_measure(cube: &FunctionCube) -> MeasureReport {
    let eps = cube.epsilon;
    let m = cube.bound_m;
    let mut log10_measure = 0.0;
    let mut interval_lengths = Vec::with_capacity(cube.n());
    for &f in &cube.f_ideal {
        let lo = f - eps;
        let hi = f + eps;
        let length = if lo >= 0.0 && hi <= m {
            2.0 * eps
        } else {
            hi.min(m) - lo.max(0.0)
        };
        log10_measure += length.log10();
        interval_lengths.push(length);
    }
    let log10_total = cube.n() as f64 * m.log10();
    MeasureReport {
        log10_measure,
        log10_total,
        log10_probability: log10_measure - log10_total,
        interval_lengths,
    }
}

/// Seeded uniform sampling of the cube; returns the sup-norm tube hit
/// fraction and its binomial standard error. Deterministic in `seed`.
pub fn monte_carlo_measure(
    cube: &FunctionCube,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::Validation("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = cube.bound_m;
    let eps = cube.epsilon;
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut inside = true;
        for &f in &cube.f_ideal {
            let x = rng.gen::<f64>() * m;
            if (x - f).abs() > eps {
                inside = false;
            }
        }
        if inside {
            hits += 1;
        }
    }
    let n = samples as f64;
    let estimate = hits as f64 / n;
    let std_error = (estimate * (1.0 - estimate) / n).sqrt();
    let analytic = epsilon_tube_measure(cube);
    let underpowered = analytic.log10_probability < (10.0 / n).log10();
    Ok(MonteCarloEstimate {
        estimate,
        std_error,
        hits,
        samples,
        underpowered,
    })
}

/// Least-squares projection of `f` onto `span{c0, e0, a0}` through a
/// rank-revealing SVD. The minimum-norm coefficient vector is returned even
/// when the basis is rank-deficient.
pub fn subspace_projection(basis: &SubspaceBasis, f: &[f64]) -> Result<ProjectionResult> {
    let n = basis.len();
    if f.len() != n {
        return Err(Error::Dimension(format!(
            "vector has length {}, basis has length {n}",
            f.len()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("vector contains a non-finite entry".into()));
    }

    let columns = basis.vectors();
    let matrix = DMatrix::from_fn(n, 3, |i, j| columns[j][i]);
    let target = DVector::from_row_slice(f);
    let norm_f = target.norm();

    let svd = matrix.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    if sigma_max == 0.0 {
        return Ok(ProjectionResult {
            coefficients: [0.0; 3],
            residual_norm: norm_f,
            effective_rank: 0,
        });
    }
    let cutoff = RANK_CUTOFF * sigma_max;
    let effective_rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > cutoff)
        .count();
    let solution = svd
        .solve(&target, cutoff)
        .map_err(|e| Error::Validation(format!("SVD solve failed: {e}")))?;
    let residual_norm = (&target - &matrix * &solution).norm();
    Ok(ProjectionResult {
        coefficients: [solution[0], solution[1], solution[2]],
        residual_norm,
        effective_rank,
    })
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CubeDoc {
    n: usize,
    bound_m: f64,
    f_ideal: Vec<f64>,
    epsilon: f64,
}

impl From<FunctionCube> for CubeDoc {
    fn from(cube: FunctionCube) -> Self {
        CubeDoc {
            n: cube.f_ideal.len(),
            bound_m: cube.bound_m,
            f_ideal: cube.f_ideal,
            epsilon: cube.epsilon,
        }
    }
}

impl TryFrom<CubeDoc> for FunctionCube {
    type Error = Error;

    fn try_from(doc: CubeDoc) -> Result<Self> {
        if doc.n != doc.f_ideal.len() {
            return Err(Error::Dimension(format!(
                "declared n = {} does not match f_ideal length {}",
                doc.n,
                doc.f_ideal.len()
            )));
        }
        FunctionCube::new(doc.f_ideal, doc.bound_m, doc.epsilon)
    }
}

#[derive(Serialize, Deserialize)]
struct BasisDoc {
    c0: Vec<f64>,
    e0: Vec<f64>,
    a0: Vec<f64>,
}

impl From<SubspaceBasis> for BasisDoc {
    fn from(b: SubspaceBasis) -> Self {
        BasisDoc {
            c0: b.c0,
            e0: b.e0,
            a0: b.a0,
        }
    }
}

impl TryFrom<BasisDoc> for SubspaceBasis {
    type Error = Error;

    fn try_from(doc: BasisDoc) -> Result<Self> {
        SubspaceBasis::new(doc.c0, doc.e0, doc.a0)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
