//! Finite tabular MDPs with exact policy evaluation and value iteration.
//!
//! The model is the standard discounted one: a transition tensor
//! `T(s, a, s')`, a reward table `R(s, a, s')`, a discount `γ < 1`, and a
//! start distribution. Policy evaluation solves the linear system
//! `(I − γ P_π) V = r_π` directly at desk scale and falls back to certified
//! sweeps for larger instances, so every returned value function carries an
//! explicit max-norm Bellman residual bound.
//!
//! Expected returns are always taken against the start distribution:
//! `J(π) = Σ_s initial_dist[s] · V^π(s)`.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, Array3};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance applied to every "rows sum to one" check.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Largest state count solved by direct LU factorization; larger systems use
/// iterative sweeps only.
const DIRECT_SOLVE_MAX_STATES: usize = 512;

/// Hard cap on evaluation / value-iteration sweeps.
const MAX_SWEEPS: usize = 1_000_000;

fn check_distribution(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Validation(format!("{what} is empty")));
    }
    let mut total = 0.0;
    for &p in probs {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::Validation(format!(
                "{what} has invalid entry {p}"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::Validation(format!(
            "{what} sums to {total}, expected 1 within {STOCHASTIC_TOL}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A finite MDP: transition tensor indexed `(s, a, s')`, discount in `[0, 1)`,
/// and a start distribution over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MdpDoc", into = "MdpDoc")]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    transition: Array3<f64>,
    discount: f64,
    initial_dist: Array1<f64>,
}

impl TabularMdp {
    pub fn new(
        transition: Array3<f64>,
        discount: f64,
        initial_dist: Array1<f64>,
    ) -> Result<Self> {
        let (s, a, s2) = transition.dim();
        if s == 0 || a == 0 {
            return Err(Error::Validation(
                "MDP needs at least one state and one action".into(),
            ));
        }
        if s != s2 {
            return Err(Error::Dimension(format!(
                "transition tensor is ({s}, {a}, {s2}); first and last axes must match"
            )));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::Validation(format!(
                "discount {discount} must lie in [0, 1)"
            )));
        }
        for si in 0..s {
            for ai in 0..a {
                let row: Vec<f64> = (0..s).map(|sj| transition[[si, ai, sj]]).collect();
                check_distribution(&row, &format!("transition row (s={si}, a={ai})"))?;
            }
        }
        if initial_dist.len() != s {
            return Err(Error::Dimension(format!(
                "initial_dist has length {}, expected {s}",
                initial_dist.len()
            )));
        }
        check_distribution(initial_dist.as_slice().unwrap(), "initial_dist")?;
        Ok(Self {
            num_states: s,
            num_actions: a,
            transition,
            discount,
            initial_dist,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn transition(&self) -> &Array3<f64> {
        &self.transition
    }

    pub fn initial_dist(&self) -> &Array1<f64> {
        &self.initial_dist
    }

    /// Probability of landing in `next` after taking `action` in `state`.
    pub fn prob(&self, state: usize, action: usize, next: usize) -> f64 {
        self.transition[[state, action, next]]
    }
}

/// A reward on `(s, a, s')` triples; the carrier for every reward-space
/// computation in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RewardDoc", into = "RewardDoc")]
pub struct RewardTable {
    values: Array3<f64>,
}

impl RewardTable {
    pub fn new(values: Array3<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "reward table contains a non-finite entry".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Constant reward `R ≡ value` shaped for `mdp`.
    pub fn constant(mdp: &TabularMdp, value: f64) -> Self {
        Self {
            values: Array3::from_elem(
                (mdp.num_states, mdp.num_actions, mdp.num_states),
                value,
            ),
        }
    }

    pub fn zeros(mdp: &TabularMdp) -> Self {
        Self::constant(mdp, 0.0)
    }

    /// Builds a table entry by entry from `f(s, a, s')`.
    pub fn from_fn(mdp: &TabularMdp, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let values = Array3::from_shape_fn(
            (mdp.num_states, mdp.num_actions, mdp.num_states),
            |(s, a, s2)| f(s, a, s2),
        );
        Self::new(values)
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn get(&self, state: usize, action: usize, next: usize) -> f64 {
        self.values[[state, action, next]]
    }

    pub fn dim(&self) -> (usize, usize, usize) {
        self.values.dim()
    }

    /// `self + scale · other`, entrywise.
    pub fn add_scaled(&self, other: &RewardTable, scale: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "reward tables have shapes {:?} and {:?}",
                self.dim(),
                other.dim()
            )));
        }
        Self::new(&self.values + &(&other.values * scale))
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(&self.values * factor)
    }

    pub fn matches(&self, mdp: &TabularMdp) -> Result<()> {
        let want = (mdp.num_states, mdp.num_actions, mdp.num_states);
        if self.dim() != want {
            return Err(Error::Dimension(format!(
                "reward table shape {:?} does not match MDP shape {:?}",
                self.dim(),
                want
            )));
        }
        Ok(())
    }
}

/// A stationary stochastic policy: one distribution over actions per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolicyDoc", into = "PolicyDoc")]
pub struct Policy {
    probs: Array2<f64>,
}

impl Policy {
    pub fn new(probs: Array2<f64>) -> Result<Self> {
        let (s, a) = probs.dim();
        if s == 0 || a == 0 {
            return Err(Error::Validation("policy must be non-empty".into()));
        }
        for si in 0..s {
            let row: Vec<f64> = (0..a).map(|ai| probs[[si, ai]]).collect();
            check_distribution(&row, &format!("policy row (s={si})"))?;
        }
        Ok(Self { probs })
    }

    /// Uniform-random policy for `mdp`.
    pub fn uniform(mdp: &TabularMdp) -> Self {
        let p = 1.0 / mdp.num_actions as f64;
        Self {
            probs: Array2::from_elem((mdp.num_states, mdp.num_actions), p),
        }
    }

    /// Deterministic policy; `actions[s]` is the action taken in state `s`.
    pub fn deterministic(num_actions: usize, actions: &[usize]) -> Result<Self> {
        let mut probs = Array2::zeros((actions.len(), num_actions));
        for (s, &a) in actions.iter().enumerate() {
            if a >= num_actions {
                return Err(Error::Validation(format!(
                    "action index {a} out of range for {num_actions} actions"
                )));
            }
            probs[[s, a]] = 1.0;
        }
        Self::new(probs)
    }

    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn prob(&self, state: usize, action: usize) -> f64 {
        self.probs[[state, action]]
    }

    /// For a one-hot policy, the action chosen in `state`.
    pub fn action(&self, state: usize) -> usize {
        let row = self.probs.row(state);
        let mut best = 0;
        for (a, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn matches(&self, mdp: &TabularMdp) -> Result<()> {
        let want = (mdp.num_states, mdp.num_actions);
        if self.probs.dim() != want {
            return Err(Error::Dimension(format!(
                "policy shape {:?} does not match MDP shape {:?}",
                self.probs.dim(),
                want
            )));
        }
        Ok(())
    }
}

/// A state-indexed value function in units of discounted return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueVector {
    pub values: Vec<f64>,
}

impl ValueVector {
    pub fn get(&self, state: usize) -> f64 {
        self.values[state]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Evaluation and optimization
// ---------------------------------------------------------------------------

fn check_tol(tol: f64) -> Result<()> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Validation(format!("tol {tol} must be positive")));
    }
    Ok(())
}

/// Expected immediate reward per state under `policy`:
/// `r_π(s) = Σ_a π(a|s) Σ_{s'} T(s,a,s') R(s,a,s')`.
fn expected_reward_vector(mdp: &TabularMdp, reward: &RewardTable, policy: &Policy) -> Array1<f64> {
    let s_n = mdp.num_states;
    let a_n = mdp.num_actions;
    Array1::from_shape_fn(s_n, |s| {
        let mut total = 0.0;
        for a in 0..a_n {
            let pa = policy.probs[[s, a]];
            if pa == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for s2 in 0..s_n {
                inner += mdp.transition[[s, a, s2]] * reward.values[[s, a, s2]];
            }
            total += pa * inner;
        }
        total
    })
}

/// State-to-state transition matrix under `policy`:
/// `P_π(s, s') = Σ_a π(a|s) T(s,a,s')`.
fn policy_transition_matrix(mdp: &TabularMdp, policy: &Policy) -> Array2<f64> {
    let s_n = mdp.num_states;
    let a_n = mdp.num_actions;
    Array2::from_shape_fn((s_n, s_n), |(s, s2)| {
        (0..a_n)
            .map(|a| policy.probs[[s, a]] * mdp.transition[[s, a, s2]])
            .sum()
    })
}

/// Evaluates `policy` exactly: the returned `V` satisfies
/// `‖V − (r_π + γ P_π V)‖∞ ≤ tol`.
///
/// A direct LU solve of `(I − γ P_π) V = r_π` provides the answer up to 512
/// states; the subsequent sweep loop certifies the residual bound regardless
/// of how the starting point was produced.
pub fn policy_evaluation(
    mdp: &TabularMdp,
    reward: &RewardTable,
    policy: &Policy,
    tol: f64,
) -> Result<ValueVector> {
    reward.matches(mdp)?;
    policy.matches(mdp)?;
    check_tol(tol)?;

    let s_n = mdp.num_states;
    let gamma = mdp.discount;
    let r_pi = expected_reward_vector(mdp, reward, policy);
    let p_pi = policy_transition_matrix(mdp, policy);

    let mut v: Array1<f64> = if s_n <= DIRECT_SOLVE_MAX_STATES {
        // (I − γ P_π) is strictly diagonally dominant for γ < 1, so the LU
        // factorization cannot fail; the sweep below still verifies.
        let system = DMatrix::from_fn(s_n, s_n, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - gamma * p_pi[[i, j]]
        });
        let rhs = DVector::from_fn(s_n, |i, _| r_pi[i]);
        match system.lu().solve(&rhs) {
            Some(solution) => Array1::from_iter(solution.iter().copied()),
            None => Array1::zeros(s_n),
        }
    } else {
        Array1::zeros(s_n)
    };

    for _ in 0..MAX_SWEEPS {
        let v_next = &r_pi + &(p_pi.dot(&v) * gamma);
        let delta = (&v_next - &v)
            .iter()
            .fold(0.0f64, |acc, d| acc.max(d.abs()));
        v = v_next;
        if gamma * delta <= tol {
            return Ok(ValueVector {
                values: v.to_vec(),
            });
        }
    }
    Err(Error::IterationLimit {
        max_iter: MAX_SWEEPS,
        gap: f64::NAN,
    })
}

/// Value iteration to a Bellman-optimality residual of at most `tol`.
///
/// Returns the value function together with the greedy one-hot policy read
/// off it; ties break toward the lowest action index.
pub fn value_iteration(
    mdp: &TabularMdp,
    reward: &RewardTable,
    tol: f64,
) -> Result<(ValueVector, Policy)> {
    reward.matches(mdp)?;
    check_tol(tol)?;

    let s_n = mdp.num_states;
    let a_n = mdp.num_actions;
    let gamma = mdp.discount;

    let q_value = |s: usize, a: usize, v: &Array1<f64>| -> f64 {
        let mut q = 0.0;
        for s2 in 0..s_n {
            q += mdp.transition[[s, a, s2]] * (reward.values[[s, a, s2]] + gamma * v[s2]);
        }
        q
    };

    let mut v: Array1<f64> = Array1::zeros(s_n);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let v_next = Array1::from_shape_fn(s_n, |s| {
            (0..a_n)
                .map(|a| q_value(s, a, &v))
                .fold(f64::NEG_INFINITY, f64::max)
        });
        let delta = (&v_next - &v)
            .iter()
            .fold(0.0f64, |acc, d| acc.max(d.abs()));
        v = v_next;
        if gamma * delta <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::IterationLimit {
            max_iter: MAX_SWEEPS,
            gap: f64::NAN,
        });
    }

    let mut greedy = vec![0usize; s_n];
    for (s, slot) in greedy.iter_mut().enumerate() {
        let mut best_a = 0;
        let mut best_q = q_value(s, 0, &v);
        for a in 1..a_n {
            let q = q_value(s, a, &v);
            if q > best_q {
                best_q = q;
                best_a = a;
            }
        }
        *slot = best_a;
    }
    let policy = Policy::deterministic(a_n, &greedy)?;
    Ok((
        ValueVector {
            values: v.to_vec(),
        },
        policy,
    ))
}

/// `J(π) = Σ_s initial_dist[s] · V^π(s)` with `V^π` evaluated at `tol`.
pub fn expected_return(
    mdp: &TabularMdp,
    reward: &RewardTable,
    policy: &Policy,
    tol: f64,
) -> Result<f64> {
    let v = policy_evaluation(mdp, reward, policy, tol)?;
    Ok(mdp
        .initial_dist
        .iter()
        .zip(v.values.iter())
        .map(|(p, value)| p * value)
        .sum())
}

/// Return range `max_π J(π) − min_π J(π)`.
///
/// The maximizing policy comes from value iteration on `reward`; the
/// minimizing one from value iteration on the negated reward. Both are then
/// evaluated exactly on the original reward.
pub fn return_range(mdp: &TabularMdp, reward: &RewardTable, tol: f64) -> Result<f64> {
    let (_, best) = value_iteration(mdp, reward, tol)?;
    let negated = reward.scale(-1.0)?;
    let (_, worst) = value_iteration(mdp, &negated, tol)?;
    let j_max = expected_return(mdp, reward, &best, tol)?;
    let j_min = expected_return(mdp, reward, &worst, tol)?;
    Ok((j_max - j_min).max(0.0))
}

// ---------------------------------------------------------------------------
// Environment generators
// ---------------------------------------------------------------------------

/// Grid actions in fixed order: up, down, left, right.
const GRID_MOVES: [(isize, isize); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

/// Default discount used by both generators.
pub const DEFAULT_DISCOUNT: f64 = 0.9;

/// Deterministic-or-slippery gridworld on a `width × height` board.
///
/// States are cells in row-major order (`s = y·width + x`); the four actions
/// move up/down/left/right and bumping a wall leaves the state unchanged.
/// With probability `slip` the executed move is replaced by one of the four
/// moves chosen uniformly at random.
pub fn make_gridworld(width: usize, height: usize, slip: f64) -> Result<TabularMdp> {
    if width == 0 || height == 0 {
        return Err(Error::Validation(format!(
            "gridworld dimensions {width}×{height} must be positive"
        )));
    }
    if !(0.0..1.0).contains(&slip) {
        return Err(Error::Validation(format!("slip {slip} must lie in [0, 1)")));
    }
    let n = width * height;
    let dest = |s: usize, mv: (isize, isize)| -> usize {
        let x = (s % width) as isize + mv.0;
        let y = (s / width) as isize + mv.1;
        if x < 0 || y < 0 || x >= width as isize || y >= height as isize {
            s
        } else {
            y as usize * width + x as usize
        }
    };

    let mut transition = Array3::zeros((n, 4, n));
    for s in 0..n {
        for (a, &mv) in GRID_MOVES.iter().enumerate() {
            transition[[s, a, dest(s, mv)]] += 1.0 - slip;
            for &slip_mv in &GRID_MOVES {
                transition[[s, a, dest(s, slip_mv)]] += slip / 4.0;
            }
        }
    }
    let initial = Array1::from_elem(n, 1.0 / n as f64);
    TabularMdp::new(transition, DEFAULT_DISCOUNT, initial)
}

/// Seeded random MDP: each transition row draws positive weights, zeroes a
/// `sparsity` fraction of them (always keeping at least one), and normalizes.
/// Identical arguments produce bit-identical MDPs.
pub fn make_random_mdp(
    seed: u64,
    num_states: usize,
    num_actions: usize,
    sparsity: f64,
) -> Result<TabularMdp> {
    if num_states == 0 || num_actions == 0 {
        return Err(Error::Validation(
            "random MDP needs at least one state and one action".into(),
        ));
    }
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::Validation(format!(
            "sparsity {sparsity} must lie in [0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transition = Array3::zeros((num_states, num_actions, num_states));
    let zero_count = ((sparsity * num_states as f64).floor() as usize).min(num_states - 1);
    for s in 0..num_states {
        for a in 0..num_actions {
            // 1 − u maps the RNG's [0, 1) onto (0, 1], so kept weights are
            // strictly positive.
            let mut weights: Vec<f64> = (0..num_states).map(|_| 1.0 - rng.gen::<f64>()).collect();
            if zero_count > 0 {
                for idx in sample(&mut rng, num_states, zero_count) {
                    weights[idx] = 0.0;
                }
            }
            let total: f64 = weights.iter().sum();
            for (s2, w) in weights.iter().enumerate() {
                transition[[s, a, s2]] = w / total;
            }
        }
    }
    let initial = Array1::from_elem(num_states, 1.0 / num_states as f64);
    TabularMdp::new(transition, DEFAULT_DISCOUNT, initial)
}

/// Seeded reward table with entries uniform in `[low, high)`; companion
/// generator for metric property tests.
pub fn make_random_reward(
    seed: u64,
    mdp: &TabularMdp,
    low: f64,
    high: f64,
) -> Result<RewardTable> {
    if !low.is_finite() || !high.is_finite() || low >= high {
        return Err(Error::Validation(format!(
            "reward range [{low}, {high}) is empty"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = Array3::from_shape_fn(
        (mdp.num_states, mdp.num_actions, mdp.num_states),
        |_| low + (high - low) * rng.gen::<f64>(),
    );
    RewardTable::new(values)
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MdpDoc {
    num_states: usize,
    num_actions: usize,
    discount: f64,
    initial_dist: Vec<f64>,
    transition: Vec<Vec<Vec<f64>>>,
}

impl From<TabularMdp> for MdpDoc {
    fn from(mdp: TabularMdp) -> Self {
        let (s_n, a_n, _) = mdp.transition.dim();
        let transition = (0..s_n)
            .map(|s| {
                (0..a_n)
                    .map(|a| (0..s_n).map(|s2| mdp.transition[[s, a, s2]]).collect())
                    .collect()
            })
            .collect();
        MdpDoc {
            num_states: mdp.num_states,
            num_actions: mdp.num_actions,
            discount: mdp.discount,
            initial_dist: mdp.initial_dist.to_vec(),
            transition,
        }
    }
}

pub(crate) fn nested_to_array3(nested: &[Vec<Vec<f64>>], what: &str) -> Result<Array3<f64>> {
    let s_n = nested.len();
    if s_n == 0 {
        return Err(Error::Validation(format!("{what} is empty")));
    }
    let a_n = nested[0].len();
    if a_n == 0 {
        return Err(Error::Validation(format!("{what} has no actions")));
    }
    let s2_n = nested[0][0].len();
    let mut out = Array3::zeros((s_n, a_n, s2_n));
    for (s, per_action) in nested.iter().enumerate() {
        if per_action.len() != a_n {
            return Err(Error::Dimension(format!("{what} is ragged at state {s}")));
        }
        for (a, row) in per_action.iter().enumerate() {
            if row.len() != s2_n {
                return Err(Error::Dimension(format!(
                    "{what} is ragged at (s={s}, a={a})"
                )));
            }
            for (s2, &v) in row.iter().enumerate() {
                out[[s, a, s2]] = v;
            }
        }
    }
    Ok(out)
}

pub(crate) fn array3_to_nested(values: &Array3<f64>) -> Vec<Vec<Vec<f64>>> {
    let (s_n, a_n, s2_n) = values.dim();
    (0..s_n)
        .map(|s| {
            (0..a_n)
                .map(|a| (0..s2_n).map(|s2| values[[s, a, s2]]).collect())
                .collect()
        })
        .collect()
}

impl TryFrom<MdpDoc> for TabularMdp {
    type Error = Error;

    fn try_from(doc: MdpDoc) -> Result<Self> {
        let transition = nested_to_array3(&doc.transition, "transition tensor")?;
        let (s, a, _) = transition.dim();
        if s != doc.num_states || a != doc.num_actions {
            return Err(Error::Dimension(format!(
                "declared shape ({}, {}) does not match tensor shape ({s}, {a})",
                doc.num_states, doc.num_actions
            )));
        }
        TabularMdp::new(transition, doc.discount, Array1::from_vec(doc.initial_dist))
    }
}

#[derive(Serialize, Deserialize)]
struct RewardDoc {
    values: Vec<Vec<Vec<f64>>>,
}

impl From<RewardTable> for RewardDoc {
    fn from(table: RewardTable) -> Self {
        RewardDoc {
            values: array3_to_nested(&table.values),
        }
    }
}

impl TryFrom<RewardDoc> for RewardTable {
    type Error = Error;

    fn try_from(doc: RewardDoc) -> Result<Self> {
        RewardTable::new(nested_to_array3(&doc.values, "reward table")?)
    }
}

#[derive(Serialize, Deserialize)]
struct PolicyDoc {
    probs: Vec<Vec<f64>>,
}

impl From<Policy> for PolicyDoc {
    fn from(policy: Policy) -> Self {
        let (s_n, a_n) = policy.probs.dim();
        PolicyDoc {
            probs: (0..s_n)
                .map(|s| (0..a_n).map(|a| policy.probs[[s, a]]).collect())
                .collect(),
        }
    }
}

impl TryFrom<PolicyDoc> for Policy {
    type Error = Error;

    fn try_from(doc: PolicyDoc) -> Result<Self> {
        let s_n = doc.probs.len();
        if s_n == 0 {
            return Err(Error::Validation("policy is empty".into()));
        }
        let a_n = doc.probs[0].len();
        let mut probs = Array2::zeros((s_n, a_n));
        for (s, row) in doc.probs.iter().enumerate() {
            if row.len() != a_n {
                return Err(Error::Dimension(format!("policy is ragged at state {s}")));
            }
            for (a, &p) in row.iter().enumerate() {
                probs[[s, a]] = p;
            }
        }
        Policy::new(probs)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
