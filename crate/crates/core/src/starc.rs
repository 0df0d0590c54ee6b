//! Reward-function distances up to shaping and positive rescaling.
//!
//! The pipeline follows the canonicalize / normalize / measure recipe:
//!
//! ```text
//! c(R)(s,a,s') = E_{S' ~ τ(s,a)}[R(s,a,S') − V^π(s) + γ V^π(S')]
//! s(R)        = c(R) / n(c(R))
//! d(R_F, R_A) = m(s(R_F), s(R_A))
//! ```
//!
//! `V^π` is the value function of a fixed canonical policy (uniform by
//! default). Canonicalization sends every constant reward to zero and is
//! blind to potential shaping `F(s,a,s') = γΦ(s') − Φ(s)`; dividing by the
//! norm removes positive scale. The resulting distance is a pseudometric:
//! rewards in the same shaping/scaling class sit at distance zero.
//!
//! The expectation over `S'` integrates the third index out, so `c(R)` is
//! constant across `s'` for fixed `(s, a)`. That is the printed form of the
//! map and is implemented literally.

use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{ideal_agency_reward, AgencyWeights, BeliefModel, DEFAULT_SMOOTHING};
use crate::mdp::{policy_evaluation, return_range, Policy, RewardTable, TabularMdp};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// The fixed policy whose value function anchors canonicalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalPolicy {
    Uniform,
    Custom(Policy),
}

impl CanonicalPolicy {
    fn realize(&self, mdp: &TabularMdp) -> Result<Policy> {
        match self {
            CanonicalPolicy::Uniform => Ok(Policy::uniform(mdp)),
            CanonicalPolicy::Custom(policy) => {
                policy.matches(mdp)?;
                Ok(policy.clone())
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CanonicalPolicy::Uniform => "uniform",
            CanonicalPolicy::Custom(_) => "custom",
        }
    }
}

/// Norm used to standardize canonicalized rewards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    L1,
    L2,
    /// `n(R) = max_π J(π) − min_π J(π)`.
    ReturnRange,
}

impl Normalizer {
    pub fn label(&self) -> &'static str {
        match self {
            Normalizer::L1 => "l1",
            Normalizer::L2 => "l2",
            Normalizer::ReturnRange => "return_range",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    L1,
    L2,
}

impl DistanceKind {
    pub fn label(&self) -> &'static str {
        match self {
            DistanceKind::L1 => "l1",
            DistanceKind::L2 => "l2",
        }
    }
}

/// Whether entrywise norms weigh each `(s,a,s')` by its transition
/// probability. Weighted norms give zero weight to unreachable transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Unweighted,
    TransitionWeighted,
}

impl Weighting {
    pub fn label(&self) -> &'static str {
        match self {
            Weighting::Unweighted => "unweighted",
            Weighting::TransitionWeighted => "transition_weighted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarcConfig {
    pub canonical_policy: CanonicalPolicy,
    pub normalizer: Normalizer,
    pub distance: DistanceKind,
    pub weighting: Weighting,
    /// Evaluation tolerance; doubles as the triviality threshold on
    /// `n(c(R))`.
    pub tol: f64,
}

impl Default for StarcConfig {
    fn default() -> Self {
        Self {
            canonical_policy: CanonicalPolicy::Uniform,
            normalizer: Normalizer::L2,
            distance: DistanceKind::L2,
            weighting: Weighting::TransitionWeighted,
            tol: 1e-9,
        }
    }
}

impl StarcConfig {
    fn check(&self) -> Result<()> {
        if self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(Error::Validation(format!(
                "starc tol {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Output types
// ---------------------------------------------------------------------------

/// `s(R) = c(R)/n(c(R))`, or the zero table when the canonicalized reward
/// has no norm to divide by.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardizedReward {
    pub values: RewardTable,
    /// The norm `n(c(R))` that was (or would have been) divided out.
    pub norm_used: f64,
    /// Set when `n(c(R)) ≤ tol`; the reward is behaviorally equivalent to
    /// zero and `values` is the zero table.
    pub trivial: bool,
}

/// A state potential `Φ`; induces the shaping term `γΦ(s') − Φ(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialFunction {
    phi: Vec<f64>,
}

impl PotentialFunction {
    pub fn new(phi: Vec<f64>) -> Result<Self> {
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "potential contains a non-finite entry".into(),
            ));
        }
        Ok(Self { phi })
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn negated(&self) -> Self {
        Self {
            phi: self.phi.iter().map(|v| -v).collect(),
        }
    }

    fn matches(&self, mdp: &TabularMdp) -> Result<()> {
        if self.phi.len() != mdp.num_states() {
            return Err(Error::Dimension(format!(
                "potential has length {}, expected {}",
                self.phi.len(),
                mdp.num_states()
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Value-based canonicalization. The output is constant across `s'` for
/// each `(s, a)` because the expectation integrates the successor out.
pub fn canonicalize(
    reward: &RewardTable,
    mdp: &TabularMdp,
    config: &StarcConfig,
) -> Result<RewardTable> {
    reward.matches(mdp)?;
    config.check()?;
    let policy = config.canonical_policy.realize(mdp)?;
    let v = policy_evaluation(mdp, reward, &policy, config.tol)?;
    let gamma = mdp.discount();

    let n_states = mdp.num_states();
    let n_actions = mdp.num_actions();
    let expected = Array2::from_shape_fn((n_states, n_actions), |(s, a)| {
        (0..n_states)
            .map(|s2| {
                mdp.prob(s, a, s2) * (reward.get(s, a, s2) - v.get(s) + gamma * v.get(s2))
            })
            .sum()
    });
    RewardTable::from_fn(mdp, |s, a, _| expected[[s, a]])
}

/// `R + F` with `F(s,a,s') = γΦ(s') − Φ(s)` and `γ` the MDP discount.
/// Shaping with the negated potential undoes the operation.
pub fn apply_potential_shaping(
    reward: &RewardTable,
    phi: &PotentialFunction,
    mdp: &TabularMdp,
) -> Result<RewardTable> {
    reward.matches(mdp)?;
    phi.matches(mdp)?;
    let gamma = mdp.discount();
    RewardTable::from_fn(mdp, |s, a, s2| {
        reward.get(s, a, s2) + gamma * phi.phi[s2] - phi.phi[s]
    })
}

fn weighted_norm(
    values: &Array3<f64>,
    mdp: &TabularMdp,
    kind: DistanceKind,
    weighting: Weighting,
) -> f64 {
    let (n_states, n_actions, _) = values.dim();
    let pair_weight = 1.0 / (n_states as f64 * n_actions as f64);
    let mut total = 0.0;
    for s in 0..n_states {
        for a in 0..n_actions {
            for s2 in 0..n_states {
                let w = match weighting {
                    Weighting::Unweighted => 1.0,
                    Weighting::TransitionWeighted => mdp.prob(s, a, s2) * pair_weight,
                };
                let x = values[[s, a, s2]];
                total += match kind {
                    DistanceKind::L1 => w * x.abs(),
                    DistanceKind::L2 => w * x * x,
                };
            }
        }
    }
    match kind {
        DistanceKind::L1 => total,
        DistanceKind::L2 => total.sqrt(),
    }
}

fn normalizer_value(
    canonical: &RewardTable,
    mdp: &TabularMdp,
    config: &StarcConfig,
) -> Result<f64> {
    match config.normalizer {
        Normalizer::L1 => Ok(weighted_norm(
            canonical.values(),
            mdp,
            DistanceKind::L1,
            config.weighting,
        )),
        Normalizer::L2 => Ok(weighted_norm(
            canonical.values(),
            mdp,
            DistanceKind::L2,
            config.weighting,
        )),
        Normalizer::ReturnRange => return_range(mdp, canonical, config.tol),
    }
}

/// Canonicalize, then divide by the configured norm. Rewards whose
/// canonicalized norm falls at or below `config.tol` come back as the
/// flagged zero table rather than an error.
pub fn standardize(
    reward: &RewardTable,
    mdp: &TabularMdp,
    config: &StarcConfig,
) -> Result<StandardizedReward> {
    let canonical = canonicalize(reward, mdp, config)?;
    let norm = normalizer_value(&canonical, mdp, config)?;
    if norm <= config.tol {
        return Ok(StandardizedReward {
            values: RewardTable::zeros(mdp),
            norm_used: norm,
            trivial: true,
        });
    }
    Ok(StandardizedReward {
        values: canonical.scale(1.0 / norm)?,
        norm_used: norm,
        trivial: false,
    })
}

/// A distance evaluation together with both standardized operands.
#[derive(Debug, Clone, Serialize)]
pub struct StarcComparison {
    pub distance: f64,
    pub standardized_f: StandardizedReward,
    pub standardized_a: StandardizedReward,
}

/// Distance in standardized-reward space under the configured norm.
pub fn starc_comparison(
    reward_f: &RewardTable,
    reward_a: &RewardTable,
    mdp: &TabularMdp,
    config: &StarcConfig,
) -> Result<StarcComparison> {
    let standardized_f = standardize(reward_f, mdp, config)?;
    let standardized_a = standardize(reward_a, mdp, config)?;
    let diff = standardized_f
        .values
        .add_scaled(&standardized_a.values, -1.0)?;
    let distance = weighted_norm(diff.values(), mdp, config.distance, config.weighting);
    Ok(StarcComparison {
        distance,
        standardized_f,
        standardized_a,
    })
}

/// Scalar form of [`starc_comparison`].
pub fn starc_distance(
    reward_f: &RewardTable,
    reward_a: &RewardTable,
    mdp: &TabularMdp,
    config: &StarcConfig,
) -> Result<f64> {
    starc_comparison(reward_f, reward_a, mdp, config).map(|c| c.distance)
}

/// Agenticity of `candidate`: its distance to the reward induced by the
/// agency objective. Zero means the candidate is behaviorally the ideal
/// agentic reward; larger is less agentic.
pub fn agency_metric(
    candidate: &RewardTable,
    mdp: &TabularMdp,
    belief: &BeliefModel,
    weights: &AgencyWeights,
    horizon: usize,
    mesa_reward: Option<&RewardTable>,
    config: &StarcConfig,
) -> Result<f64> {
    let ideal = ideal_agency_reward(
        mdp,
        belief,
        weights,
        horizon,
        mesa_reward,
        DEFAULT_SMOOTHING,
        config.tol,
    )?;
    starc_distance(candidate, &ideal, mdp, config)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{make_random_mdp, make_random_reward};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_abs_diff(a: &RewardTable, b: &RewardTable) -> f64 {
        a.values()
            .iter()
            .zip(b.values().iter())
            .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
    }

    fn random_potential(seed: u64, len: usize) -> PotentialFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PotentialFunction::new((0..len).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap()
    }

    #[test]
    fn canonicalize_zero_stays_zero() {
        let mdp = make_random_mdp(1, 4, 2, 0.0).unwrap();
        let config = StarcConfig::default();
        let c = canonicalize(&RewardTable::zeros(&mdp), &mdp, &config).unwrap();
        assert!(c.values().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn canonicalize_annihilates_constants() {
        let mdp = make_random_mdp(2, 5, 3, 0.1).unwrap();
        let config = StarcConfig::default();
        for k in [-5.0, 0.1, 7.0] {
            let c = canonicalize(&RewardTable::constant(&mdp, k), &mdp, &config).unwrap();
            let max = c.values().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            assert!(max <= 1e-8, "constant {k} canonicalized to max |{max}|");
        }
    }

    #[test]
    fn canonicalize_ignores_shaping() {
        let mdp = make_random_mdp(7, 4, 2, 0.0).unwrap();
        let reward = make_random_reward(8, &mdp, -1.0, 1.0).unwrap();
        let phi = random_potential(9, 4);
        let shaped = apply_potential_shaping(&reward, &phi, &mdp).unwrap();
        let config = StarcConfig::default();
        let c_plain = canonicalize(&reward, &mdp, &config).unwrap();
        let c_shaped = canonicalize(&shaped, &mdp, &config).unwrap();
        assert!(max_abs_diff(&c_plain, &c_shaped) <= 1e-8);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mdp = make_random_mdp(11, 5, 2, 0.2).unwrap();
        let reward = make_random_reward(12, &mdp, -3.0, 3.0).unwrap();
        let config = StarcConfig::default();
        let once = canonicalize(&reward, &mdp, &config).unwrap();
        let twice = canonicalize(&once, &mdp, &config).unwrap();
        assert!(max_abs_diff(&once, &twice) <= 1e-8);
    }

    #[test]
    fn shaping_with_zero_potential_is_identity() {
        let mdp = make_random_mdp(3, 3, 2, 0.0).unwrap();
        let reward = make_random_reward(4, &mdp, -1.0, 1.0).unwrap();
        let phi = PotentialFunction::new(vec![0.0; 3]).unwrap();
        let shaped = apply_potential_shaping(&reward, &phi, &mdp).unwrap();
        assert_eq!(reward, shaped);
    }

    #[test]
    fn shaping_with_constant_potential_shifts_uniformly() {
        let mdp = make_random_mdp(3, 3, 2, 0.0).unwrap();
        let reward = make_random_reward(4, &mdp, -1.0, 1.0).unwrap();
        let k = 2.5;
        let phi = PotentialFunction::new(vec![k; 3]).unwrap();
        let shaped = apply_potential_shaping(&reward, &phi, &mdp).unwrap();
        let shift = (mdp.discount() - 1.0) * k;
        for (x, y) in reward.values().iter().zip(shaped.values().iter()) {
            assert_abs_diff_eq!(y - x, shift, epsilon = 1e-12);
        }
    }

    #[test]
    fn shaping_round_trip() {
        let mdp = make_random_mdp(5, 4, 2, 0.0).unwrap();
        let reward = make_random_reward(6, &mdp, -2.0, 2.0).unwrap();
        let phi = random_potential(7, 4);
        let there = apply_potential_shaping(&reward, &phi, &mdp).unwrap();
        let back = apply_potential_shaping(&there, &phi.negated(), &mdp).unwrap();
        assert!(max_abs_diff(&reward, &back) <= 1e-14);
    }

    #[test]
    fn standardize_constant_is_trivial() {
        let mdp = make_random_mdp(13, 4, 2, 0.0).unwrap();
        let config = StarcConfig::default();
        let s = standardize(&RewardTable::constant(&mdp, 3.0), &mdp, &config).unwrap();
        assert!(s.trivial);
        assert!(s.values.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn standardize_removes_positive_scale() {
        let mdp = make_random_mdp(17, 4, 2, 0.0).unwrap();
        let reward = make_random_reward(18, &mdp, -1.0, 1.0).unwrap();
        let doubled = reward.scale(2.0).unwrap();
        let config = StarcConfig::default();
        let a = standardize(&reward, &mdp, &config).unwrap();
        let b = standardize(&doubled, &mdp, &config).unwrap();
        assert!(!a.trivial && !b.trivial);
        assert!(max_abs_diff(&a.values, &b.values) <= 1e-9);
        assert_abs_diff_eq!(b.norm_used, 2.0 * a.norm_used, epsilon = 1e-9);
    }

    #[test]
    fn standardize_unit_norm() {
        let mdp = make_random_mdp(19, 5, 3, 0.1).unwrap();
        let reward = make_random_reward(20, &mdp, -4.0, 4.0).unwrap();
        let config = StarcConfig::default();
        let s = standardize(&reward, &mdp, &config).unwrap();
        let norm = weighted_norm(s.values.values(), &mdp, DistanceKind::L2, config.weighting);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn normalizers_are_scale_equivariant() {
        let mdp = make_random_mdp(23, 4, 2, 0.0).unwrap();
        let reward = make_random_reward(24, &mdp, -1.0, 1.0).unwrap();
        let factor = 3.7;
        let scaled = reward.scale(factor).unwrap();
        for normalizer in [Normalizer::L1, Normalizer::L2, Normalizer::ReturnRange] {
            let config = StarcConfig {
                normalizer,
                ..StarcConfig::default()
            };
            let c = canonicalize(&reward, &mdp, &config).unwrap();
            let c_scaled = canonicalize(&scaled, &mdp, &config).unwrap();
            let n = normalizer_value(&c, &mdp, &config).unwrap();
            let n_scaled = normalizer_value(&c_scaled, &mdp, &config).unwrap();
            assert_abs_diff_eq!(n_scaled, factor * n, epsilon = 1e-8);
        }
    }

    #[test]
    fn distance_to_self_is_zero() {
        let mdp = make_random_mdp(29, 4, 2, 0.0).unwrap();
        let reward = make_random_reward(30, &mdp, -1.0, 1.0).unwrap();
        let config = StarcConfig::default();
        let d = starc_distance(&reward, &reward, &mdp, &config).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_ignores_scale_and_shaping() {
        let mdp = make_random_mdp(31, 5, 2, 0.0).unwrap();
        let reward = make_random_reward(32, &mdp, -1.0, 1.0).unwrap();
        let phi = random_potential(33, 5);
        let shaped = apply_potential_shaping(&reward.scale(3.0).unwrap(), &phi, &mdp).unwrap();
        let config = StarcConfig::default();
        let d = starc_distance(&reward, &shaped, &mdp, &config).unwrap();
        assert!(d <= 1e-6, "distance {d} should vanish on the shaping class");
    }

    #[test]
    fn distance_is_exactly_symmetric() {
        let mdp = make_random_mdp(37, 4, 2, 0.0).unwrap();
        let a = make_random_reward(38, &mdp, -1.0, 1.0).unwrap();
        let b = make_random_reward(39, &mdp, -1.0, 1.0).unwrap();
        let config = StarcConfig::default();
        let ab = starc_distance(&a, &b, &mdp, &config).unwrap();
        let ba = starc_distance(&b, &a, &mdp, &config).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn triangle_inequality_on_seeded_triples() {
        let config = StarcConfig::default();
        for seed in 0..10u64 {
            let mdp = make_random_mdp(100 + seed, 4, 2, 0.0).unwrap();
            let a = make_random_reward(200 + seed, &mdp, -1.0, 1.0).unwrap();
            let b = make_random_reward(300 + seed, &mdp, -1.0, 1.0).unwrap();
            let c = make_random_reward(400 + seed, &mdp, -1.0, 1.0).unwrap();
            let ab = starc_distance(&a, &b, &mdp, &config).unwrap();
            let bc = starc_distance(&b, &c, &mdp, &config).unwrap();
            let ac = starc_distance(&a, &c, &mdp, &config).unwrap();
            assert!(ac <= ab + bc + 1e-9, "seed {seed}: {ac} > {ab} + {bc}");
        }
    }

    #[test]
    fn one_trivial_operand_gives_the_other_norm() {
        let mdp = make_random_mdp(41, 4, 2, 0.0).unwrap();
        let reward = make_random_reward(42, &mdp, -1.0, 1.0).unwrap();
        let constant = RewardTable::constant(&mdp, 1.0);
        let config = StarcConfig::default();
        let comparison = starc_comparison(&reward, &constant, &mdp, &config).unwrap();
        assert!(comparison.standardized_a.trivial);
        // Distance to the zero table is the standardized norm, which is 1.
        assert_abs_diff_eq!(comparison.distance, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn agency_metric_zero_for_the_ideal_reward() {
        let mdp = crate::mdp::make_gridworld(2, 2, 0.1).unwrap();
        let belief = BeliefModel::from_mdp(&mdp);
        let weights = AgencyWeights::new(1.0, 1.0, 0.0).unwrap();
        let config = StarcConfig::default();
        let ideal =
            ideal_agency_reward(&mdp, &belief, &weights, 1, None, DEFAULT_SMOOTHING, config.tol)
                .unwrap();
        let d = agency_metric(&ideal, &mdp, &belief, &weights, 1, None, &config).unwrap();
        assert!(d <= 1e-9, "self-distance {d}");

        // Scaled and shaped copies stay in the zero class.
        let phi = random_potential(44, 4);
        let disguised =
            apply_potential_shaping(&ideal.scale(5.0).unwrap(), &phi, &mdp).unwrap();
        let d = agency_metric(&disguised, &mdp, &belief, &weights, 1, None, &config).unwrap();
        assert!(d <= 1e-6, "disguised distance {d}");
    }

    #[test]
    fn agency_metric_positive_and_reproducible_for_random_candidate() {
        let mdp = crate::mdp::make_gridworld(3, 3, 0.0).unwrap();
        let belief = BeliefModel::from_mdp(&mdp);
        let weights = AgencyWeights::new(1.0, 1.0, 0.0).unwrap();
        let config = StarcConfig::default();
        let candidate = make_random_reward(45, &mdp, -1.0, 1.0).unwrap();
        let d1 = agency_metric(&candidate, &mdp, &belief, &weights, 1, None, &config).unwrap();
        let d2 = agency_metric(&candidate, &mdp, &belief, &weights, 1, None, &config).unwrap();
        assert!(d1 > 0.0);
        assert_eq!(d1.to_bits(), d2.to_bits(), "must be bit-identical");
    }
}
