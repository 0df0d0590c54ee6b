//! Intrinsic quantities: curiosity, empowerment, and the agency objective.
//!
//! Curiosity is the smoothed KL divergence from the true outcome
//! distribution `p` to the predicted one `q`:
//!
//! ```text
//! L_Curiosity = Σ_x p(x) · [ln p(x) − ln(q(x) + ε)]        (0·ln 0 = 0)
//! ```
//!
//! Empowerment is the capacity of the channel from length-`n` action
//! sequences to the state reached after `n` steps,
//! `𝔈 = max_{p(aⁿ)} I(Aⁿ; S_{t+n})`, computed by Blahut–Arimoto with a
//! certified upper/lower bound gap. Mutual information itself is evaluated
//! through the entropy decomposition `I = H(S_next) − H(S_next | A)`, which
//! doubles as an independent check on the capacity iteration.
//!
//! The composite objective is `A = α·L_Curiosity + β·L_Empowerment +
//! γ·L_Mesa` with `L_Empowerment = −𝔈`, so minimizing `A` drives surprise
//! down and channel capacity up.
//!
//! All internal quantities are in nats; bits are a reporting conversion.

use ndarray::{Array1, Array2, Array3};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mdp::{RewardTable, TabularMdp, STOCHASTIC_TOL};

/// Natural log of 2; the bits↔nats conversion factor.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Default smoothing constant added inside logarithms.
pub const DEFAULT_SMOOTHING: f64 = 1e-9;

/// Default cap on the number of enumerated action sequences.
pub const DEFAULT_ENUMERATION_CAP: usize = 4096;

/// Default iteration budget for the capacity iteration.
pub const DEFAULT_CAPACITY_MAX_ITER: usize = 10_000;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A probability distribution over finitely many outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionDoc", into = "DistributionDoc")]
pub struct Distribution {
    probs: Array1<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_row(&probs, "distribution")?;
        Ok(Self {
            probs: Array1::from_vec(probs),
        })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Validation("distribution must be non-empty".into()));
        }
        Ok(Self {
            probs: Array1::from_elem(len, 1.0 / len as f64),
        })
    }

    /// One-hot distribution concentrated on `index`.
    pub fn point_mass(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::Validation(format!(
                "index {index} out of range for length {len}"
            )));
        }
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Self::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn probs(&self) -> &Array1<f64> {
        &self.probs
    }
}

fn validate_row(row: &[f64], what: &str) -> Result<()> {
    if row.is_empty() {
        return Err(Error::Validation(format!("{what} is empty")));
    }
    let mut total = 0.0;
    for &p in row {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::Validation(format!("{what} has invalid entry {p}")));
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

/// A discrete memoryless channel: one outcome distribution per input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelDoc", into = "ChannelDoc")]
pub struct ChannelMatrix {
    rows: Array2<f64>,
}

impl ChannelMatrix {
    pub fn new(rows: Array2<f64>) -> Result<Self> {
        let (n_in, n_out) = rows.dim();
        if n_in == 0 || n_out == 0 {
            return Err(Error::Validation(
                "channel needs at least one input and one output".into(),
            ));
        }
        for x in 0..n_in {
            let row: Vec<f64> = (0..n_out).map(|y| rows[[x, y]]).collect();
            validate_row(&row, &format!("channel row {x}"))?;
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_in = rows.len();
        if n_in == 0 {
            return Err(Error::Validation("channel has no rows".into()));
        }
        let n_out = rows[0].len();
        let mut out = Array2::zeros((n_in, n_out));
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n_out {
                return Err(Error::Dimension(format!("channel row {x} is ragged")));
            }
            for (y, &p) in row.iter().enumerate() {
                out[[x, y]] = p;
            }
        }
        Self::new(out)
    }

    pub fn num_inputs(&self) -> usize {
        self.rows.dim().0
    }

    pub fn num_outputs(&self) -> usize {
        self.rows.dim().1
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.rows[[input, output]]
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }
}

/// Output of the capacity iteration. `capacity_nats` is certified to lie
/// within `achieved_tol` of the true channel capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub capacity_nats: f64,
    pub input_dist: Distribution,
    pub iterations: usize,
    pub achieved_tol: f64,
}

impl CapacityResult {
    pub fn capacity_bits(&self) -> f64 {
        self.capacity_nats / LN_2
    }
}

impl Serialize for CapacityResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CapacityResult", 5)?;
        s.serialize_field("capacity_bits", &self.capacity_bits())?;
        s.serialize_field("capacity_nats", &self.capacity_nats)?;
        s.serialize_field("input_dist", &self.input_dist.probs.to_vec())?;
        s.serialize_field("iterations", &self.iterations)?;
        s.serialize_field("achieved_tol", &self.achieved_tol)?;
        s.end()
    }
}

/// Coefficients of the agency objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgencyWeights {
    alpha: f64,
    beta: f64,
    gamma_mesa: f64,
}

impl AgencyWeights {
    pub fn new(alpha: f64, beta: f64, gamma_mesa: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || !gamma_mesa.is_finite() {
            return Err(Error::Validation("weights must be finite".into()));
        }
        if alpha < 0.0 || beta < 0.0 {
            return Err(Error::Validation(
                "alpha and beta must be non-negative".into(),
            ));
        }
        Ok(Self {
            alpha,
            beta,
            gamma_mesa,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma_mesa(&self) -> f64 {
        self.gamma_mesa
    }
}

/// The agent's next-state belief `q(s' | s, a)`, one distribution per
/// state-action pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BeliefDoc", into = "BeliefDoc")]
pub struct BeliefModel {
    predicted: Array3<f64>,
}

impl BeliefModel {
    pub fn new(predicted: Array3<f64>) -> Result<Self> {
        let (s, a, s2) = predicted.dim();
        if s == 0 || a == 0 || s2 == 0 {
            return Err(Error::Validation("belief tensor is empty".into()));
        }
        for si in 0..s {
            for ai in 0..a {
                let row: Vec<f64> = (0..s2).map(|sj| predicted[[si, ai, sj]]).collect();
                validate_row(&row, &format!("belief row (s={si}, a={ai})"))?;
            }
        }
        Ok(Self { predicted })
    }

    /// The oracle belief: exactly the environment's transition tensor.
    pub fn from_mdp(mdp: &TabularMdp) -> Self {
        Self {
            predicted: mdp.transition().clone(),
        }
    }

    pub fn predicted(&self) -> &Array3<f64> {
        &self.predicted
    }

    pub fn get(&self, state: usize, action: usize, next: usize) -> f64 {
        self.predicted[[state, action, next]]
    }

    pub fn matches(&self, mdp: &TabularMdp) -> Result<()> {
        let want = (mdp.num_states(), mdp.num_actions(), mdp.num_states());
        if self.predicted.dim() != want {
            return Err(Error::Dimension(format!(
                "belief shape {:?} does not match MDP shape {:?}",
                self.predicted.dim(),
                want
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Curiosity
// ---------------------------------------------------------------------------

/// Smoothed KL divergence `Σ p(x)·[ln p(x) − ln(q(x) + smoothing)]` in nats.
///
/// With `smoothing = 0` this is the exact divergence and is only defined
/// when `q` is positive on the support of `p`; a zero there raises
/// [`Error::Singularity`] rather than returning infinity.
pub fn curiosity_kl(p: &Distribution, q: &Distribution, smoothing: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "distributions have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    if !smoothing.is_finite() || smoothing < 0.0 {
        return Err(Error::Validation(format!(
            "smoothing {smoothing} must be non-negative"
        )));
    }
    let mut total = 0.0;
    for i in 0..p.len() {
        let pi = p.get(i);
        if pi == 0.0 {
            continue;
        }
        let qi = q.get(i) + smoothing;
        if qi <= 0.0 {
            return Err(Error::Singularity(format!(
                "q({i}) = 0 on the support of p with smoothing 0"
            )));
        }
        total += pi * (pi.ln() - qi.ln());
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Mutual information and channel capacity
// ---------------------------------------------------------------------------

/// Shannon entropy `−Σ p ln p` in nats, with `0·ln 0 = 0`.
fn entropy_nats(probs: impl Iterator<Item = f64>) -> f64 {
    probs.fold(0.0, |acc, p| {
        if p > 0.0 {
            acc - p * p.ln()
        } else {
            acc
        }
    })
}

/// Mutual information `I = H(S_next) − H(S_next | A)` in nats, computed as
/// exactly that entropy difference.
pub fn mutual_information(input_dist: &Distribution, channel: &ChannelMatrix) -> Result<f64> {
    if input_dist.len() != channel.num_inputs() {
        return Err(Error::Dimension(format!(
            "input distribution has length {}, channel has {} inputs",
            input_dist.len(),
            channel.num_inputs()
        )));
    }
    let n_out = channel.num_outputs();
    let marginal = Array1::from_shape_fn(n_out, |y| {
        (0..input_dist.len())
            .map(|x| input_dist.get(x) * channel.get(x, y))
            .sum()
    });
    let h_output = entropy_nats(marginal.iter().copied());
    let h_conditional: f64 = (0..input_dist.len())
        .map(|x| input_dist.get(x) * entropy_nats((0..n_out).map(|y| channel.get(x, y))))
        .sum();
    Ok((h_output - h_conditional).max(0.0))
}

/// Channel capacity by alternating maximization, certified by the standard
/// per-iteration bounds: with `c_x = D(W(·|x) ‖ q)` for the current output
/// marginal `q`, the capacity lies between `Σ_x p_x c_x` and `max_x c_x`.
/// Stops when the gap closes to `tol` (in nats), starting from the uniform
/// input distribution.
pub fn blahut_arimoto(
    channel: &ChannelMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<CapacityResult> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Validation(format!("tol {tol} must be positive")));
    }
    if max_iter == 0 {
        return Err(Error::Validation("max_iter must be at least 1".into()));
    }

    let n_in = channel.num_inputs();
    let n_out = channel.num_outputs();
    let mut p = Array1::from_elem(n_in, 1.0 / n_in as f64);
    let mut exponents = Array1::zeros(n_in);
    let mut gap = f64::INFINITY;

    for iter in 1..=max_iter {
        let marginal = Array1::from_shape_fn(n_out, |y| {
            (0..n_in).map(|x| p[x] * channel.get(x, y)).sum::<f64>()
        });
        for x in 0..n_in {
            let mut c = 0.0;
            for y in 0..n_out {
                let w = channel.get(x, y);
                if w > 0.0 {
                    c += w * (w / marginal[y]).ln();
                }
            }
            exponents[x] = c;
        }
        let lower: f64 = (0..n_in).map(|x| p[x] * exponents[x]).sum();
        let upper = exponents.iter().fold(f64::NEG_INFINITY, |a, &c| a.max(c));
        gap = upper - lower;
        if gap <= tol {
            return Ok(CapacityResult {
                capacity_nats: lower.max(0.0),
                input_dist: Distribution {
                    probs: p,
                },
                iterations: iter,
                achieved_tol: gap,
            });
        }
        // Multiplicative update p_x ∝ p_x·exp(c_x), normalized in log space.
        let log_weights =
            Array1::from_shape_fn(n_in, |x| p[x].ln() + exponents[x]);
        let peak = log_weights.iter().fold(f64::NEG_INFINITY, |a, &w| a.max(w));
        let mut scaled = log_weights.mapv(|w| (w - peak).exp());
        let total: f64 = scaled.iter().sum();
        scaled.mapv_inplace(|w| w / total);
        p = scaled;
    }
    Err(Error::IterationLimit { max_iter, gap })
}

// ---------------------------------------------------------------------------
// Empowerment
// ---------------------------------------------------------------------------

/// Builds the exact channel from length-`horizon` action sequences (in
/// lexicographic order, first action most significant) to the state reached
/// from `state`. Refuses rather than samples when the enumeration would
/// exceed `cap`.
pub fn action_sequence_channel(
    mdp: &TabularMdp,
    state: usize,
    horizon: usize,
    cap: usize,
) -> Result<ChannelMatrix> {
    if state >= mdp.num_states() {
        return Err(Error::Validation(format!(
            "state {state} out of range for {} states",
            mdp.num_states()
        )));
    }
    if horizon == 0 {
        return Err(Error::Validation("horizon must be at least 1".into()));
    }
    let n_actions = mdp.num_actions();
    let n_states = mdp.num_states();
    let n_seqs = (n_actions as u128)
        .checked_pow(horizon as u32)
        .filter(|&n| n <= cap as u128)
        .ok_or_else(|| {
            Error::Resource(format!(
                "{n_actions}^{horizon} action sequences exceed the enumeration cap {cap}"
            ))
        })? as usize;

    let mut rows = Array2::zeros((n_seqs, n_states));
    for seq in 0..n_seqs {
        let mut dist = Array1::zeros(n_states);
        dist[state] = 1.0;
        for step in 0..horizon {
            let digit = horizon - 1 - step;
            let action = (seq / n_actions.pow(digit as u32)) % n_actions;
            let next = Array1::from_shape_fn(n_states, |s2| {
                (0..n_states).map(|s| dist[s] * mdp.prob(s, action, s2)).sum()
            });
            dist = next;
        }
        rows.row_mut(seq).assign(&dist);
    }
    ChannelMatrix::new(rows)
}

/// Empowerment of `state`: the capacity (nats) of the exact `horizon`-step
/// action-sequence channel, with the default enumeration cap.
pub fn empowerment(
    mdp: &TabularMdp,
    state: usize,
    horizon: usize,
    tol: f64,
) -> Result<CapacityResult> {
    empowerment_with_cap(mdp, state, horizon, tol, DEFAULT_ENUMERATION_CAP)
}

pub fn empowerment_with_cap(
    mdp: &TabularMdp,
    state: usize,
    horizon: usize,
    tol: f64,
    cap: usize,
) -> Result<CapacityResult> {
    let channel = action_sequence_channel(mdp, state, horizon, cap)?;
    blahut_arimoto(&channel, tol, DEFAULT_CAPACITY_MAX_ITER)
}

// ---------------------------------------------------------------------------
// Agency objective and its induced reward
// ---------------------------------------------------------------------------

/// `A = α·curiosity + β·(−empowerment) + γ·mesa`.
///
/// The sign flip realizes empowerment as a loss component: minimizing `A`
/// maximizes channel capacity.
pub fn agency_objective(
    weights: &AgencyWeights,
    curiosity: f64,
    empowerment_value: f64,
    mesa: f64,
) -> Result<f64> {
    if !curiosity.is_finite() || !empowerment_value.is_finite() || !mesa.is_finite() {
        return Err(Error::Validation(
            "objective inputs must be finite".into(),
        ));
    }
    Ok(weights.alpha * curiosity - weights.beta * empowerment_value
        + weights.gamma_mesa * mesa)
}

/// Where the empowerment bonus of a transition `(s, a, s')` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpowermentAnchor {
    /// Empowerment of the successor state `s'` (default).
    Successor,
    /// Empowerment of the source state `s`.
    Source,
}

/// The reward table induced by the agency objective:
///
/// ```text
/// R_A(s,a,s') = α·(−ln(q(s'|s,a) + ε)) + β·𝔈(anchor state) + γ·mesa(s,a,s')
/// ```
///
/// The curiosity term is the surprise of the realized transition (the
/// observed next state has probability one, so the divergence collapses to a
/// negative log); empowerment is in nats.
#[allow(clippy::too_many_arguments)]
pub fn ideal_agency_reward_anchored(
    mdp: &TabularMdp,
    belief: &BeliefModel,
    weights: &AgencyWeights,
    horizon: usize,
    mesa_reward: Option<&RewardTable>,
    smoothing: f64,
    tol: f64,
    anchor: EmpowermentAnchor,
    cap: usize,
) -> Result<RewardTable> {
    belief.matches(mdp)?;
    if let Some(mesa) = mesa_reward {
        mesa.matches(mdp)?;
    }
    if smoothing <= 0.0 || !smoothing.is_finite() {
        return Err(Error::Validation(format!(
            "smoothing {smoothing} must be strictly positive"
        )));
    }

    let n_states = mdp.num_states();
    let empowerment_per_state: Vec<f64> = if weights.beta != 0.0 {
        (0..n_states)
            .map(|s| empowerment_with_cap(mdp, s, horizon, tol, cap).map(|r| r.capacity_nats))
            .collect::<Result<_>>()?
    } else {
        vec![0.0; n_states]
    };

    RewardTable::from_fn(mdp, |s, a, s2| {
        let surprise = -(belief.get(s, a, s2) + smoothing).ln();
        let anchored = match anchor {
            EmpowermentAnchor::Successor => empowerment_per_state[s2],
            EmpowermentAnchor::Source => empowerment_per_state[s],
        };
        let mesa = mesa_reward.map_or(0.0, |m| m.get(s, a, s2));
        weights.alpha * surprise + weights.beta * anchored + weights.gamma_mesa * mesa
    })
}

/// [`ideal_agency_reward_anchored`] with the successor anchor and default
/// enumeration cap.
pub fn ideal_agency_reward(
    mdp: &TabularMdp,
    belief: &BeliefModel,
    weights: &AgencyWeights,
    horizon: usize,
    mesa_reward: Option<&RewardTable>,
    smoothing: f64,
    tol: f64,
) -> Result<RewardTable> {
    ideal_agency_reward_anchored(
        mdp,
        belief,
        weights,
        horizon,
        mesa_reward,
        smoothing,
        tol,
        EmpowermentAnchor::Successor,
        DEFAULT_ENUMERATION_CAP,
    )
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DistributionDoc {
    probs: Vec<f64>,
}

impl From<Distribution> for DistributionDoc {
    fn from(d: Distribution) -> Self {
        DistributionDoc {
            probs: d.probs.to_vec(),
        }
    }
}

impl TryFrom<DistributionDoc> for Distribution {
    type Error = Error;

    fn try_from(doc: DistributionDoc) -> Result<Self> {
        Distribution::new(doc.probs)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelDoc {
    rows: Vec<Vec<f64>>,
}

impl From<ChannelMatrix> for ChannelDoc {
    fn from(c: ChannelMatrix) -> Self {
        let (n_in, n_out) = c.rows.dim();
        ChannelDoc {
            rows: (0..n_in)
                .map(|x| (0..n_out).map(|y| c.rows[[x, y]]).collect())
                .collect(),
        }
    }
}

impl TryFrom<ChannelDoc> for ChannelMatrix {
    type Error = Error;

    fn try_from(doc: ChannelDoc) -> Result<Self> {
        ChannelMatrix::from_rows(doc.rows)
    }
}

#[derive(Serialize, Deserialize)]
struct BeliefDoc {
    predicted: Vec<Vec<Vec<f64>>>,
}

impl From<BeliefModel> for BeliefDoc {
    fn from(b: BeliefModel) -> Self {
        BeliefDoc {
            predicted: crate::mdp::array3_to_nested(&b.predicted),
        }
    }
}

impl TryFrom<BeliefDoc> for BeliefModel {
    type Error = Error;

    fn try_from(doc: BeliefDoc) -> Result<Self> {
        BeliefModel::new(crate::mdp::nested_to_array3(&doc.predicted, "belief tensor")?)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
