//! One executor per CLI command, each producing a JSON result block plus a
//! flat numeric row for CSV sweeps.

use std::fs;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use agency_core::convergence::{
    bounded_depth_epsilon, log_complexity, sparse_rate_compare, LogBase, NetworkShape, RateQuery,
};
use agency_core::losses::{
    curiosity_kl, empowerment_with_cap, ideal_agency_reward_anchored, AgencyWeights, BeliefModel,
    Distribution, EmpowermentAnchor, LN_2,
};
use agency_core::mdp::{Policy, RewardTable, TabularMdp};
use agency_core::measure::{
    epsilon_tube_measure, monte_carlo_measure, subspace_projection, FunctionCube, SubspaceBasis,
};
use agency_core::starc::{
    starc_comparison, CanonicalPolicy, DistanceKind, Normalizer, StarcComparison, StarcConfig,
    Weighting,
};

use crate::config::{CommandKind, Resolved};
use crate::error::CliError;

pub struct ExecOutcome {
    pub results: Value,
    /// Flat numeric view of the results, used as one CSV sweep row.
    pub row: Vec<(&'static str, f64)>,
    /// Corrections to the embedded config snapshot (effective values that
    /// came from input files rather than overrides).
    pub config_patch: Vec<(String, Value)>,
}

impl ExecOutcome {
    fn new(results: Value, row: Vec<(&'static str, f64)>) -> Self {
        Self {
            results,
            row,
            config_patch: Vec::new(),
        }
    }
}

pub fn execute(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    match resolved.command {
        CommandKind::Curiosity => run_curiosity(resolved),
        CommandKind::Empowerment => run_empowerment(resolved),
        CommandKind::AgencyReward => run_agency_reward(resolved),
        CommandKind::StarcDistance => run_starc_distance(resolved),
        CommandKind::AgencyMetric => run_agency_metric(resolved),
        CommandKind::Measure => run_measure(resolved),
        CommandKind::Convergence => run_convergence(resolved),
        CommandKind::Rates => run_rates(resolved),
    }
}

// ---------------------------------------------------------------------------
// Input loading and shared builders
// ---------------------------------------------------------------------------

fn load_input<T: DeserializeOwned>(resolved: &Resolved, role: &str) -> Result<T, CliError> {
    let path = resolved.require_input(role)?;
    let text = fs::read_to_string(path).map_err(|e| CliError::from_read(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::from_json(path, e))
}

fn load_optional<T: DeserializeOwned>(
    resolved: &Resolved,
    role: &str,
) -> Result<Option<T>, CliError> {
    if resolved.input(role).is_none() {
        return Ok(None);
    }
    load_input(resolved, role).map(Some)
}

fn build_weights(resolved: &Resolved) -> Result<AgencyWeights, CliError> {
    Ok(AgencyWeights::new(
        resolved.f64("weights.alpha")?,
        resolved.f64("weights.beta")?,
        resolved.f64("weights.gamma_mesa")?,
    )?)
}

fn parse_anchor(raw: &str) -> Result<EmpowermentAnchor, CliError> {
    match raw.to_ascii_lowercase().as_str() {
        "successor" => Ok(EmpowermentAnchor::Successor),
        "source" => Ok(EmpowermentAnchor::Source),
        other => Err(CliError::Validation(format!(
            "empowerment.anchor must be successor|source, got '{other}'"
        ))),
    }
}

fn parse_normalizer(raw: &str) -> Result<Normalizer, CliError> {
    match raw.to_ascii_lowercase().as_str() {
        "l1" => Ok(Normalizer::L1),
        "l2" => Ok(Normalizer::L2),
        "return_range" => Ok(Normalizer::ReturnRange),
        other => Err(CliError::Validation(format!(
            "starc.normalizer must be l1|l2|return_range, got '{other}'"
        ))),
    }
}

fn parse_distance(raw: &str) -> Result<DistanceKind, CliError> {
    match raw.to_ascii_lowercase().as_str() {
        "l1" => Ok(DistanceKind::L1),
        "l2" => Ok(DistanceKind::L2),
        other => Err(CliError::Validation(format!(
            "starc.distance must be l1|l2, got '{other}'"
        ))),
    }
}

fn parse_weighting(raw: &str) -> Result<Weighting, CliError> {
    match raw.to_ascii_lowercase().as_str() {
        "unweighted" => Ok(Weighting::Unweighted),
        "transition_weighted" => Ok(Weighting::TransitionWeighted),
        other => Err(CliError::Validation(format!(
            "starc.weighting must be unweighted|transition_weighted, got '{other}'"
        ))),
    }
}

fn build_starc_config(resolved: &Resolved) -> Result<StarcConfig, CliError> {
    let canonical_policy = match load_optional::<Policy>(resolved, "canonical_policy")? {
        Some(policy) => CanonicalPolicy::Custom(policy),
        None => CanonicalPolicy::Uniform,
    };
    Ok(StarcConfig {
        canonical_policy,
        normalizer: parse_normalizer(&resolved.string("starc.normalizer")?)?,
        distance: parse_distance(&resolved.string("starc.distance")?)?,
        weighting: parse_weighting(&resolved.string("starc.weighting")?)?,
        tol: resolved.f64("starc.tol")?,
    })
}

fn metric_report(comparison: &StarcComparison, config: &StarcConfig) -> Value {
    json!({
        "distance": comparison.distance,
        "normalizer": config.normalizer.label(),
        "distance_kind": config.distance.label(),
        "weighting": config.weighting.label(),
        "canonical_policy": config.canonical_policy.label(),
        "trivial_f": comparison.standardized_f.trivial,
        "trivial_a": comparison.standardized_a.trivial,
        "norm_f": comparison.standardized_f.norm_used,
        "norm_a": comparison.standardized_a.norm_used,
        "config_tol": config.tol,
    })
}

// ---------------------------------------------------------------------------
// Command executors
// ---------------------------------------------------------------------------

fn run_curiosity(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let p: Distribution = load_input(resolved, "p")?;
    let q: Distribution = load_input(resolved, "q")?;
    let smoothing = resolved.f64("curiosity.smoothing")?;
    let kl = curiosity_kl(&p, &q, smoothing)?;
    Ok(ExecOutcome::new(
        json!({
            "kl_nats": kl,
            "kl_bits": kl / LN_2,
            "smoothing": smoothing,
        }),
        vec![("kl_nats", kl), ("kl_bits", kl / LN_2)],
    ))
}

fn run_empowerment(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let mdp: TabularMdp = load_input(resolved, "mdp")?;
    let state = resolved.usize("empowerment.state")?;
    let horizon = resolved.usize("empowerment.horizon")?;
    let tol = resolved.f64("empowerment.tol")?;
    let cap = resolved.usize("empowerment.cap")?;
    let result = empowerment_with_cap(&mdp, state, horizon, tol, cap)?;
    let row = vec![
        ("capacity_bits", result.capacity_bits()),
        ("capacity_nats", result.capacity_nats),
        ("iterations", result.iterations as f64),
        ("achieved_tol", result.achieved_tol),
    ];
    Ok(ExecOutcome::new(
        json!({
            "state": state,
            "horizon": horizon,
            "empowerment": result,
        }),
        row,
    ))
}

fn run_agency_reward(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let mdp: TabularMdp = load_input(resolved, "mdp")?;
    let belief: BeliefModel = load_input(resolved, "belief")?;
    let mesa: Option<RewardTable> = load_optional(resolved, "mesa")?;
    let weights = build_weights(resolved)?;
    let reward = ideal_agency_reward_anchored(
        &mdp,
        &belief,
        &weights,
        resolved.usize("empowerment.horizon")?,
        mesa.as_ref(),
        resolved.f64("curiosity.smoothing")?,
        resolved.f64("empowerment.tol")?,
        parse_anchor(&resolved.string("empowerment.anchor")?)?,
        resolved.usize("empowerment.cap")?,
    )?;
    let (mut min, mut max, mut sum_sq) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &v in reward.values() {
        min = min.min(v);
        max = max.max(v);
        sum_sq += v * v;
    }
    let l2 = sum_sq.sqrt();
    Ok(ExecOutcome::new(
        json!({
            "reward": reward,
            "summary": {"min": min, "max": max, "l2_norm": l2},
            "weights": weights,
        }),
        vec![("reward_min", min), ("reward_max", max), ("reward_l2", l2)],
    ))
}

fn run_starc_distance(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let mdp: TabularMdp = load_input(resolved, "mdp")?;
    let reward_f: RewardTable = load_input(resolved, "reward_f")?;
    let reward_a: RewardTable = load_input(resolved, "reward_a")?;
    let config = build_starc_config(resolved)?;
    let comparison = starc_comparison(&reward_f, &reward_a, &mdp, &config)?;
    let row = vec![
        ("distance", comparison.distance),
        ("norm_f", comparison.standardized_f.norm_used),
        ("norm_a", comparison.standardized_a.norm_used),
    ];
    Ok(ExecOutcome::new(metric_report(&comparison, &config), row))
}

fn run_agency_metric(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let mdp: TabularMdp = load_input(resolved, "mdp")?;
    let belief: BeliefModel = load_input(resolved, "belief")?;
    let candidate: RewardTable = load_input(resolved, "candidate")?;
    let mesa: Option<RewardTable> = load_optional(resolved, "mesa")?;
    let weights = build_weights(resolved)?;
    let horizon = resolved.usize("empowerment.horizon")?;
    let config = build_starc_config(resolved)?;
    let ideal = ideal_agency_reward_anchored(
        &mdp,
        &belief,
        &weights,
        horizon,
        mesa.as_ref(),
        resolved.f64("curiosity.smoothing")?,
        resolved.f64("empowerment.tol")?,
        parse_anchor(&resolved.string("empowerment.anchor")?)?,
        resolved.usize("empowerment.cap")?,
    )?;
    let comparison = starc_comparison(&candidate, &ideal, &mdp, &config)?;
    let mut results = metric_report(&comparison, &config);
    results["weights"] = serde_json::to_value(weights).expect("weights serialize");
    results["horizon"] = json!(horizon);
    Ok(ExecOutcome::new(
        results,
        vec![("distance", comparison.distance)],
    ))
}

fn run_measure(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let cube = effective_cube(resolved)?;
    let report = epsilon_tube_measure(&cube);
    let mut row = vec![
        ("log10_measure", report.log10_measure),
        ("log10_total", report.log10_total),
        ("log10_probability", report.log10_probability),
    ];

    let mut measure_block = serde_json::to_value(&report).expect("report serializes");
    measure_block["independence_assumed"] = json!(true);

    let samples = resolved.u64("mc.samples")?;
    let monte_carlo = if samples > 0 {
        let mc = monte_carlo_measure(&cube, samples, resolved.seed)?;
        row.push(("mc_estimate", mc.estimate));
        row.push(("mc_std_error", mc.std_error));
        Some(mc)
    } else {
        None
    };

    let basis: Option<SubspaceBasis> = load_optional(resolved, "basis")?;
    let vector: Option<Vec<f64>> = load_optional(resolved, "vector")?;
    let projection = match (basis, vector) {
        (Some(basis), Some(vector)) => {
            let p = subspace_projection(&basis, &vector)?;
            row.push(("projection_residual", p.residual_norm));
            row.push(("effective_rank", p.effective_rank as f64));
            Some(p)
        }
        (None, None) => None,
        _ => {
            return Err(CliError::Validation(
                "projection needs both 'basis' and 'vector' inputs".into(),
            ))
        }
    };

    let outcome = json!({
        "cube": cube,
        "measure": measure_block,
        "monte_carlo": monte_carlo,
        "projection": projection,
    });
    let patch = vec![
        ("measure.n".into(), json!(cube.n())),
        ("measure.bound_m".into(), json!(cube.bound_m())),
        ("measure.epsilon".into(), json!(cube.epsilon())),
    ];
    Ok(ExecOutcome {
        results: outcome,
        row,
        config_patch: patch,
    })
}

/// A cube file fixes the geometry; overrides may re-dial epsilon but must
/// agree with the file on `n` and `M`. Without a file the cube is centered
/// and built entirely from overrides.
fn effective_cube(resolved: &Resolved) -> Result<FunctionCube, CliError> {
    let epsilon = resolved.f64("measure.epsilon")?;
    match load_optional::<FunctionCube>(resolved, "cube")? {
        Some(file_cube) => {
            if resolved.explicit("measure.n") && resolved.usize("measure.n")? != file_cube.n() {
                return Err(CliError::Validation(format!(
                    "measure.n = {} conflicts with the cube file (n = {})",
                    resolved.usize("measure.n")?,
                    file_cube.n()
                )));
            }
            if resolved.explicit("measure.bound_m")
                && resolved.f64("measure.bound_m")? != file_cube.bound_m()
            {
                return Err(CliError::Validation(format!(
                    "measure.bound_m = {} conflicts with the cube file (M = {})",
                    resolved.f64("measure.bound_m")?,
                    file_cube.bound_m()
                )));
            }
            let eps = if resolved.explicit("measure.epsilon") {
                epsilon
            } else {
                file_cube.epsilon()
            };
            Ok(FunctionCube::new(
                file_cube.f_ideal().to_vec(),
                file_cube.bound_m(),
                eps,
            )?)
        }
        None => Ok(FunctionCube::centered(
            resolved.usize("measure.n")?,
            resolved.f64("measure.bound_m")?,
            epsilon,
        )?),
    }
}

fn run_convergence(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let depth = resolved.usize("convergence.depth_l")? as u32;
    let shape = match resolved.f64_opt("convergence.params_n")? {
        Some(params_n) => NetworkShape::new(depth, params_n)?,
        None => NetworkShape::from_log10_params(depth, resolved.f64("convergence.params_log10")?)?,
    };
    let base = match resolved.string("nc.base")?.to_ascii_lowercase().as_str() {
        "ten" => LogBase::Ten,
        "natural" => LogBase::Natural,
        other => {
            return Err(CliError::Validation(format!(
                "nc.base must be ten|natural, got '{other}'"
            )))
        }
    };
    let log10_epsilon = bounded_depth_epsilon(&shape);
    let nc_log = log_complexity(log10_epsilon, base)?;
    Ok(ExecOutcome::new(
        json!({
            "depth_l": shape.depth_l(),
            "log10_params": shape.log10_params(),
            "log10_epsilon": log10_epsilon,
            "nc_log": nc_log,
            "nc_base": base.label(),
            "theta_constants_assumed": true,
        }),
        vec![("log10_epsilon", log10_epsilon), ("nc_log", nc_log)],
    ))
}

fn run_rates(resolved: &Resolved) -> Result<ExecOutcome, CliError> {
    let query = RateQuery::new(
        resolved.f64("rates.dim_d")?,
        resolved.f64("rates.sparsity_s")?,
        resolved.f64("rates.iterations_t")?,
    )?;
    let rates = sparse_rate_compare(&query)?;
    Ok(ExecOutcome::new(
        json!({
            "dim_d": query.dim_d(),
            "sparsity_s": query.sparsity_s(),
            "iterations_t": query.iterations_t(),
            "dense_rate": rates.dense_rate,
            "sparse_rate": rates.sparse_rate,
            "speedup": rates.speedup,
            "theta_constants_assumed": true,
        }),
        vec![
            ("dense_rate", rates.dense_rate),
            ("sparse_rate", rates.sparse_rate),
            ("speedup", rates.speedup),
        ],
    ))
}
