//! Run configuration: one defaults table, dotted-key overrides, and the
//! resolved snapshot embedded in every report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Curiosity,
    Empowerment,
    AgencyReward,
    StarcDistance,
    AgencyMetric,
    Measure,
    Convergence,
    Rates,
}

impl CommandKind {
    pub fn label(&self) -> &'static str {
        match self {
            CommandKind::Curiosity => "curiosity",
            CommandKind::Empowerment => "empowerment",
            CommandKind::AgencyReward => "agency-reward",
            CommandKind::StarcDistance => "starc-distance",
            CommandKind::AgencyMetric => "agency-metric",
            CommandKind::Measure => "measure",
            CommandKind::Convergence => "convergence",
            CommandKind::Rates => "rates",
        }
    }

    /// Override keys this command accepts, resolved from [`DEFAULTS`].
    pub fn surface(&self) -> &'static [&'static str] {
        match self {
            CommandKind::Curiosity => &["curiosity.smoothing"],
            CommandKind::Empowerment => &[
                "empowerment.state",
                "empowerment.horizon",
                "empowerment.tol",
                "empowerment.cap",
            ],
            CommandKind::AgencyReward => &[
                "weights.alpha",
                "weights.beta",
                "weights.gamma_mesa",
                "curiosity.smoothing",
                "empowerment.horizon",
                "empowerment.tol",
                "empowerment.cap",
                "empowerment.anchor",
            ],
            CommandKind::StarcDistance => &[
                "starc.normalizer",
                "starc.distance",
                "starc.weighting",
                "starc.tol",
            ],
            CommandKind::AgencyMetric => &[
                "weights.alpha",
                "weights.beta",
                "weights.gamma_mesa",
                "curiosity.smoothing",
                "empowerment.horizon",
                "empowerment.tol",
                "empowerment.cap",
                "empowerment.anchor",
                "starc.normalizer",
                "starc.distance",
                "starc.weighting",
                "starc.tol",
            ],
            CommandKind::Measure => &[
                "measure.n",
                "measure.bound_m",
                "measure.epsilon",
                "mc.samples",
            ],
            CommandKind::Convergence => &[
                "convergence.depth_l",
                "convergence.params_log10",
                "convergence.params_n",
                "nc.base",
            ],
            CommandKind::Rates => &["rates.dim_d", "rates.sparsity_s", "rates.iterations_t"],
        }
    }

    /// Input file roles: `(role, required)`.
    pub fn input_roles(&self) -> &'static [(&'static str, bool)] {
        match self {
            CommandKind::Curiosity => &[("p", true), ("q", true)],
            CommandKind::Empowerment => &[("mdp", true)],
            CommandKind::AgencyReward => &[("mdp", true), ("belief", true), ("mesa", false)],
            CommandKind::StarcDistance => &[
                ("mdp", true),
                ("reward_f", true),
                ("reward_a", true),
                ("canonical_policy", false),
            ],
            CommandKind::AgencyMetric => &[
                ("mdp", true),
                ("belief", true),
                ("candidate", true),
                ("mesa", false),
                ("canonical_policy", false),
            ],
            CommandKind::Measure => &[("cube", false), ("basis", false), ("vector", false)],
            CommandKind::Convergence => &[],
            CommandKind::Rates => &[],
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The single source of truth for every override default:
/// `(key, default value, description)`.
pub const DEFAULTS: &[(&str, &str, &str)] = &[
    ("curiosity.smoothing", "1e-9", "constant added inside log(q + eps)"),
    ("empowerment.state", "0", "state whose empowerment is computed"),
    ("empowerment.horizon", "1", "action-sequence length"),
    ("empowerment.tol", "1e-6", "capacity bound-gap tolerance, nats"),
    ("empowerment.cap", "4096", "max enumerated action sequences"),
    ("empowerment.anchor", "successor", "empowerment bonus anchor: successor|source"),
    ("weights.alpha", "1", "curiosity weight (alpha >= 0)"),
    ("weights.beta", "1", "empowerment weight (beta >= 0)"),
    ("weights.gamma_mesa", "0", "mesa-term weight (sign free)"),
    ("starc.normalizer", "l2", "standardization norm: l1|l2|return_range"),
    ("starc.distance", "l2", "distance on standardized rewards: l1|l2"),
    ("starc.weighting", "transition_weighted", "norm weighting: unweighted|transition_weighted"),
    ("starc.tol", "1e-9", "evaluation tolerance and triviality threshold"),
    ("measure.n", "3", "cube dimension (fileless cubes only)"),
    ("measure.bound_m", "1", "cube bound M (fileless cubes only)"),
    ("measure.epsilon", "0.1", "tube half-width"),
    ("mc.samples", "0", "Monte Carlo samples; 0 disables the estimator"),
    ("convergence.depth_l", "20", "network depth L (>= 3)"),
    ("convergence.params_log10", "10", "log10 of the parameter count"),
    ("convergence.params_n", "", "linear parameter count (overrides params_log10)"),
    ("nc.base", "ten", "complexity log base: ten|natural"),
    ("rates.dim_d", "1e6", "problem dimension d (> 1)"),
    ("rates.sparsity_s", "10", "solution sparsity s (<= d)"),
    ("rates.iterations_t", "100", "iteration budget T"),
];

pub fn default_for(key: &str) -> Option<&'static str> {
    DEFAULTS
        .iter()
        .find(|(k, _, _)| *k == key)
        .map(|(_, v, _)| *v)
}

/// Defaults table rendered for `--help`.
pub fn defaults_help() -> String {
    let mut out = String::from("Defaults (override with --set KEY=VALUE):\n");
    for (key, value, what) in DEFAULTS {
        let shown = if value.is_empty() { "(unset)" } else { value };
        out.push_str(&format!("    {key:<26} {shown:<22} {what}\n"));
    }
    out
}

/// On-disk run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, PathBuf>,
    /// Report destination; the --output flag wins over this.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, Value>,
}

impl RunConfigDoc {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::from_read(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::from_json(path, e))
    }
}

/// Fully resolved run: command, seed, input paths, and every override key of
/// the command's surface (defaults filled in). This is what reports embed.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub command: CommandKind,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, PathBuf>,
    pub seed: u64,
    pub overrides: BTreeMap<String, Value>,
    /// Keys the caller set explicitly (config file or --set), as opposed to
    /// defaults. Not part of the report snapshot.
    #[serde(skip)]
    explicit: BTreeSet<String>,
}

impl Resolved {
    /// Merges (in increasing precedence): surface defaults, config-file
    /// overrides, `--set` pairs. Unknown keys are validation errors.
    pub fn build(
        command: CommandKind,
        doc: &RunConfigDoc,
        set_pairs: &[String],
        seed_flag: Option<u64>,
    ) -> Result<Self, CliError> {
        let mut inputs = doc.inputs.clone();
        let mut overrides: BTreeMap<String, Value> = BTreeMap::new();
        let mut explicit: BTreeSet<String> = BTreeSet::new();
        for key in command.surface() {
            let default = default_for(key).expect("surface key missing from DEFAULTS");
            if !default.is_empty() {
                overrides.insert((*key).into(), parse_value(default));
            }
        }

        let mut apply = |key: &str, value: Value| -> Result<(), CliError> {
            if let Some(role) = key.strip_prefix("input.") {
                let path = value
                    .as_str()
                    .map(PathBuf::from)
                    .ok_or_else(|| CliError::Validation(format!("{key} needs a path value")))?;
                if !command.input_roles().iter().any(|(r, _)| *r == role) {
                    return Err(CliError::Validation(format!(
                        "input role '{role}' is not used by the {command} command"
                    )));
                }
                inputs.insert(role.into(), path);
                return Ok(());
            }
            if !command.surface().contains(&key) {
                return Err(CliError::Validation(format!(
                    "unknown parameter '{key}' for the {command} command"
                )));
            }
            overrides.insert(key.into(), value);
            explicit.insert(key.into());
            Ok(())
        };

        for (key, value) in &doc.overrides {
            apply(key, value.clone())?;
        }
        for pair in set_pairs {
            let (key, raw) = pair.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("--set '{pair}' is not of the form KEY=VALUE"))
            })?;
            apply(key.trim(), parse_value(raw.trim()))?;
        }

        for (role, required) in command.input_roles() {
            if *required && !inputs.contains_key(*role) {
                return Err(CliError::Validation(format!(
                    "the {command} command requires an '{role}' input \
                     (config \"inputs\" or --set input.{role}=<path>)"
                )));
            }
        }

        Ok(Resolved {
            command,
            inputs,
            seed: seed_flag.or(doc.seed).unwrap_or(0),
            overrides,
            explicit,
        })
    }

    /// True when the key was set by the caller rather than by a default.
    pub fn explicit(&self, key: &str) -> bool {
        self.explicit.contains(key)
    }

    /// Sets an override as if the caller had passed it, used by sweeps.
    pub fn set_override(&mut self, key: &str, value: Value) {
        self.overrides.insert(key.into(), value);
        self.explicit.insert(key.into());
    }

    pub fn input(&self, role: &str) -> Option<&PathBuf> {
        self.inputs.get(role)
    }

    pub fn require_input(&self, role: &str) -> Result<&PathBuf, CliError> {
        self.input(role)
            .ok_or_else(|| CliError::Validation(format!("missing required input '{role}'")))
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.overrides.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let value = self
            .raw(key)
            .ok_or_else(|| CliError::Validation(format!("parameter '{key}' is unset")))?;
        value_as_f64(value)
            .ok_or_else(|| CliError::Validation(format!("parameter '{key}' is not a number: {value}")))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => value_as_f64(v)
                .map(Some)
                .ok_or_else(|| CliError::Validation(format!("parameter '{key}' is not a number: {v}"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let x = self.f64(key)?;
        if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
            return Err(CliError::Validation(format!(
                "parameter '{key}' must be a non-negative integer, got {x}"
            )));
        }
        Ok(x as usize)
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        Ok(self.usize(key)? as u64)
    }

    pub fn string(&self, key: &str) -> Result<String, CliError> {
        let value = self
            .raw(key)
            .ok_or_else(|| CliError::Validation(format!("parameter '{key}' is unset")))?;
        match value {
            Value::String(s) => Ok(s.clone()),
            other => Ok(other.to_string()),
        }
    }
}

/// `--set` values arrive as strings; keep numbers as JSON numbers so the
/// embedded config re-parses identically.
pub fn parse_value(raw: &str) -> Value {
    if let Ok(v @ (Value::Number(_) | Value::Bool(_))) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    Value::String(raw.to_string())
}

fn value_as_f64(value: &Value) -> Option<f64> {
    match value {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}
