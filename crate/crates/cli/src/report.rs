//! Report and sweep-CSV rendering.
//!
//! Reports are self-describing: the embedded `config` object is itself a
//! valid run configuration (command, inputs, seed, resolved overrides), so
//! feeding it back through `agency run --config <file>` reproduces the
//! results bit-exactly. JSON maps serialize with sorted keys and floats use
//! shortest round-trip formatting, so identical runs produce identical bytes.

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::commands::ExecOutcome;
use crate::config::Resolved;
use crate::error::CliError;

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    seed: u64,
    config: &'a Resolved,
    library_version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
    results: &'a Value,
}

/// Assembles the JSON report, folding any executor config corrections into
/// the embedded snapshot.
pub fn render_json(
    resolved: &Resolved,
    outcome: &ExecOutcome,
    with_timestamp: bool,
) -> Result<String, CliError> {
    let mut snapshot = resolved.clone();
    for (key, value) in &outcome.config_patch {
        snapshot.overrides.insert(key.clone(), value.clone());
    }
    let report = Report {
        command: resolved.command.label(),
        seed: resolved.seed,
        config: &snapshot,
        library_version: env!("CARGO_PKG_VERSION"),
        timestamp: with_timestamp
            .then(|| Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true)),
        results: &outcome.results,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Io(format!("report serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// 12 significant digits, the sweep-file number format.
fn fmt_sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// One CSV row per swept value; the header names the parameter and the
/// command's result columns.
pub fn render_csv(
    param: &str,
    rows: &[(String, Vec<(&'static str, f64)>)],
) -> Result<String, CliError> {
    let first = rows
        .first()
        .ok_or_else(|| CliError::Validation("sweep produced no rows".into()))?;
    let columns: Vec<&'static str> = first.1.iter().map(|(name, _)| *name).collect();

    let mut out = String::new();
    out.push_str(param);
    for name in &columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (value, row) in rows {
        let names: Vec<&'static str> = row.iter().map(|(name, _)| *name).collect();
        if names != columns {
            return Err(CliError::Validation(format!(
                "sweep rows disagree on columns ({names:?} vs {columns:?})"
            )));
        }
        out.push_str(value);
        for (_, v) in row {
            out.push(',');
            out.push_str(&fmt_sig12(*v));
        }
        out.push('\n');
    }
    Ok(out)
}
