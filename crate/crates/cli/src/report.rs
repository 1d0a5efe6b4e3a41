use serde::Serialize;
use serde_json::{json, Value};

use crate::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified = 0,
    Negative = 2,
}

/// Result of one command before rendering.
pub struct Outcome {
    pub status: Status,
    pub verdict: Value,
    pub data: Value,
    pub residuals: Value,
    /// Human-readable lines for `--format text`.
    pub lines: Vec<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    verdict: Value,
    data: Value,
    residuals: Value,
    config: &'a RunConfig,
}

pub fn render_json(config: &RunConfig, outcome: Outcome) -> String {
    let report = Report {
        command: config.command,
        verdict: outcome.verdict,
        data: outcome.data,
        residuals: outcome.residuals,
        config,
    };
    serde_json::to_string_pretty(&report).expect("reports serialize")
}

pub fn render_text(config: &RunConfig, outcome: Outcome) -> String {
    let mut out = vec![format!("{}: {}", config.command, plain(&outcome.verdict))];
    out.extend(outcome.lines.into_iter().map(|l| format!("  {l}")));
    if let Value::Object(map) = &outcome.residuals {
        for (k, v) in map {
            out.push(format!("  residual {k}: {}", plain(v)));
        }
    }
    out.push(format!("  config: {}", json!(config)));
    out.join("\n")
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.3e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// `[(2,1),(1,1)]` as `M_{2}^{⊕1} ⊕ M_{1}^{⊕1}`.
pub fn profile_text(profile: &[(usize, usize)]) -> String {
    if profile.is_empty() {
        return "0".into();
    }
    profile
        .iter()
        .map(|(n, m)| format!("M_{{{n}}}^{{⊕{m}}}"))
        .collect::<Vec<_>>()
        .join(" ⊕ ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_strings() {
        assert_eq!(profile_text(&[(2, 1), (1, 1)]), "M_{2}^{⊕1} ⊕ M_{1}^{⊕1}");
        assert_eq!(profile_text(&[]), "0");
    }
}
