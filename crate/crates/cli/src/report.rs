use ctcog::judgement::{ConjunctionStats, JudgementRecord, Regime};
use ctcog::oracle::{MediumClassification, PossibilityVerdict};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scenario_file::ScenarioFile;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL: &str = "ctcog";

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round12(n.as_f64().unwrap());
            *v = serde_json::Number::from_f64(r)
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Returns `value` with every float rounded to 12 significant digits.
///
/// Serializing the result and parsing it back yields an identical value.
pub fn normalize<T: Serialize + DeserializeOwned>(value: &T) -> T {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_value(&mut v);
    serde_json::from_value(v).expect("rounded value deserializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableVerdict {
    pub name: String,
    pub substrate: String,
    pub distinguishable: bool,
    pub clonable: bool,
    pub information: bool,
    /// Only defined for information variables.
    pub observable: Option<bool>,
    pub boolean: bool,
    pub maximal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumReport {
    pub substrate: String,
    /// "superinformation medium", "classical information medium",
    /// "information medium" or "not an information medium".
    pub classification: String,
    pub details: MediumClassification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<PossibilityVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub variables: Vec<VariableVerdict>,
    pub media: Vec<MediumReport>,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub regime: Regime,
    pub stats: ConjunctionStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<JudgementRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assertions: Option<Vec<AssertionOutcome>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub mean_error_x: f64,
    pub mean_error_y: f64,
    pub pct_conjunction_errors: f64,
    pub pct_double_errors: f64,
    pub ci_mean_error_x: f64,
    pub ci_mean_error_y: f64,
    pub ci_pct_conjunction_errors: f64,
    pub ci_pct_double_errors: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: String,
    pub regime: Regime,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportResult {
    Check(CheckResult),
    Simulate(SimulateResult),
    Sweep(SweepResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub tool: String,
    pub version: String,
    /// Command line that produced the report, without output and execution flags.
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ScenarioFile>,
    pub result: ReportResult,
    /// Present only when timing was requested, so default reports stay byte-stable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl Report {
    pub fn new(command: Vec<String>, seed: Option<u64>, config: Option<ScenarioFile>, result: ReportResult) -> Self {
        normalize(&Report {
            format_version: FORMAT_VERSION,
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            seed,
            config,
            result,
            wall_clock_ms: None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn parse_report(text: &str) -> crate::error::Result<Report> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-2.5e-20), -2.5e-20);
        assert_eq!(round12(0.0), 0.0);
    }
}
