//! Scenario files for the judgement simulator.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "kind": "classical_joint",
//!   "joint_table": { "both": 0.4, "x_only": 0.3, "y_only": 0.2, "neither": 0.1 },
//!   "noise_rate": 0.0,
//!   "samples_per_subject": 50,
//!   "cohort_size": 200
//! }
//! ```

use ctcog::judgement::{
    ConjunctionReading, JointTable, MeasurementOrder, Pooling, QuantumMode, QuantumSetup, Scenario, ScenarioKind,
};
use ctcog::linalg::{self, Ket};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::model::{from_ket, to_ket, ComplexLiteral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    ClassicalJoint,
    QuantumSequential,
}

/// A qubit ket given either as amplitudes or as a real angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KetSpec {
    Vector(Vec<ComplexLiteral>),
    AngleDeg(f64),
}

impl KetSpec {
    pub fn ket(&self) -> Ket {
        match self {
            KetSpec::Vector(v) => to_ket(v),
            KetSpec::AngleDeg(d) => linalg::angle_ket(*d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSpec {
    pub psi: KetSpec,
    pub x: KetSpec,
    pub y: KetSpec,
    #[serde(default = "default_order")]
    pub order: MeasurementOrder,
}

fn default_order() -> MeasurementOrder {
    MeasurementOrder::XThenY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub format_version: u32,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_table: Option<JointTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumSpec>,
    #[serde(default)]
    pub noise_rate: f64,
    pub samples_per_subject: u32,
    pub cohort_size: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub pooling: Pooling,
    #[serde(default)]
    pub conjunction_reading: ConjunctionReading,
    #[serde(default)]
    pub quantum_mode: QuantumMode,
}

impl ScenarioFile {
    /// Builds the scenario; `seed` overrides the file's seed.
    pub fn to_scenario(&self, seed: Option<u64>) -> Result<Scenario> {
        if self.format_version != 1 {
            return Err(CliError::FormatVersion(self.format_version));
        }
        let kind = match (self.kind, &self.joint_table, &self.quantum) {
            (KindTag::ClassicalJoint, Some(t), None) => {
                t.validate()
                    .map_err(|e| CliError::invariant("joint_table", e.to_string()))?;
                ScenarioKind::ClassicalJoint(*t)
            }
            (KindTag::QuantumSequential, None, Some(q)) => {
                let setup = QuantumSetup {
                    psi: q.psi.ket(),
                    x: q.x.ket(),
                    y: q.y.ket(),
                    order: q.order,
                };
                setup
                    .validate()
                    .map_err(|e| CliError::invariant("quantum", e.to_string()))?;
                ScenarioKind::QuantumSequential(setup)
            }
            (KindTag::ClassicalJoint, _, _) => {
                return Err(CliError::invariant(
                    "kind",
                    "classical_joint scenarios take `joint_table` and no `quantum`",
                ))
            }
            (KindTag::QuantumSequential, _, _) => {
                return Err(CliError::invariant(
                    "kind",
                    "quantum_sequential scenarios take `quantum` and no `joint_table`",
                ))
            }
        };
        let scenario = Scenario {
            kind,
            noise_rate: self.noise_rate,
            samples_per_subject: self.samples_per_subject,
            cohort_size: self.cohort_size,
            seed: seed.or(self.seed).unwrap_or(0),
            pooling: self.pooling,
            conjunction_reading: self.conjunction_reading,
            quantum_mode: self.quantum_mode,
        };
        scenario
            .validate()
            .map_err(|e| CliError::invariant("scenario", e.to_string()))?;
        Ok(scenario)
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let (kind, joint_table, quantum) = match &s.kind {
            ScenarioKind::ClassicalJoint(t) => (KindTag::ClassicalJoint, Some(*t), None),
            ScenarioKind::QuantumSequential(q) => (
                KindTag::QuantumSequential,
                None,
                Some(QuantumSpec {
                    psi: KetSpec::Vector(from_ket(&q.psi)),
                    x: KetSpec::Vector(from_ket(&q.x)),
                    y: KetSpec::Vector(from_ket(&q.y)),
                    order: q.order,
                }),
            ),
        };
        ScenarioFile {
            format_version: 1,
            kind,
            joint_table,
            quantum,
            noise_rate: s.noise_rate,
            samples_per_subject: s.samples_per_subject,
            cohort_size: s.cohort_size,
            seed: Some(s.seed),
            pooling: s.pooling,
            conjunction_reading: s.conjunction_reading,
            quantum_mode: s.quantum_mode,
        }
    }
}

pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile> {
    Ok(serde_json::from_str(text)?)
}

/// Parses and validates a scenario, taking the seed from the file (or 0).
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_scenario_file(text)?.to_scenario(None)
}

/// Seed precedence: explicit flag, then the file, then the environment value, then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| CliError::InvalidSeed(v.to_string())),
        None => Ok(0),
    }
}
