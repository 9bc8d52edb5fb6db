use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{JudgementError, Result};
use crate::linalg::{self, Ket};

/// Cells sum to one within this bound.
pub const TABLE_SUM_TOLERANCE: f64 = 1e-12;
/// Unit-norm check for quantum kets.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Joint probability table over two binary events X and Y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    /// P(X ∧ Y)
    pub both: f64,
    /// P(X ∧ ¬Y)
    pub x_only: f64,
    /// P(¬X ∧ Y)
    pub y_only: f64,
    /// P(¬X ∧ ¬Y)
    pub neither: f64,
}

impl JointTable {
    /// Cells in the order `(X∧Y, X∧¬Y, ¬X∧Y, ¬X∧¬Y)`.
    pub fn new(cells: [f64; 4]) -> Result<Self> {
        let t = JointTable {
            both: cells[0],
            x_only: cells[1],
            y_only: cells[2],
            neither: cells[3],
        };
        t.validate()?;
        Ok(t)
    }

    pub fn cells(&self) -> [f64; 4] {
        [self.both, self.x_only, self.y_only, self.neither]
    }

    pub fn validate(&self) -> Result<()> {
        let cells = self.cells();
        if cells.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(JudgementError::InvalidScenario(
                "table cells must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > TABLE_SUM_TOLERANCE {
            return Err(JudgementError::InvalidScenario(format!(
                "table cells sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    pub fn p_x(&self) -> f64 {
        self.both + self.x_only
    }

    pub fn p_y(&self) -> f64 {
        self.both + self.y_only
    }

    pub fn p_xy(&self) -> f64 {
        self.both
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementOrder {
    XThenY,
    YThenX,
}

/// A qubit belief state and the two rank-1 events judged on it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSetup {
    pub psi: Ket,
    /// Event X holds when the measurement projects onto this ket.
    pub x: Ket,
    pub y: Ket,
    pub order: MeasurementOrder,
}

impl QuantumSetup {
    pub fn new(psi: Ket, x: Ket, y: Ket, order: MeasurementOrder) -> Result<Self> {
        let s = QuantumSetup { psi, x, y, order };
        s.validate()?;
        Ok(s)
    }

    pub fn from_angles(psi_deg: f64, x_deg: f64, y_deg: f64, order: MeasurementOrder) -> Self {
        QuantumSetup {
            psi: linalg::angle_ket(psi_deg),
            x: linalg::angle_ket(x_deg),
            y: linalg::angle_ket(y_deg),
            order,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("psi", &self.psi), ("x", &self.x), ("y", &self.y)] {
            if v.len() != 2 {
                return Err(JudgementError::DimensionMismatch {
                    expected: 2,
                    found: v.len(),
                });
            }
            if (linalg::norm_sqr(v) - 1.0).abs() > NORM_TOLERANCE {
                return Err(JudgementError::InvalidScenario(format!(
                    "`{name}` is not a unit vector"
                )));
            }
        }
        Ok(())
    }

    /// `(first, second)` event kets in measurement order.
    pub fn sequence(&self) -> [&[Complex64]; 2] {
        match self.order {
            MeasurementOrder::XThenY => [&self.x, &self.y],
            MeasurementOrder::YThenX => [&self.y, &self.x],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    ClassicalJoint(JointTable),
    QuantumSequential(QuantumSetup),
}

/// Whether single-event and conjunction judgements share one sample sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    #[default]
    Pooled,
    /// Independent sheets for X, Y and the conjunction.
    Unpooled,
}

/// How the conjunction is read off a noisy record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjunctionReading {
    /// The conjunction indicator carries its own flip.
    #[default]
    FlipIndicator,
    /// Conjunction of the already-flipped single readings.
    ConjoinFlipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantumMode {
    #[default]
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Per-reading flip probability, in `[0, 0.5]`.
    pub noise_rate: f64,
    pub samples_per_subject: u32,
    pub cohort_size: u32,
    pub seed: u64,
    pub pooling: Pooling,
    pub conjunction_reading: ConjunctionReading,
    pub quantum_mode: QuantumMode,
}

impl Scenario {
    pub fn classical(table: JointTable, samples_per_subject: u32, cohort_size: u32, seed: u64) -> Self {
        Scenario {
            kind: ScenarioKind::ClassicalJoint(table),
            noise_rate: 0.0,
            samples_per_subject,
            cohort_size,
            seed,
            pooling: Pooling::Pooled,
            conjunction_reading: ConjunctionReading::FlipIndicator,
            quantum_mode: QuantumMode::Analytic,
        }
    }

    pub fn quantum(setup: QuantumSetup, samples_per_subject: u32, cohort_size: u32, seed: u64) -> Self {
        Scenario {
            kind: ScenarioKind::QuantumSequential(setup),
            noise_rate: 0.0,
            samples_per_subject,
            cohort_size,
            seed,
            pooling: Pooling::Pooled,
            conjunction_reading: ConjunctionReading::FlipIndicator,
            quantum_mode: QuantumMode::Analytic,
        }
    }

    pub fn with_noise(mut self, d: f64) -> Self {
        self.noise_rate = d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ScenarioKind::ClassicalJoint(t) => t.validate()?,
            ScenarioKind::QuantumSequential(q) => q.validate()?,
        }
        check_noise(self.noise_rate)?;
        if self.samples_per_subject == 0 {
            return Err(JudgementError::InvalidScenario(
                "samples_per_subject must be at least 1".into(),
            ));
        }
        if self.cohort_size == 0 {
            return Err(JudgementError::InvalidScenario("cohort_size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn joint_table(&self) -> Option<&JointTable> {
        match &self.kind {
            ScenarioKind::ClassicalJoint(t) => Some(t),
            ScenarioKind::QuantumSequential(_) => None,
        }
    }

    pub fn quantum_setup(&self) -> Option<&QuantumSetup> {
        match &self.kind {
            ScenarioKind::QuantumSequential(q) => Some(q),
            ScenarioKind::ClassicalJoint(_) => None,
        }
    }
}

pub(crate) fn check_noise(d: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&d) {
        return Err(JudgementError::InvalidNoise(d));
    }
    Ok(())
}
