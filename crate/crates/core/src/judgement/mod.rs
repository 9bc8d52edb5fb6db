//! Probability judgements by counting imagined instances, and the three
//! conjunction regimes: rational, noisy, and quantum sequential.

pub mod exact;
pub mod quantum;
pub mod record;
pub mod sampling;
pub mod scenario;
pub mod stats;

use thiserror::Error;

pub use exact::{exact_noisy_distribution, fallacy_probability, NoisyCountDistribution};
pub use quantum::{quantum_event_probability, quantum_judgement};
pub use record::{bin_judgement, BinnedJudgement, EventTriple, HighLow, JudgementRecord, ResponseFormat};
pub use sampling::{
    draw_cohort, judge_cohort, noisy_judgement, rational_judgement, subject_rng, Execution, Purpose, Reading, Regime,
    SampleSheet,
};
pub use scenario::{
    ConjunctionReading, JointTable, MeasurementOrder, Pooling, QuantumMode, QuantumSetup, Scenario, ScenarioKind,
};
pub use stats::{conjunction_stats, ConjunctionStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JudgementError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("noise rate {0} is outside [0, 0.5]")]
    InvalidNoise(f64),
    #[error("sample sheet is empty")]
    EmptySheet,
    #[error("cohort is empty")]
    EmptyCohort,
    #[error("records do not share a common denominator")]
    MixedDenominators,
    #[error("exact enumeration supports N ≤ {max}, got {n}")]
    EnumerationTooLarge { n: u32, max: u32 },
    #[error("invalid fractions f_x={f_x}, f_xy={f_xy}: need 0 ≤ f_xy ≤ f_x ≤ 1")]
    InvalidFractions { f_x: f64, f_xy: f64 },
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown response format `{0}`")]
    UnknownFormat(String),
    #[error("regime {0:?} does not apply to this scenario")]
    RegimeMismatch(Regime),
}

pub type Result<T, E = JudgementError> = std::result::Result<T, E>;
