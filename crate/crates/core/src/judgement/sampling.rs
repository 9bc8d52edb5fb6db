//! Seeded sample sheets and the rational and noisy judgement counts.
//!
//! Every subject draws from its own ChaCha8 stream keyed by `(seed, subject,
//! purpose)`, so results do not depend on the order subjects are processed in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::quantum;
use super::record::JudgementRecord;
use super::scenario::{check_noise, ConjunctionReading, JointTable, Pooling, QuantumMode, Scenario, ScenarioKind};
use super::{JudgementError, Result};

/// What a subject stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// Truth draws of the pooled sheet (the X sheet when unpooled), or quantum outcomes.
    Truths = 0,
    Noise = 1,
    /// Extra truth sheets in unpooled mode.
    TruthsY = 2,
    TruthsXy = 3,
}

pub fn subject_rng(seed: u64, subject: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(subject.wrapping_mul(4).wrapping_add(purpose as u64));
    rng
}

/// One imagined instance: true values and what was recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reading {
    pub truth_x: bool,
    pub truth_y: bool,
    pub read_x: bool,
    pub read_y: bool,
    /// Recorded conjunction indicator.
    pub read_xy: bool,
}

impl Reading {
    pub fn exact(x: bool, y: bool) -> Self {
        Reading {
            truth_x: x,
            truth_y: y,
            read_x: x,
            read_y: y,
            read_xy: x && y,
        }
    }
}

/// A subject's N records: the string `s = (s1..sN)` of imagined outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSheet {
    pub records: Vec<Reading>,
}

impl SampleSheet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn draw_record<R: Rng>(table: &JointTable, rng: &mut R) -> Reading {
    let u: f64 = rng.random();
    let (x, y) = if u < table.both {
        (true, true)
    } else if u < table.both + table.x_only {
        (true, false)
    } else if u < table.both + table.x_only + table.y_only {
        (false, true)
    } else {
        (false, false)
    };
    Reading::exact(x, y)
}

pub fn draw_sheet<R: Rng>(table: &JointTable, n: u32, rng: &mut R) -> SampleSheet {
    SampleSheet {
        records: (0..n).map(|_| draw_record(table, rng)).collect(),
    }
}

fn classical_table(scenario: &Scenario) -> Result<&JointTable> {
    scenario.validate()?;
    scenario
        .joint_table()
        .ok_or_else(|| JudgementError::InvalidScenario("expected a classical joint-table scenario".into()))
}

/// One pooled sheet per subject, drawn without noise.
pub fn draw_cohort(scenario: &Scenario) -> Result<Vec<SampleSheet>> {
    let table = classical_table(scenario)?;
    Ok((0..scenario.cohort_size)
        .map(|i| {
            let mut rng = subject_rng(scenario.seed, u64::from(i), Purpose::Truths);
            draw_sheet(table, scenario.samples_per_subject, &mut rng)
        })
        .collect())
}

/// Counts the recorded readings; the conjunction is both readings true in the same record.
pub fn rational_judgement(sheet: &SampleSheet) -> Result<JudgementRecord> {
    if sheet.is_empty() {
        return Err(JudgementError::EmptySheet);
    }
    let mut c = (0u32, 0u32, 0u32);
    for r in &sheet.records {
        c.0 += u32::from(r.read_x);
        c.1 += u32::from(r.read_y);
        c.2 += u32::from(r.read_x && r.read_y);
    }
    Ok(JudgementRecord::counts(sheet.len() as u32, c.0, c.1, c.2))
}

/// Re-records every reading from the truths, flipping each one independently with probability `d`.
///
/// Three flip draws are consumed per record (X, Y, conjunction) whatever the reading mode.
pub fn apply_noise<R: Rng>(sheet: &SampleSheet, d: f64, rng: &mut R) -> Result<SampleSheet> {
    check_noise(d)?;
    let records = sheet
        .records
        .iter()
        .map(|r| {
            let fx = rng.random::<f64>() < d;
            let fy = rng.random::<f64>() < d;
            let fxy = rng.random::<f64>() < d;
            Reading {
                read_x: r.truth_x ^ fx,
                read_y: r.truth_y ^ fy,
                read_xy: (r.truth_x && r.truth_y) ^ fxy,
                ..*r
            }
        })
        .collect();
    Ok(SampleSheet { records })
}

fn count_noisy(sheet: &SampleSheet, reading: ConjunctionReading) -> JudgementRecord {
    let mut c = (0u32, 0u32, 0u32);
    for r in &sheet.records {
        c.0 += u32::from(r.read_x);
        c.1 += u32::from(r.read_y);
        c.2 += u32::from(match reading {
            ConjunctionReading::FlipIndicator => r.read_xy,
            ConjunctionReading::ConjoinFlipped => r.read_x && r.read_y,
        });
    }
    JudgementRecord::counts(sheet.len() as u32, c.0, c.1, c.2)
}

/// Judgement of a pooled sheet under symmetric read noise.
pub fn noisy_judgement<R: Rng>(
    sheet: &SampleSheet,
    d: f64,
    rng: &mut R,
    reading: ConjunctionReading,
) -> Result<JudgementRecord> {
    if sheet.is_empty() {
        return Err(JudgementError::EmptySheet);
    }
    Ok(count_noisy(&apply_noise(sheet, d, rng)?, reading))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Exact counting on pooled samples, no noise.
    Rational,
    /// Counting with per-reading flips at the scenario's noise rate.
    Noisy,
    /// Sequential projective judgements on a qubit belief state.
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

fn check_regime(scenario: &Scenario, regime: Regime) -> Result<()> {
    let ok = matches!(
        (&scenario.kind, regime),
        (ScenarioKind::ClassicalJoint(_), Regime::Rational | Regime::Noisy)
            | (ScenarioKind::QuantumSequential(_), Regime::Quantum)
    );
    if ok {
        Ok(())
    } else {
        Err(JudgementError::RegimeMismatch(regime))
    }
}

/// Judgement of subject `i` under the given regime.
pub fn judge_subject(scenario: &Scenario, regime: Regime, subject: u32) -> Result<JudgementRecord> {
    let id = u64::from(subject);
    let n = scenario.samples_per_subject;
    match (&scenario.kind, regime) {
        (ScenarioKind::QuantumSequential(setup), Regime::Quantum) => match scenario.quantum_mode {
            QuantumMode::Analytic => quantum::analytic_judgement(setup, scenario.noise_rate),
            QuantumMode::Sampled => {
                let mut rng = subject_rng(scenario.seed, id, Purpose::Truths);
                let mut noise = subject_rng(scenario.seed, id, Purpose::Noise);
                quantum::sampled_judgement(setup, n, scenario.noise_rate, &mut rng, &mut noise)
            }
        },
        (ScenarioKind::ClassicalJoint(table), Regime::Rational | Regime::Noisy) => {
            let d = if regime == Regime::Rational {
                0.0
            } else {
                scenario.noise_rate
            };
            let mut truths = subject_rng(scenario.seed, id, Purpose::Truths);
            let pooled = draw_sheet(table, n, &mut truths);
            if regime == Regime::Rational && scenario.pooling == Pooling::Pooled {
                return rational_judgement(&pooled);
            }
            let mut noise = subject_rng(scenario.seed, id, Purpose::Noise);
            let read = |sheet: &SampleSheet, noise: &mut ChaCha8Rng| {
                apply_noise(sheet, d, noise).map(|s| count_noisy(&s, scenario.conjunction_reading))
            };
            match scenario.pooling {
                Pooling::Pooled => read(&pooled, &mut noise),
                Pooling::Unpooled => {
                    let sheet_y = draw_sheet(table, n, &mut subject_rng(scenario.seed, id, Purpose::TruthsY));
                    let sheet_xy = draw_sheet(table, n, &mut subject_rng(scenario.seed, id, Purpose::TruthsXy));
                    let JudgementRecord::Counts { x, .. } = read(&pooled, &mut noise)? else {
                        unreachable!()
                    };
                    let JudgementRecord::Counts { y, .. } = read(&sheet_y, &mut noise)? else {
                        unreachable!()
                    };
                    let JudgementRecord::Counts { xy, .. } = read(&sheet_xy, &mut noise)? else {
                        unreachable!()
                    };
                    Ok(JudgementRecord::counts(n, x, y, xy))
                }
            }
        }
        _ => Err(JudgementError::RegimeMismatch(regime)),
    }
}

/// Judgements for the whole cohort, in subject order.
///
/// Parallel and sequential execution produce identical output.
pub fn judge_cohort(scenario: &Scenario, regime: Regime, execution: Execution) -> Result<Vec<JudgementRecord>> {
    scenario.validate()?;
    check_regime(scenario, regime)?;
    match execution {
        Execution::Sequential => (0..scenario.cohort_size)
            .map(|i| judge_subject(scenario, regime, i))
            .collect(),
        Execution::Parallel => (0..scenario.cohort_size)
            .into_par_iter()
            .map(|i| judge_subject(scenario, regime, i))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sheet(bits: &[(bool, bool)]) -> SampleSheet {
        SampleSheet {
            records: bits.iter().map(|&(x, y)| Reading::exact(x, y)).collect(),
        }
    }

    #[test]
    fn rational_counts_by_formula() {
        let s = sheet(&[(true, true), (true, false), (false, true), (true, true)]);
        assert_eq!(rational_judgement(&s).unwrap(), JudgementRecord::counts(4, 3, 3, 2));
        let all = sheet(&[(true, true); 5]);
        assert_eq!(rational_judgement(&all).unwrap(), JudgementRecord::counts(5, 5, 5, 5));
        assert_eq!(rational_judgement(&sheet(&[])), Err(JudgementError::EmptySheet));
    }

    #[test]
    fn degenerate_table_gives_all_true() {
        let t = JointTable::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        let sheets = draw_cohort(&Scenario::classical(t, 20, 3, 11)).unwrap();
        assert!(sheets
            .iter()
            .flat_map(|s| &s.records)
            .all(|r| r.truth_x && r.truth_y && r.read_xy));
    }

    #[test]
    fn cohort_draw_is_reproducible() {
        let t = JointTable::new([0.3, 0.2, 0.1, 0.4]).unwrap();
        let sc = Scenario::classical(t, 30, 10, 99);
        assert_eq!(draw_cohort(&sc).unwrap(), draw_cohort(&sc).unwrap());
        let other = Scenario {
            seed: 100,
            ..sc.clone()
        };
        assert_ne!(draw_cohort(&sc).unwrap(), draw_cohort(&other).unwrap());
    }

    #[test]
    fn zero_noise_matches_rational() {
        let t = JointTable::new([0.3, 0.2, 0.1, 0.4]).unwrap();
        for s in draw_cohort(&Scenario::classical(t, 40, 20, 5)).unwrap() {
            let mut rng = subject_rng(0, 0, Purpose::Noise);
            let noisy = noisy_judgement(&s, 0.0, &mut rng, ConjunctionReading::FlipIndicator).unwrap();
            assert_eq!(noisy, rational_judgement(&s).unwrap());
        }
    }

    #[test]
    fn invalid_noise_rejected() {
        let s = sheet(&[(true, true)]);
        let mut rng = subject_rng(0, 0, Purpose::Noise);
        assert_eq!(
            noisy_judgement(&s, 0.7, &mut rng, ConjunctionReading::FlipIndicator),
            Err(JudgementError::InvalidNoise(0.7))
        );
    }

    #[test]
    fn conjoined_reading_never_exceeds_x() {
        let t = JointTable::new([0.45, 0.05, 0.45, 0.05]).unwrap();
        let sc = Scenario {
            conjunction_reading: ConjunctionReading::ConjoinFlipped,
            ..Scenario::classical(t, 10, 500, 3).with_noise(0.3)
        };
        for r in judge_cohort(&sc, Regime::Noisy, Execution::Sequential).unwrap() {
            assert!(!r.is_conjunction_error());
        }
    }

    #[test]
    fn regime_mismatch() {
        let t = JointTable::new([0.25; 4]).unwrap();
        let sc = Scenario::classical(t, 10, 2, 0);
        assert_eq!(
            judge_cohort(&sc, Regime::Quantum, Execution::Sequential),
            Err(JudgementError::RegimeMismatch(Regime::Quantum))
        );
    }

    #[test]
    fn unpooled_mode_runs_and_is_deterministic() {
        let t = JointTable::new([0.4, 0.1, 0.1, 0.4]).unwrap();
        let sc = Scenario {
            pooling: Pooling::Unpooled,
            ..Scenario::classical(t, 12, 50, 8).with_noise(0.1)
        };
        let a = judge_cohort(&sc, Regime::Noisy, Execution::Sequential).unwrap();
        let b = judge_cohort(&sc, Regime::Noisy, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
