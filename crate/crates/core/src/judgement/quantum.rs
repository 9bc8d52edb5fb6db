//! Sequential projective judgements on a qubit belief state.

use num_complex::Complex64;
use rand::Rng;

use super::record::JudgementRecord;
use super::scenario::{check_noise, QuantumSetup, Scenario};
use super::{JudgementError, Result};
use crate::linalg::{self, Ket};

/// Probability that successive rank-1 projections onto `sequence` all succeed.
///
/// Each factor is the squared overlap of the collapsed state with the next ket,
/// clamped to `[0, 1]`, so the product never grows along the sequence.
pub fn quantum_event_probability(psi: &[Complex64], sequence: &[&[Complex64]]) -> Result<f64> {
    if psi.len() != 2 {
        return Err(JudgementError::DimensionMismatch {
            expected: 2,
            found: psi.len(),
        });
    }
    let mut p = 1.0;
    let mut current: Ket = psi.to_vec();
    for ket in sequence {
        if ket.len() != 2 {
            return Err(JudgementError::DimensionMismatch {
                expected: 2,
                found: ket.len(),
            });
        }
        let target =
            linalg::normalize(ket).ok_or_else(|| JudgementError::InvalidScenario("zero measurement vector".into()))?;
        p *= linalg::inner(&target, &current).norm_sqr().clamp(0.0, 1.0);
        current = target;
    }
    Ok(p)
}

/// `(p_X, p_Y, p_{first then second})` for the setup.
pub fn analytic_probabilities(setup: &QuantumSetup) -> Result<(f64, f64, f64)> {
    setup.validate()?;
    let px = quantum_event_probability(&setup.psi, &[&setup.x])?;
    let py = quantum_event_probability(&setup.psi, &[&setup.y])?;
    let pxy = quantum_event_probability(&setup.psi, &setup.sequence())?;
    Ok((px, py, pxy))
}

/// Expected reading of an event of probability `p` under symmetric flips at rate `d`.
pub fn noisy_expectation(p: f64, d: f64) -> f64 {
    (1.0 - 2.0 * d) * p + d
}

pub fn analytic_judgement(setup: &QuantumSetup, d: f64) -> Result<JudgementRecord> {
    check_noise(d)?;
    let (x, y, xy) = analytic_probabilities(setup)?;
    if d == 0.0 {
        return Ok(JudgementRecord::Probabilities { x, y, xy });
    }
    Ok(JudgementRecord::Probabilities {
        x: noisy_expectation(x, d),
        y: noisy_expectation(y, d),
        xy: noisy_expectation(xy, d),
    })
}

/// N Born-rule draws per event, each from a fresh copy of ψ; the conjunction is
/// a two-step sequential draw in the declared order.
///
/// Four outcome draws per record come from `rng`, three flip draws from `noise`.
pub fn sampled_judgement<R: Rng>(
    setup: &QuantumSetup,
    n: u32,
    d: f64,
    rng: &mut R,
    noise: &mut R,
) -> Result<JudgementRecord> {
    check_noise(d)?;
    if n == 0 {
        return Err(JudgementError::EmptySheet);
    }
    let (px, py, _) = analytic_probabilities(setup)?;
    let [first, second] = setup.sequence();
    let p_first = quantum_event_probability(&setup.psi, &[first])?;
    let p_second_given_first = quantum_event_probability(first, &[second])?;
    let (mut cx, mut cy, mut cxy) = (0u32, 0u32, 0u32);
    for _ in 0..n {
        let ux: f64 = rng.random();
        let uy: f64 = rng.random();
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let x = ux < px;
        let y = uy < py;
        let xy = u1 < p_first && u2 < p_second_given_first;
        let fx = noise.random::<f64>() < d;
        let fy = noise.random::<f64>() < d;
        let fxy = noise.random::<f64>() < d;
        cx += u32::from(x ^ fx);
        cy += u32::from(y ^ fy);
        cxy += u32::from(xy ^ fxy);
    }
    Ok(JudgementRecord::counts(n, cx, cy, cxy))
}

/// Judgement of the first subject of a quantum scenario, honouring its mode.
pub fn quantum_judgement(scenario: &Scenario) -> Result<JudgementRecord> {
    scenario.validate()?;
    if scenario.quantum_setup().is_none() {
        return Err(JudgementError::InvalidScenario(
            "expected a quantum sequential scenario".into(),
        ));
    }
    super::sampling::judge_subject(scenario, super::sampling::Regime::Quantum, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::judgement::scenario::MeasurementOrder;

    fn ket(deg: f64) -> Ket {
        linalg::angle_ket(deg)
    }

    #[test]
    fn born_rule_examples() {
        let zero = ket(0.0);
        let one = ket(90.0);
        let plus = ket(45.0);
        assert_eq!(quantum_event_probability(&zero, &[&one]).unwrap(), 0.0);
        assert!((quantum_event_probability(&zero, &[&zero]).unwrap() - 1.0).abs() < 1e-15);
        let p = quantum_event_probability(&zero, &[&plus, &one]).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dimension_checked() {
        let v = vec![linalg::c(1.0, 0.0); 3];
        assert_eq!(
            quantum_event_probability(&v, &[]),
            Err(JudgementError::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn order_matters() {
        let s = QuantumSetup::from_angles(0.0, 45.0, 90.0, MeasurementOrder::XThenY);
        let (px, py, pxy) = analytic_probabilities(&s).unwrap();
        assert!((px - 0.5).abs() < 1e-15);
        assert!(py < 1e-30);
        assert!((pxy - 0.25).abs() < 1e-15);
        let r = QuantumSetup {
            order: MeasurementOrder::YThenX,
            ..s
        };
        assert!(analytic_probabilities(&r).unwrap().2 < 1e-30);
    }

    #[test]
    fn aligned_events_are_certain() {
        let s = QuantumSetup::from_angles(30.0, 30.0, 30.0, MeasurementOrder::XThenY);
        let JudgementRecord::Probabilities { x, y, xy } = analytic_judgement(&s, 0.0).unwrap() else {
            panic!()
        };
        for p in [x, y, xy] {
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_pulls_towards_half() {
        assert!((noisy_expectation(0.95, 0.25) - 0.725).abs() < 1e-15);
        assert_eq!(noisy_expectation(0.1, 0.5), 0.5);
    }
}
