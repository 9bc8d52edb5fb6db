//! Exact distribution of noisy pooled counts, for checking Monte Carlo runs.
//!
//! Each record is one of three truth categories (X∧Y, X∧¬Y, ¬X) — the
//! conjunction implies X — and each reading flips independently with rate `d`.
//! The per-record law over `(read_x, read_xy)` is convolved N times.

use serde::{Deserialize, Serialize};

use super::scenario::check_noise;
use super::{JudgementError, Result};

/// Largest N the oracle accepts.
pub const MAX_ENUMERATION_N: u32 = 20;

/// `mass[cx][cxy]` is the probability of `cx` X-readings and `cxy` conjunction readings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyCountDistribution {
    pub n: u32,
    pub mass: Vec<Vec<f64>>,
}

impl NoisyCountDistribution {
    pub fn total(&self) -> f64 {
        self.mass.iter().flatten().sum()
    }

    /// `P(count_XY > count_X)`
    pub fn fallacy_probability(&self) -> f64 {
        let mut p = 0.0;
        for (cx, row) in self.mass.iter().enumerate() {
            for (cxy, m) in row.iter().enumerate() {
                if cxy > cx {
                    p += m;
                }
            }
        }
        p
    }

    /// `E[count_XY − count_X]`
    pub fn expected_difference(&self) -> f64 {
        let mut e = 0.0;
        for (cx, row) in self.mass.iter().enumerate() {
            for (cxy, m) in row.iter().enumerate() {
                e += m * (cxy as f64 - cx as f64);
            }
        }
        e
    }
}

pub(crate) fn check_fractions(f_x: f64, f_xy: f64) -> Result<()> {
    let ok = f_x.is_finite() && f_xy.is_finite() && (0.0..=1.0).contains(&f_x) && (0.0..=f_x).contains(&f_xy);
    if ok {
        Ok(())
    } else {
        Err(JudgementError::InvalidFractions { f_x, f_xy })
    }
}

/// Probability of each `(read_x, read_xy)` outcome for one record, indexed `[rx][rxy]`.
pub fn record_law(f_x: f64, f_xy: f64, d: f64) -> [[f64; 2]; 2] {
    let cats = [(f_xy, true, true), (f_x - f_xy, true, false), (1.0 - f_x, false, false)];
    let flip = |truth: bool, read: bool| if truth == read { 1.0 - d } else { d };
    let mut law = [[0.0; 2]; 2];
    for (w, tx, txy) in cats {
        for rx in [false, true] {
            for rxy in [false, true] {
                law[usize::from(rx)][usize::from(rxy)] += w * flip(tx, rx) * flip(txy, rxy);
            }
        }
    }
    law
}

pub fn exact_noisy_distribution(f_x: f64, f_xy: f64, d: f64, n: u32) -> Result<NoisyCountDistribution> {
    if n > MAX_ENUMERATION_N {
        return Err(JudgementError::EnumerationTooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    check_noise(d)?;
    check_fractions(f_x, f_xy)?;
    let law = record_law(f_x, f_xy, d);
    let size = n as usize + 1;
    let mut mass = vec![vec![0.0; size]; size];
    mass[0][0] = 1.0;
    for k in 0..n as usize {
        let mut next = vec![vec![0.0; size]; size];
        for cx in 0..=k {
            for cxy in 0..=k {
                let m = mass[cx][cxy];
                if m == 0.0 {
                    continue;
                }
                for rx in 0..2 {
                    for rxy in 0..2 {
                        next[cx + rx][cxy + rxy] += m * law[rx][rxy];
                    }
                }
            }
        }
        mass = next;
    }
    Ok(NoisyCountDistribution { n, mass })
}

pub fn fallacy_probability(f_x: f64, f_xy: f64, d: f64, n: u32) -> Result<f64> {
    Ok(exact_noisy_distribution(f_x, f_xy, d, n)?.fallacy_probability())
}
