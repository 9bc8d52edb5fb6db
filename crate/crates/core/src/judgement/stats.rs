use serde::{Deserialize, Serialize};

use super::record::{bin_judgement, BinnedJudgement, EventTriple, HighLow, JudgementRecord, ResponseFormat};
use super::{JudgementError, Result};

const Z95: f64 = 1.96;

/// Cohort-level conjunction statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjunctionStats {
    pub subjects: u32,
    /// Mean of `J_XY − J_X`.
    pub mean_conjunction_error_x: f64,
    /// Mean of `J_XY − J_Y`.
    pub mean_conjunction_error_y: f64,
    pub pct_conjunction_errors: f64,
    /// Conjunction ranked strictly first. Ties are not errors.
    pub pct_ranking_errors: f64,
    pub pct_double_errors: f64,
    pub mean_judged: EventTriple<f64>,
    /// Population variance of each judged probability.
    pub variance: EventTriple<f64>,
    /// Share of High answers under the binary format.
    pub p_high: EventTriple<f64>,
    pub p_low: EventTriple<f64>,
    /// 95% normal-approximation half-widths.
    pub ci_mean_error_x: f64,
    pub ci_mean_error_y: f64,
    pub ci_pct_conjunction_errors: f64,
    pub ci_pct_double_errors: f64,
}

fn mean_var(values: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

fn share_ci(p: f64, n: f64) -> f64 {
    Z95 * (p * (1.0 - p) / n).sqrt()
}

pub fn conjunction_stats(records: &[JudgementRecord]) -> Result<ConjunctionStats> {
    if records.is_empty() {
        return Err(JudgementError::EmptyCohort);
    }
    let denominators: Vec<Option<u32>> = records.iter().map(JudgementRecord::denominator).collect();
    if denominators.iter().any(|d| *d != denominators[0]) {
        return Err(JudgementError::MixedDenominators);
    }
    let n = records.len() as f64;
    let fr: Vec<EventTriple<f64>> = records.iter().map(JudgementRecord::fractions).collect();

    // Count-based means go through integer sums so equal counts give bit-equal results.
    let diff = |pick: fn(&EventTriple<f64>) -> f64| -> Vec<f64> { fr.iter().map(|t| t.xy - pick(t)).collect() };
    let (mean_ex, var_ex, mean_ey, var_ey) = match denominators[0] {
        Some(den) => {
            let scale = f64::from(den) * n;
            let sx: i64 = records.iter().map(|r| count_diff(r, true)).sum();
            let sy: i64 = records.iter().map(|r| count_diff(r, false)).sum();
            let (_, vx) = mean_var(diff(|t| t.x).into_iter(), n);
            let (_, vy) = mean_var(diff(|t| t.y).into_iter(), n);
            (sx as f64 / scale, vx, sy as f64 / scale, vy)
        }
        None => {
            let (mx, vx) = mean_var(diff(|t| t.x).into_iter(), n);
            let (my, vy) = mean_var(diff(|t| t.y).into_iter(), n);
            (mx, vx, my, vy)
        }
    };

    let share = |f: &dyn Fn(&JudgementRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / n;
    let pct_conj = share(&|r| r.is_conjunction_error());
    let pct_double = share(&|r| r.is_double_error());
    let pct_rank = share(
        &|r| matches!(bin_judgement(r, ResponseFormat::Ranking), BinnedJudgement::Ranking(t) if t.xy == 1 && t.x > 1 && t.y > 1),
    );

    let (mx, vx) = mean_var(fr.iter().map(|t| t.x), n);
    let (my, vy) = mean_var(fr.iter().map(|t| t.y), n);
    let (mxy, vxy) = mean_var(fr.iter().map(|t| t.xy), n);

    let mut highs = EventTriple { x: 0u32, y: 0, xy: 0 };
    for r in records {
        if let BinnedJudgement::Binary(b) = bin_judgement(r, ResponseFormat::BinaryHighLow) {
            highs.x += u32::from(b.x == HighLow::High);
            highs.y += u32::from(b.y == HighLow::High);
            highs.xy += u32::from(b.xy == HighLow::High);
        }
    }
    let p_high = highs.map(|h| f64::from(h) / n);

    Ok(ConjunctionStats {
        subjects: records.len() as u32,
        mean_conjunction_error_x: mean_ex,
        mean_conjunction_error_y: mean_ey,
        pct_conjunction_errors: pct_conj,
        pct_ranking_errors: pct_rank,
        pct_double_errors: pct_double,
        mean_judged: EventTriple { x: mx, y: my, xy: mxy },
        variance: EventTriple { x: vx, y: vy, xy: vxy },
        p_high,
        p_low: p_high.map(|p| 1.0 - p),
        ci_mean_error_x: Z95 * (var_ex / n).sqrt(),
        ci_mean_error_y: Z95 * (var_ey / n).sqrt(),
        ci_pct_conjunction_errors: share_ci(pct_conj, n),
        ci_pct_double_errors: share_ci(pct_double, n),
    })
}

fn count_diff(r: &JudgementRecord, against_x: bool) -> i64 {
    match *r {
        JudgementRecord::Counts { x, y, xy, .. } => i64::from(xy) - i64::from(if against_x { x } else { y }),
        JudgementRecord::Probabilities { .. } => 0,
    }
}
