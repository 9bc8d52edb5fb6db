use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::JudgementError;

/// One value per judged event: X, Y and their conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventTriple<T> {
    pub x: T,
    pub y: T,
    pub xy: T,
}

impl<T: Copy> EventTriple<T> {
    pub fn map<U>(self, f: impl Fn(T) -> U) -> EventTriple<U> {
        EventTriple {
            x: f(self.x),
            y: f(self.y),
            xy: f(self.xy),
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.x, self.y, self.xy]
    }
}

/// A subject's judged probabilities for X, Y and X∧Y.
///
/// Sampled judgements keep exact counts over `n`, so every fallacy test is an
/// integer comparison. Analytic quantum judgements carry the probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JudgementRecord {
    Counts { n: u32, x: u32, y: u32, xy: u32 },
    Probabilities { x: f64, y: f64, xy: f64 },
}

impl JudgementRecord {
    pub fn counts(n: u32, x: u32, y: u32, xy: u32) -> Self {
        debug_assert!(x <= n && y <= n && xy <= n);
        JudgementRecord::Counts { n, x, y, xy }
    }

    pub fn fractions(&self) -> EventTriple<f64> {
        match *self {
            JudgementRecord::Counts { n, x, y, xy } => {
                let n = f64::from(n);
                EventTriple {
                    x: f64::from(x) / n,
                    y: f64::from(y) / n,
                    xy: f64::from(xy) / n,
                }
            }
            JudgementRecord::Probabilities { x, y, xy } => EventTriple { x, y, xy },
        }
    }

    pub fn denominator(&self) -> Option<u32> {
        match *self {
            JudgementRecord::Counts { n, .. } => Some(n),
            JudgementRecord::Probabilities { .. } => None,
        }
    }

    /// `(J_XY ⋛ J_X, J_XY ⋛ J_Y)`, exact for counts.
    pub fn conjunction_order(&self) -> (Ordering, Ordering) {
        match *self {
            JudgementRecord::Counts { x, y, xy, .. } => (xy.cmp(&x), xy.cmp(&y)),
            JudgementRecord::Probabilities { x, y, xy } => (
                xy.partial_cmp(&x).unwrap_or(Ordering::Equal),
                xy.partial_cmp(&y).unwrap_or(Ordering::Equal),
            ),
        }
    }

    /// `J_XY > min(J_X, J_Y)`
    pub fn is_conjunction_error(&self) -> bool {
        let (ox, oy) = self.conjunction_order();
        ox == Ordering::Greater || oy == Ordering::Greater
    }

    /// `J_XY > J_X` and `J_XY > J_Y`
    pub fn is_double_error(&self) -> bool {
        self.conjunction_order() == (Ordering::Greater, Ordering::Greater)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseFormat {
    /// Ten equal-width bins labelled 0..9, the last closed on the right.
    Deciles,
    /// High iff the fraction exceeds one half; exactly one half is Low.
    BinaryHighLow,
    /// Competition ranking of the three events, ties sharing a rank.
    Ranking,
}

impl FromStr for ResponseFormat {
    type Err = JudgementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deciles" => Ok(ResponseFormat::Deciles),
            "binary" | "binary_high_low" => Ok(ResponseFormat::BinaryHighLow),
            "ranking" => Ok(ResponseFormat::Ranking),
            other => Err(JudgementError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HighLow {
    #[serde(rename = "H")]
    High,
    #[serde(rename = "L")]
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinnedJudgement {
    Deciles(EventTriple<u8>),
    Binary(EventTriple<HighLow>),
    Ranking(EventTriple<u8>),
}

fn decile_of_count(count: u32, n: u32) -> u8 {
    ((10 * u64::from(count)) / u64::from(n)).min(9) as u8
}

fn decile_of_fraction(p: f64) -> u8 {
    (p * 10.0).floor().clamp(0.0, 9.0) as u8
}

/// Maps a record into a response format.
pub fn bin_judgement(record: &JudgementRecord, format: ResponseFormat) -> BinnedJudgement {
    match format {
        ResponseFormat::Deciles => BinnedJudgement::Deciles(match *record {
            JudgementRecord::Counts { n, x, y, xy } => EventTriple {
                x: decile_of_count(x, n),
                y: decile_of_count(y, n),
                xy: decile_of_count(xy, n),
            },
            JudgementRecord::Probabilities { .. } => record.fractions().map(decile_of_fraction),
        }),
        ResponseFormat::BinaryHighLow => BinnedJudgement::Binary(match *record {
            JudgementRecord::Counts { n, x, y, xy } => EventTriple { x, y, xy }.map(|c| {
                if 2 * u64::from(c) > u64::from(n) {
                    HighLow::High
                } else {
                    HighLow::Low
                }
            }),
            JudgementRecord::Probabilities { .. } => {
                record
                    .fractions()
                    .map(|p| if p > 0.5 { HighLow::High } else { HighLow::Low })
            }
        }),
        ResponseFormat::Ranking => {
            let v = record.fractions().as_array();
            let (ox, oy) = record.conjunction_order();
            // exact pairwise comparisons; X vs Y compared on fractions of a common denominator
            let cmp = |i: usize, j: usize| -> Ordering {
                match (i, j) {
                    (2, 0) => ox,
                    (0, 2) => ox.reverse(),
                    (2, 1) => oy,
                    (1, 2) => oy.reverse(),
                    _ => v[i].partial_cmp(&v[j]).unwrap_or(Ordering::Equal),
                }
            };
            let rank = |i: usize| 1 + (0..3).filter(|&j| j != i && cmp(j, i) == Ordering::Greater).count() as u8;
            BinnedJudgement::Ranking(EventTriple {
                x: rank(0),
                y: rank(1),
                xy: rank(2),
            })
        }
    }
}
