use std::path::Path;

use ctcog::judgement::{
    conjunction_stats, exact, judge_cohort, quantum, ConjunctionReading, Execution, JudgementRecord, Pooling,
    QuantumMode, Regime, Scenario, ScenarioKind,
};
use ctcog::linalg;
use ctcog::oracle::{self, is_clonable, is_distinguishable, is_information_variable, is_possible};
use ctcog::substrate::BackendKind;

use crate::error::{CliError, Result};
use crate::model::parse_model;
use crate::report::{
    round12, AssertionOutcome, CheckResult, MediumReport, Report, ReportResult, SimulateResult, SweepResult, SweepRow,
    TaskReport, VariableVerdict,
};
use crate::scenario_file::{parse_scenario_file, resolve_seed, ScenarioFile};

pub const SEED_ENV: &str = "CTCOG_SEED";

/// Rows beyond this are refused rather than silently truncated.
pub const MAX_SWEEP_ROWS: usize = 100_000;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn path_arg(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

pub fn cmd_check(model_path: &Path) -> Result<Report> {
    let model = parse_model(&read(model_path)?)?;
    let spec_name = |i: usize| model.file.substrates[i].name.clone();
    let index_of = |s: &ctcog::substrate::Substrate| model.substrates.iter().position(|t| t == s);

    let variables = model
        .variables
        .iter()
        .map(|v| {
            let information = is_information_variable(v);
            VariableVerdict {
                name: v.name().to_string(),
                substrate: index_of(v.substrate())
                    .map(spec_name)
                    .unwrap_or_else(|| v.substrate().name().to_string()),
                distinguishable: is_distinguishable(v).possible,
                clonable: is_clonable(v, None).is_ok_and(|r| r.possible),
                information,
                observable: information.then(|| oracle::is_observable(v).unwrap_or(false)),
                boolean: v.is_boolean(),
                maximal: v.is_maximal(),
            }
        })
        .collect();

    let media = model
        .substrates
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let details = oracle::is_superinformation_medium(s, &model.variables);
            let declared = model.variables.iter().filter(|v| v.substrate() == s).count();
            let classification = if details.superinformation_witness.is_some() {
                "superinformation medium"
            } else if details.is_information_medium && s.kind() == BackendKind::Classical {
                "classical information medium"
            } else if details.is_information_medium {
                "information medium"
            } else {
                "not an information medium"
            };
            MediumReport {
                substrate: spec_name(i),
                classification: classification.to_string(),
                details,
                note: (declared < 2).then(|| "no witness possible".to_string()),
            }
        })
        .collect();

    let tasks = model
        .tasks
        .iter()
        .map(|t| match is_possible(t) {
            Ok(v) => TaskReport {
                name: t.label().to_string(),
                verdict: Some(v),
                error: None,
            },
            Err(e) => TaskReport {
                name: t.label().to_string(),
                verdict: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    Ok(Report::new(
        vec!["check".into(), path_arg(model_path)],
        None,
        None,
        ReportResult::Check(CheckResult {
            variables,
            media,
            tasks,
        }),
    ))
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub seed: Option<u64>,
    pub regime: Option<Regime>,
    pub records: bool,
    pub assert: bool,
    pub execution: Execution,
    /// Value of the seed environment variable, if set.
    pub env_seed: Option<String>,
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Rational => "rational",
        Regime::Noisy => "noisy",
        Regime::Quantum => "quantum",
    }
}

pub fn default_regime(s: &Scenario) -> Regime {
    match s.kind {
        ScenarioKind::QuantumSequential(_) => Regime::Quantum,
        ScenarioKind::ClassicalJoint(_) if s.noise_rate > 0.0 => Regime::Noisy,
        ScenarioKind::ClassicalJoint(_) => Regime::Rational,
    }
}

fn load_scenario(path: &Path, seed: Option<u64>, env_seed: Option<&str>) -> Result<(Scenario, u64)> {
    let file = parse_scenario_file(&read(path)?)?;
    let seed = resolve_seed(seed, file.seed, env_seed)?;
    Ok((file.to_scenario(Some(seed))?, seed))
}

pub fn cmd_simulate(scenario_path: &Path, opts: &SimulateOptions) -> Result<Report> {
    let (scenario, seed) = load_scenario(scenario_path, opts.seed, opts.env_seed.as_deref())?;
    let regime = opts.regime.unwrap_or_else(|| default_regime(&scenario));
    let records = judge_cohort(&scenario, regime, opts.execution)?;
    let stats = conjunction_stats(&records)?;
    let assertions = opts
        .assert
        .then(|| evaluate_assertions(&scenario, regime, &records, &stats));

    let mut command = vec!["simulate".to_string(), path_arg(scenario_path)];
    if let Some(s) = opts.seed {
        command.extend(["--seed".into(), s.to_string()]);
    }
    if let Some(r) = opts.regime {
        command.extend(["--regime".into(), regime_name(r).into()]);
    }
    if opts.records {
        command.push("--records".into());
    }
    if opts.assert {
        command.push("--assert".into());
    }
    Ok(Report::new(
        command,
        Some(seed),
        Some(ScenarioFile::from_scenario(&scenario)),
        ReportResult::Simulate(SimulateResult {
            regime,
            stats,
            records: opts.records.then_some(records),
            assertions,
        }),
    ))
}

fn outcome(name: &str, passed: bool, detail: String) -> AssertionOutcome {
    AssertionOutcome {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Invariants checked by `--assert`, chosen by regime.
pub fn evaluate_assertions(
    scenario: &Scenario,
    regime: Regime,
    records: &[JudgementRecord],
    stats: &ctcog::judgement::ConjunctionStats,
) -> Vec<AssertionOutcome> {
    let mut out = Vec::new();
    let in_unit = |p: f64| (0.0..=1.0).contains(&p);
    out.push(outcome(
        "stats_consistent",
        [
            stats.pct_conjunction_errors,
            stats.pct_double_errors,
            stats.pct_ranking_errors,
        ]
        .into_iter()
        .all(in_unit)
            && stats.pct_double_errors <= stats.pct_conjunction_errors,
        "percentages within [0, 1], double errors ≤ conjunction errors".into(),
    ));
    match (regime, &scenario.kind) {
        (Regime::Rational, _) => {
            let bad = records.iter().filter(|r| r.is_conjunction_error()).count();
            out.push(outcome(
                "no_fallacy",
                bad == 0 && (scenario.pooling == Pooling::Unpooled || stats.pct_conjunction_errors == 0.0),
                format!("{bad} record(s) with J_XY > min(J_X, J_Y)"),
            ));
        }
        (Regime::Noisy, ScenarioKind::ClassicalJoint(t)) => {
            let exact_case = scenario.pooling == Pooling::Pooled
                && scenario.conjunction_reading == ConjunctionReading::FlipIndicator
                && scenario.samples_per_subject <= exact::MAX_ENUMERATION_N;
            if exact_case {
                match exact::exact_noisy_distribution(
                    t.p_x().min(1.0),
                    t.p_xy(),
                    scenario.noise_rate,
                    scenario.samples_per_subject,
                ) {
                    Ok(dist) => {
                        let p = dist.fallacy_probability();
                        let n = records.len() as f64;
                        let hits = records
                            .iter()
                            .filter(|r| matches!(r, JudgementRecord::Counts { x, xy, .. } if xy > x))
                            .count() as f64;
                        let se = (p * (1.0 - p) / n).sqrt();
                        let mc = hits / n;
                        out.push(outcome(
                            "noisy_matches_exact",
                            (mc - p).abs() <= 3.0 * se,
                            format!(
                                "P(J_XY > J_X): sampled {} vs exact {} (3σ = {})",
                                round12(mc),
                                round12(p),
                                round12(3.0 * se)
                            ),
                        ));
                        out.push(outcome(
                            "noisy_mean_difference",
                            dist.expected_difference() <= 1e-12,
                            format!("E[count_XY − count_X] = {}", round12(dist.expected_difference())),
                        ));
                    }
                    Err(e) => out.push(outcome("noisy_matches_exact", false, e.to_string())),
                }
            }
        }
        (Regime::Quantum, ScenarioKind::QuantumSequential(setup)) => match scenario.quantum_mode {
            QuantumMode::Analytic => {
                let first_is_x = setup.order == ctcog::judgement::MeasurementOrder::XThenY;
                let bad = records
                    .iter()
                    .filter(|r| {
                        let f = r.fractions();
                        f.xy > if first_is_x { f.x } else { f.y }
                    })
                    .count();
                out.push(outcome(
                    "sequential_bound",
                    bad == 0,
                    format!("{bad} record(s) with p(A then B) > p(A)"),
                ));
                out.push(outcome(
                    "no_double_fallacy",
                    stats.pct_double_errors == 0.0,
                    format!("pct_double_errors = {}", stats.pct_double_errors),
                ));
            }
            QuantumMode::Sampled => {
                if let Ok((px, py, pxy)) = quantum::analytic_probabilities(setup) {
                    let d = scenario.noise_rate;
                    let total = records.len() as f64 * f64::from(scenario.samples_per_subject);
                    let ok = [
                        (stats.mean_judged.x, px),
                        (stats.mean_judged.y, py),
                        (stats.mean_judged.xy, pxy),
                    ]
                    .iter()
                    .all(|&(m, p)| {
                        let p = quantum::noisy_expectation(p, d);
                        (m - p).abs() <= 3.0 * (p * (1.0 - p) / total).sqrt() + 1e-12
                    });
                    out.push(outcome(
                        "sampled_matches_analytic",
                        ok,
                        format!(
                            "analytic (p_X, p_Y, p_XY) = ({}, {}, {})",
                            round12(px),
                            round12(py),
                            round12(pxy)
                        ),
                    ));
                }
            }
        },
        _ => {}
    }
    out
}

/// Sweepable scenario parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    NoiseRate,
    SamplesPerSubject,
    /// Angle in degrees of the X event's ket.
    BasisAngle,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::NoiseRate => "noise_rate",
            SweepParameter::SamplesPerSubject => "samples_per_subject",
            SweepParameter::BasisAngle => "basis_angle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// Parses `NAME=START:STOP:STEP`; both ends are included when the step lands on them.
pub fn parse_sweep(spec: &str) -> Result<SweepSpec> {
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| CliError::InvalidRange(spec.into(), "expected NAME=A:B:STEP".into()))?;
    let parameter = match name {
        "noise_rate" => SweepParameter::NoiseRate,
        "samples_per_subject" => SweepParameter::SamplesPerSubject,
        "basis_angle" => SweepParameter::BasisAngle,
        other => return Err(CliError::UnknownParameter(other.into())),
    };
    let bad = |why: &str| CliError::InvalidRange(range.into(), why.into());
    let parts: Vec<f64> = range
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| bad("bounds and step must be numbers"))
        })
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("expected START:STOP:STEP"));
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("bounds and step must be finite"));
    }
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop is below start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > MAX_SWEEP_ROWS {
        return Err(bad("too many values"));
    }
    let values = (0..count)
        .map(|i| {
            let v = start + i as f64 * step;
            if (v - stop).abs() <= 1e-9 * step {
                stop
            } else {
                v
            }
        })
        .collect();
    Ok(SweepSpec { parameter, values })
}

fn with_parameter(base: &Scenario, p: SweepParameter, v: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match p {
        SweepParameter::NoiseRate => s.noise_rate = v,
        SweepParameter::SamplesPerSubject => {
            if v.fract() != 0.0 || v < 1.0 || v > f64::from(u32::MAX) {
                return Err(CliError::InvalidRange(
                    v.to_string(),
                    "samples_per_subject takes positive integers".into(),
                ));
            }
            s.samples_per_subject = v as u32;
        }
        SweepParameter::BasisAngle => match &mut s.kind {
            ScenarioKind::QuantumSequential(q) => q.x = linalg::angle_ket(v),
            ScenarioKind::ClassicalJoint(_) => {
                return Err(CliError::invariant("kind", "basis_angle applies to quantum scenarios"))
            }
        },
    }
    s.validate()?;
    Ok(s)
}

pub const SWEEP_HEADER: [&str; 10] = [
    "parameter",
    "value",
    "mean_error_x",
    "mean_error_y",
    "pct_conjunction_errors",
    "pct_double_errors",
    "ci_mean_error_x",
    "ci_mean_error_y",
    "ci_pct_conjunction_errors",
    "ci_pct_double_errors",
];

pub fn cmd_sweep(scenario_path: &Path, spec: &SweepSpec, opts: &SimulateOptions) -> Result<Report> {
    let (base, seed) = load_scenario(scenario_path, opts.seed, opts.env_seed.as_deref())?;
    let regime = opts.regime.unwrap_or(match base.kind {
        ScenarioKind::QuantumSequential(_) => Regime::Quantum,
        ScenarioKind::ClassicalJoint(_) => Regime::Noisy,
    });
    let rows = spec
        .values
        .iter()
        .map(|&v| {
            let s = with_parameter(&base, spec.parameter, v)?;
            let stats = conjunction_stats(&judge_cohort(&s, regime, opts.execution)?)?;
            Ok(SweepRow {
                value: v,
                mean_error_x: stats.mean_conjunction_error_x,
                mean_error_y: stats.mean_conjunction_error_y,
                pct_conjunction_errors: stats.pct_conjunction_errors,
                pct_double_errors: stats.pct_double_errors,
                ci_mean_error_x: stats.ci_mean_error_x,
                ci_mean_error_y: stats.ci_mean_error_y,
                ci_pct_conjunction_errors: stats.ci_pct_conjunction_errors,
                ci_pct_double_errors: stats.ci_pct_double_errors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut command = vec!["sweep".to_string(), path_arg(scenario_path), "--param".into()];
    command.push(format!("{}={}", spec.parameter.name(), spec.values.len()));
    Ok(Report::new(
        command,
        Some(seed),
        Some(ScenarioFile::from_scenario(&base)),
        ReportResult::Sweep(SweepResult {
            parameter: spec.parameter.name().to_string(),
            regime,
            rows,
        }),
    ))
}

/// CSV rendering of a sweep, one row per value under [`SWEEP_HEADER`].
pub fn sweep_csv(result: &SweepResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        let nums = [
            r.value,
            r.mean_error_x,
            r.mean_error_y,
            r.pct_conjunction_errors,
            r.pct_double_errors,
            r.ci_mean_error_x,
            r.ci_mean_error_y,
            r.ci_pct_conjunction_errors,
            r.ci_pct_double_errors,
        ];
        let mut row = vec![result.parameter.clone()];
        row.extend(nums.iter().map(|x| round12(*x).to_string()));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII numbers is UTF-8"))
}

impl Report {
    /// Assertions evaluated under `--assert` that did not hold.
    pub fn failed_assertions(&self) -> usize {
        match &self.result {
            ReportResult::Simulate(SimulateResult {
                assertions: Some(a), ..
            }) => a.iter().filter(|o| !o.passed).count(),
            _ => 0,
        }
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        match &self.result {
            ReportResult::Check(c) => {
                let media: Vec<String> = c.media.iter().map(|m| format!("{}: {}", m.substrate, m.classification)).collect();
                format!("check: {} variable(s); {}", c.variables.len(), media.join("; "))
            }
            ReportResult::Simulate(s) => format!(
                "simulate: regime={} subjects={} pct_conjunction_errors={} pct_double_errors={} mean_error_x={} mean_error_y={}",
                regime_name(s.regime),
                s.stats.subjects,
                s.stats.pct_conjunction_errors,
                s.stats.pct_double_errors,
                s.stats.mean_conjunction_error_x,
                s.stats.mean_conjunction_error_y,
            ),
            ReportResult::Sweep(s) => format!("sweep: {} over {} value(s)", s.parameter, s.rows.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_range_has_eleven_rows() {
        let s = parse_sweep("noise_rate=0:0.5:0.05").unwrap();
        assert_eq!(s.values.len(), 11);
        assert_eq!(*s.values.last().unwrap(), 0.5);
    }

    #[test]
    fn bad_ranges() {
        assert!(matches!(
            parse_sweep("noise_rate=0:0.5:0"),
            Err(CliError::InvalidRange(..))
        ));
        assert!(matches!(
            parse_sweep("noise_rate=0.5:0:0.1"),
            Err(CliError::InvalidRange(..))
        ));
        assert!(matches!(parse_sweep("noise_rate=0:1"), Err(CliError::InvalidRange(..))));
        assert!(matches!(
            parse_sweep("temperature=0:1:0.1"),
            Err(CliError::UnknownParameter(_))
        ));
    }
}
