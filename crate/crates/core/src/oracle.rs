//! Possibility decisions for tasks, and classification of variables and media.
//!
//! Classical backend: a task is possible iff a state function sends every
//! state of each input attribute into its paired output. One ancilla with a
//! fixed initial state is allowed, so non-injective maps are still possible.
//!
//! Quantum backend: the named task families (cloning, distinguishing,
//! measuring, preparation) reduce to pairwise orthogonality of the relevant
//! variable. General tasks are possible when their inputs are pairwise
//! orthogonal, or, for one-dimensional attributes, when some isometry maps
//! every input ray onto its output ray (the Gram matrices agree up to
//! phases). Anything else is reported as unsupported.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::substrate::{Attribute, BackendKind, State, Substrate, SubstrateError, Variable};
use crate::task::{Task, TaskError, TaskKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("unsupported task shape: {0}")]
    UnsupportedTaskShape(String),
    #[error("`{0}` is not an information variable")]
    NotInformationVariable(String),
    #[error(transparent)]
    Substrate(#[from] SubstrateError),
    #[error(transparent)]
    Task(#[from] TaskError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    StateFunctionExists,
    ConflictingOutputs,
    Orthogonal,
    NonOrthogonal,
    InnerProductsPreserved,
    InnerProductsChanged,
}

/// Pairwise overlaps `tr(P_x P_y)` of a list of attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub attributes: Vec<String>,
    pub overlaps: Vec<Vec<f64>>,
    pub orthogonal: bool,
    /// The first non-orthogonal pair, with its overlap.
    pub worst_pair: Option<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Explicit classical construction: `(input state, output state)` labels.
    StateMap {
        assignments: Vec<(String, String)>,
        needs_ancilla: bool,
    },
    Orthogonality(OrthogonalityReport),
    /// Gram matrices of the input and output rays.
    Gram {
        input: Vec<Vec<Complex64>>,
        output: Vec<Vec<Complex64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PossibilityVerdict {
    pub possible: bool,
    pub witness: Option<Witness>,
    pub reason: Reason,
}

impl PossibilityVerdict {
    fn yes(witness: Witness, reason: Reason) -> Self {
        PossibilityVerdict {
            possible: true,
            witness: Some(witness),
            reason,
        }
    }

    fn no(witness: Option<Witness>, reason: Reason) -> Self {
        PossibilityVerdict {
            possible: false,
            witness,
            reason,
        }
    }
}

/// Decides whether a classical relation, given as raw pairs, can be realized
/// by a state function. Unlike [`Task`], the pairs may overlap in their inputs.
pub fn classical_relation_possible(pairs: &[(Attribute, Attribute)]) -> Result<PossibilityVerdict> {
    let Some((x0, y0)) = pairs.first() else {
        return Err(TaskError::EmptyTask.into());
    };
    let (input, output) = (x0.substrate().clone(), y0.substrate().clone());
    if input.kind() != BackendKind::Classical || output.kind() != BackendKind::Classical {
        return Err(SubstrateError::WrongBackend(BackendKind::Classical).into());
    }
    let mut covered: Vec<Option<BTreeSet<usize>>> = vec![None; input.size()];
    for (x, y) in pairs {
        let ys = y.indices().expect("classical");
        for &s in x.indices().expect("classical") {
            let slot = &mut covered[s];
            *slot = Some(match slot.take() {
                None => ys.clone(),
                Some(prev) => prev.intersection(ys).copied().collect(),
            });
        }
    }
    let mut assignments = Vec::new();
    let mut images = BTreeSet::new();
    for (s, targets) in covered.iter().enumerate() {
        let Some(targets) = targets else { continue };
        let Some(&t) = targets.iter().next() else {
            return Ok(PossibilityVerdict::no(None, Reason::ConflictingOutputs));
        };
        images.insert(t);
        assignments.push((
            input.label(s).unwrap().to_string(),
            output.label(t).unwrap().to_string(),
        ));
    }
    let needs_ancilla = images.len() < assignments.len();
    Ok(PossibilityVerdict::yes(
        Witness::StateMap {
            assignments,
            needs_ancilla,
        },
        Reason::StateFunctionExists,
    ))
}

/// Pairwise orthogonality of a list of attributes.
pub fn orthogonality_report(attributes: &[Attribute]) -> OrthogonalityReport {
    let n = attributes.len();
    let mut overlaps = vec![vec![0.0; n]; n];
    let mut worst_pair = None;
    for i in 0..n {
        for j in 0..n {
            overlaps[i][j] = attributes[i].overlap(&attributes[j]);
            if i < j && worst_pair.is_none() && !attributes[i].is_orthogonal_to(&attributes[j]) {
                worst_pair = Some((i, j, overlaps[i][j]));
            }
        }
    }
    OrthogonalityReport {
        attributes: attributes.iter().map(|a| a.name().to_string()).collect(),
        overlaps,
        orthogonal: worst_pair.is_none(),
        worst_pair,
    }
}

fn orthogonality_verdict(attributes: &[Attribute]) -> PossibilityVerdict {
    let report = orthogonality_report(attributes);
    if report.orthogonal {
        PossibilityVerdict::yes(Witness::Orthogonality(report), Reason::Orthogonal)
    } else {
        PossibilityVerdict::no(Some(Witness::Orthogonality(report)), Reason::NonOrthogonal)
    }
}

fn gram(rays: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
    rays.iter()
        .map(|a| rays.iter().map(|b| linalg::inner(a, b)).collect())
        .collect()
}

/// Is there a diagonal of phases `φ` with `G_in[i][j] = conj(φ_i) φ_j G_out[i][j]`?
fn gram_equivalent(g_in: &[Vec<Complex64>], g_out: &[Vec<Complex64>], tol: f64) -> bool {
    let n = g_in.len();
    for i in 0..n {
        for j in 0..n {
            if (g_in[i][j].norm() - g_out[i][j].norm()).abs() > tol {
                return false;
            }
        }
    }
    let mut phase: Vec<Option<Complex64>> = vec![None; n];
    for root in 0..n {
        if phase[root].is_some() {
            continue;
        }
        phase[root] = Some(Complex64::new(1.0, 0.0));
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let pi = phase[i].unwrap();
            for j in 0..n {
                if phase[j].is_some() || g_out[i][j].norm() <= tol {
                    continue;
                }
                let z = g_in[i][j] / (pi.conj() * g_out[i][j]);
                phase[j] = Some(z / z.norm());
                stack.push(j);
            }
        }
    }
    let phase: Vec<Complex64> = phase.into_iter().map(Option::unwrap).collect();
    (0..n).all(|i| (0..n).all(|j| (g_in[i][j] - phase[i].conj() * phase[j] * g_out[i][j]).norm() <= tol))
}

fn quantum_general(task: &Task) -> Result<PossibilityVerdict> {
    let inputs: Vec<Attribute> = task.pairs().iter().map(|(x, _)| x.clone()).collect();
    let report = orthogonality_report(&inputs);
    if report.orthogonal {
        return Ok(PossibilityVerdict::yes(
            Witness::Orthogonality(report),
            Reason::Orthogonal,
        ));
    }
    let rank_one = task.pairs().iter().all(|(x, y)| x.size() == 1 && y.size() == 1);
    if !rank_one {
        return Err(OracleError::UnsupportedTaskShape(format!(
            "`{}` has non-orthogonal inputs of rank above one",
            task.label()
        )));
    }
    let ins: Vec<&[Complex64]> = task
        .pairs()
        .iter()
        .map(|(x, _)| x.basis().unwrap()[0].as_slice())
        .collect();
    let outs: Vec<&[Complex64]> = task
        .pairs()
        .iter()
        .map(|(_, y)| y.basis().unwrap()[0].as_slice())
        .collect();
    let (g_in, g_out) = (gram(&ins), gram(&outs));
    let tol = task
        .input_substrate()
        .tolerance()
        .max(task.output_substrate().tolerance());
    let ok = gram_equivalent(&g_in, &g_out, tol);
    let witness = Witness::Gram {
        input: g_in,
        output: g_out,
    };
    Ok(if ok {
        PossibilityVerdict::yes(witness, Reason::InnerProductsPreserved)
    } else {
        PossibilityVerdict::no(Some(witness), Reason::InnerProductsChanged)
    })
}

/// Decides whether `task` is possible on its substrates' backend.
pub fn is_possible(task: &Task) -> Result<PossibilityVerdict> {
    match task.input_substrate().kind() {
        BackendKind::Classical => classical_relation_possible(task.pairs()),
        BackendKind::Quantum => match task.kind() {
            TaskKind::Cloning(v) | TaskKind::Distinguishing(v) | TaskKind::Measuring(v) => {
                Ok(orthogonality_verdict(v.attributes()))
            }
            TaskKind::Preparation(labels) => Ok(orthogonality_verdict(labels.attributes())),
            TaskKind::General => quantum_general(task),
        },
    }
}

/// `x ⊥ y` for every pair of attributes makes the variable distinguishable.
pub fn is_distinguishable(variable: &Variable) -> PossibilityVerdict {
    match variable.substrate().kind() {
        BackendKind::Classical => {
            let s = variable.substrate();
            let assignments = variable
                .attributes()
                .iter()
                .flat_map(|a| {
                    a.indices()
                        .unwrap()
                        .iter()
                        .map(move |&i| (s.label(i).unwrap().to_string(), format!("'{}'", a.name())))
                })
                .collect();
            PossibilityVerdict::yes(
                Witness::StateMap {
                    assignments,
                    needs_ancilla: false,
                },
                Reason::StateFunctionExists,
            )
        }
        BackendKind::Quantum => orthogonality_verdict(variable.attributes()),
    }
}

/// Possibility of the cloning task with the given receptive attribute
/// (the first attribute of the variable when `None`).
pub fn is_clonable(variable: &Variable, receptive: Option<&Attribute>) -> Result<PossibilityVerdict> {
    let receptive = receptive.unwrap_or(&variable.attributes()[0]);
    is_possible(&Task::cloning(variable, receptive)?)
}

pub fn is_information_variable(variable: &Variable) -> bool {
    is_distinguishable(variable).possible && is_clonable(variable, None).is_ok_and(|v| v.possible)
}

pub fn is_information_medium(substrate: &Substrate, variables: &[Variable]) -> bool {
    variables
        .iter()
        .any(|v| v.substrate() == substrate && is_information_variable(v))
}

/// `bar(bar(x)) = x` for every attribute of an information variable.
pub fn is_observable(variable: &Variable) -> Result<bool> {
    if !is_information_variable(variable) {
        return Err(OracleError::NotInformationVariable(variable.name().to_string()));
    }
    Ok(variable.attributes().iter().all(|x| x.bar().bar() == *x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperinformationWitness {
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumClassification {
    pub is_information_medium: bool,
    pub information_variables: Vec<String>,
    pub observables: Vec<String>,
    pub superinformation_witness: Option<SuperinformationWitness>,
}

/// Searches the declared variables, in order, for two information observables
/// with mutually disjoint attributes whose union is not an information variable.
pub fn is_superinformation_medium(substrate: &Substrate, declared: &[Variable]) -> MediumClassification {
    let on_substrate: Vec<&Variable> = declared.iter().filter(|v| v.substrate() == substrate).collect();
    let info: Vec<bool> = on_substrate.iter().map(|v| is_information_variable(v)).collect();
    let observable: Vec<bool> = on_substrate
        .iter()
        .zip(&info)
        .map(|(v, &i)| i && is_observable(v).unwrap_or(false))
        .collect();

    let mut witness = None;
    'search: for i in 0..on_substrate.len() {
        for j in i + 1..on_substrate.len() {
            if !(observable[i] && observable[j]) {
                continue;
            }
            // the union must itself be a valid variable: all attributes mutually disjoint
            let Ok(union) = Variable::joined(on_substrate[i], on_substrate[j]) else {
                continue;
            };
            if !is_information_variable(&union) {
                witness = Some(SuperinformationWitness {
                    x: on_substrate[i].name().to_string(),
                    y: on_substrate[j].name().to_string(),
                });
                break 'search;
            }
        }
    }
    let names = |flags: &[bool]| {
        on_substrate
            .iter()
            .zip(flags)
            .filter(|(_, &f)| f)
            .map(|(v, _)| v.name().to_string())
            .collect()
    };
    MediumClassification {
        is_information_medium: info.iter().any(|&b| b),
        information_variables: names(&info),
        observables: names(&observable),
        superinformation_witness: witness,
    }
}

/// Weights of a state on each attribute of an observable.
///
/// Quantum: `‖P_x ψ‖²`, summing to one when the attributes span the space.
/// Classical: the indicator of the attribute holding the state.
pub fn indistinguishability_signature(state: &State, observable: &Variable) -> Result<Vec<f64>> {
    observable
        .attributes()
        .iter()
        .try_for_each(|a| a.contains(state).map(|_| ()))?;
    Ok(match state.vector() {
        Some(v) => observable
            .attributes()
            .iter()
            .map(|a| linalg::projected_weight(v, a.basis().unwrap()))
            .collect(),
        None => observable
            .attributes()
            .iter()
            .map(|a| if a.contains(state).unwrap() { 1.0 } else { 0.0 })
            .collect(),
    })
}

/// Signature of an attribute: classical indicator of containment; quantum
/// `tr(P_a P_x) / dim(a)`, the average weight over the attribute, which
/// coincides with the state signature for rays.
pub fn attribute_signature(attribute: &Attribute, observable: &Variable) -> Result<Vec<f64>> {
    if attribute.substrate() != observable.substrate() {
        return Err(SubstrateError::SubstrateMismatch {
            expected: observable.substrate().name().to_string(),
            found: attribute.substrate().name().to_string(),
        }
        .into());
    }
    Ok(observable
        .attributes()
        .iter()
        .map(|x| match attribute.substrate().kind() {
            BackendKind::Classical => {
                if attribute.is_subset_of(x) {
                    1.0
                } else {
                    0.0
                }
            }
            BackendKind::Quantum => attribute.overlap(x) / attribute.size() as f64,
        })
        .collect())
}

/// Groups states whose signatures over `observable` agree within `tolerance`.
pub fn indistinguishability_classes(
    states: &[State],
    observable: &Variable,
    tolerance: f64,
) -> Result<Vec<Vec<usize>>> {
    let sigs = states
        .iter()
        .map(|s| indistinguishability_signature(s, observable))
        .collect::<Result<Vec<_>>>()?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, sig) in sigs.iter().enumerate() {
        let same = |c: &Vec<usize>| sigs[c[0]].iter().zip(sig).all(|(a, b)| (a - b).abs() <= tolerance);
        match classes.iter_mut().find(|c| same(c)) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(classes)
}
