//! Substrates, states, attributes and variables for the two backends.
//!
//! A classical substrate is a finite ordered set of opaque state labels; an
//! attribute over it is a nonempty subset of those labels. A quantum
//! substrate is `C^d`; an attribute is a closed subspace held as an
//! orthonormal list of generators, so that the bar operation is the
//! orthocomplement and `bar(bar(x)) = x` is decidable.
//!
//! Composite substrates keep their immediate factors. Classical composite
//! states are indexed in mixed radix with the first factor most significant,
//! which matches the Kronecker ordering used for quantum composites.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, Ket, Matrix};

/// Default absolute tolerance on inner products for quantum substrates.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubstrateError {
    #[error("substrate has no states")]
    EmptySubstrate,
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown state `{label}` on substrate `{substrate}`")]
    UnknownState { substrate: String, label: String },
    #[error("attribute `{0}` is empty")]
    EmptyAttribute(String),
    #[error("attributes `{0}` and `{1}` overlap")]
    OverlappingAttributes(String, String),
    #[error("a variable needs at least one attribute")]
    NoAttributes,
    #[error("substrate mismatch: expected `{expected}`, found `{found}`")]
    SubstrateMismatch { expected: String, found: String },
    #[error("cannot compose a classical substrate with a quantum one")]
    MixedBackends,
    #[error("operation requires a {0:?} substrate")]
    WrongBackend(BackendKind),
    #[error("vector has dimension {found}, substrate has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector `{0}` is not normalized")]
    NotNormalized(String),
    #[error("generators of `{0}` are not mutually orthogonal")]
    NotOrthogonal(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("factor index {index} out of range for {len} factors")]
    IndexOutOfRange { index: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, SubstrateError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Classical { labels: Vec<String> },
    Quantum { dimension: usize },
}

#[derive(Debug, PartialEq)]
struct SubstrateData {
    name: String,
    space: Space,
    tolerance: f64,
    factors: Vec<Substrate>,
}

/// A system whose states a task may change. Cheap to clone; equality is structural.
#[derive(Clone)]
pub struct Substrate(Arc<SubstrateData>);

impl PartialEq for Substrate {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl fmt::Debug for Substrate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Substrate({}, {} states)", self.0.name, self.size())
    }
}

impl Substrate {
    pub fn classical<S: AsRef<str>>(name: &str, labels: &[S]) -> Result<Self> {
        if labels.is_empty() {
            return Err(SubstrateError::EmptySubstrate);
        }
        let mut seen = BTreeSet::new();
        for l in labels {
            if !seen.insert(l.as_ref()) {
                return Err(SubstrateError::DuplicateLabel(l.as_ref().to_string()));
            }
        }
        Ok(Substrate(Arc::new(SubstrateData {
            name: name.to_string(),
            space: Space::Classical {
                labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            },
            tolerance: DEFAULT_TOLERANCE,
            factors: Vec::new(),
        })))
    }

    pub fn quantum(name: &str, dimension: usize) -> Result<Self> {
        Self::quantum_with_tolerance(name, dimension, DEFAULT_TOLERANCE)
    }

    pub fn quantum_with_tolerance(name: &str, dimension: usize, tolerance: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(SubstrateError::EmptySubstrate);
        }
        Ok(Substrate(Arc::new(SubstrateData {
            name: name.to_string(),
            space: Space::Quantum { dimension },
            tolerance,
            factors: Vec::new(),
        })))
    }

    /// Product substrate: Cartesian product of labels, or tensor product of spaces.
    pub fn compose(a: &Substrate, b: &Substrate) -> Result<Self> {
        let name = format!("{}⊗{}", a.name(), b.name());
        let space = match (&a.0.space, &b.0.space) {
            (Space::Classical { labels: la }, Space::Classical { labels: lb }) => {
                let mut labels = Vec::with_capacity(la.len() * lb.len());
                for x in la {
                    for y in lb {
                        labels.push(format!("({x},{y})"));
                    }
                }
                Space::Classical { labels }
            }
            (Space::Quantum { dimension: da }, Space::Quantum { dimension: db }) => {
                Space::Quantum { dimension: da * db }
            }
            _ => return Err(SubstrateError::MixedBackends),
        };
        Ok(Substrate(Arc::new(SubstrateData {
            name,
            space,
            tolerance: a.tolerance().min(b.tolerance()),
            factors: vec![a.clone(), b.clone()],
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> BackendKind {
        match self.0.space {
            Space::Classical { .. } => BackendKind::Classical,
            Space::Quantum { .. } => BackendKind::Quantum,
        }
    }

    pub fn space(&self) -> &Space {
        &self.0.space
    }

    pub fn tolerance(&self) -> f64 {
        self.0.tolerance
    }

    /// Number of classical states, or the Hilbert-space dimension.
    pub fn size(&self) -> usize {
        match &self.0.space {
            Space::Classical { labels } => labels.len(),
            Space::Quantum { dimension } => *dimension,
        }
    }

    pub fn factors(&self) -> &[Substrate] {
        &self.0.factors
    }

    pub fn is_composite(&self) -> bool {
        !self.0.factors.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        match &self.0.space {
            Space::Classical { labels } => Some(labels),
            Space::Quantum { .. } => None,
        }
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.labels()
            .ok_or(SubstrateError::WrongBackend(BackendKind::Classical))?
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SubstrateError::UnknownState {
                substrate: self.name().to_string(),
                label: label.to_string(),
            })
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels().and_then(|l| l.get(index)).map(String::as_str)
    }

    fn factor_sizes(&self) -> Vec<usize> {
        self.0.factors.iter().map(Substrate::size).collect()
    }

    fn check_factor(&self, factor: usize) -> Result<()> {
        let len = self.0.factors.len();
        if len < 2 || factor >= len {
            return Err(SubstrateError::IndexOutOfRange { index: factor, len });
        }
        Ok(())
    }

    /// Splits a composite index into per-factor indices.
    pub fn split_index(&self, mut index: usize) -> Vec<usize> {
        let sizes = self.factor_sizes();
        let mut out = vec![0; sizes.len()];
        for (slot, size) in out.iter_mut().zip(&sizes).rev() {
            *slot = index % size;
            index /= size;
        }
        out
    }

    pub fn join_index(&self, parts: &[usize]) -> usize {
        self.factor_sizes()
            .iter()
            .zip(parts)
            .fold(0, |acc, (size, p)| acc * size + p)
    }

    fn ensure_same(&self, other: &Substrate) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SubstrateError::SubstrateMismatch {
                expected: self.name().to_string(),
                found: other.name().to_string(),
            })
        }
    }

    /// Extends a classical state map on one factor to the whole composite,
    /// leaving every other factor untouched.
    pub fn lift_map(&self, factor: usize, map: &[usize]) -> Result<Vec<usize>> {
        self.check_factor(factor)?;
        if self.kind() != BackendKind::Classical {
            return Err(SubstrateError::WrongBackend(BackendKind::Classical));
        }
        let fsize = self.0.factors[factor].size();
        if map.len() != fsize {
            return Err(SubstrateError::DimensionMismatch {
                expected: fsize,
                found: map.len(),
            });
        }
        Ok((0..self.size())
            .map(|i| {
                let mut parts = self.split_index(i);
                parts[factor] = map[parts[factor]];
                self.join_index(&parts)
            })
            .collect())
    }

    /// `I ⊗ .. ⊗ op ⊗ .. ⊗ I` with `op` acting on the given factor.
    pub fn lift_operator(&self, factor: usize, op: &Matrix) -> Result<Matrix> {
        self.check_factor(factor)?;
        if self.kind() != BackendKind::Quantum {
            return Err(SubstrateError::WrongBackend(BackendKind::Quantum));
        }
        let sizes = self.factor_sizes();
        if op.dim() != sizes[factor] {
            return Err(SubstrateError::DimensionMismatch {
                expected: sizes[factor],
                found: op.dim(),
            });
        }
        let mut out: Option<Matrix> = None;
        for (k, &d) in sizes.iter().enumerate() {
            let m = if k == factor { op.clone() } else { Matrix::identity(d) };
            out = Some(match out {
                None => m,
                Some(acc) => acc.kron(&m),
            });
        }
        Ok(out.expect("composite has factors"))
    }
}

#[derive(Debug, Clone)]
pub enum AttributeRepr {
    /// Sorted state indices.
    Classical(BTreeSet<usize>),
    /// Orthonormal generators of the subspace.
    Quantum(Vec<Ket>),
}

/// The set of states in which a property holds.
///
/// Equality ignores the display name: classical attributes compare as sets,
/// quantum ones by mutual subspace containment within the substrate tolerance.
#[derive(Debug, Clone)]
pub struct Attribute {
    substrate: Substrate,
    name: String,
    repr: AttributeRepr,
}

impl PartialEq for Attribute {
    fn eq(&self, other: &Self) -> bool {
        if self.substrate != other.substrate {
            return false;
        }
        match (&self.repr, &other.repr) {
            (AttributeRepr::Classical(a), AttributeRepr::Classical(b)) => a == b,
            (AttributeRepr::Quantum(a), AttributeRepr::Quantum(b)) => {
                a.len() == b.len() && self.is_subset_of(other) && other.is_subset_of(self)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Attribute {
    pub fn classical<S: AsRef<str>>(substrate: &Substrate, name: &str, labels: &[S]) -> Result<Self> {
        let indices = labels
            .iter()
            .map(|l| substrate.state_index(l.as_ref()))
            .collect::<Result<BTreeSet<_>>>()?;
        Self::from_indices(substrate, name, indices)
    }

    pub fn from_indices(substrate: &Substrate, name: &str, indices: BTreeSet<usize>) -> Result<Self> {
        if substrate.kind() != BackendKind::Classical {
            return Err(SubstrateError::WrongBackend(BackendKind::Classical));
        }
        if indices.is_empty() {
            return Err(SubstrateError::EmptyAttribute(name.to_string()));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= substrate.size()) {
            return Err(SubstrateError::UnknownState {
                substrate: substrate.name().to_string(),
                label: format!("#{i}"),
            });
        }
        Ok(Attribute {
            substrate: substrate.clone(),
            name: name.to_string(),
            repr: AttributeRepr::Classical(indices),
        })
    }

    /// Subspace from an orthonormal generator list, validated within tolerance.
    pub fn subspace(substrate: &Substrate, name: &str, generators: Vec<Ket>) -> Result<Self> {
        if substrate.kind() != BackendKind::Quantum {
            return Err(SubstrateError::WrongBackend(BackendKind::Quantum));
        }
        if generators.is_empty() {
            return Err(SubstrateError::EmptyAttribute(name.to_string()));
        }
        let tol = substrate.tolerance();
        for g in &generators {
            check_dimension(substrate, g)?;
            if (linalg::norm_sqr(g) - 1.0).abs() > tol {
                return Err(SubstrateError::NotNormalized(name.to_string()));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if linalg::inner(a, b).norm() > tol {
                    return Err(SubstrateError::NotOrthogonal(name.to_string()));
                }
            }
        }
        Ok(Attribute {
            substrate: substrate.clone(),
            name: name.to_string(),
            repr: AttributeRepr::Quantum(generators),
        })
    }

    /// Subspace spanned by arbitrary vectors; they are orthonormalized first.
    pub fn span(substrate: &Substrate, name: &str, vectors: &[Ket]) -> Result<Self> {
        if substrate.kind() != BackendKind::Quantum {
            return Err(SubstrateError::WrongBackend(BackendKind::Quantum));
        }
        for v in vectors {
            check_dimension(substrate, v)?;
        }
        let basis = linalg::orthonormal_span(vectors, substrate.tolerance().sqrt());
        if basis.is_empty() {
            return Err(SubstrateError::EmptyAttribute(name.to_string()));
        }
        Ok(Attribute {
            substrate: substrate.clone(),
            name: name.to_string(),
            repr: AttributeRepr::Quantum(basis),
        })
    }

    /// The attribute holding every state of the substrate.
    pub fn full(substrate: &Substrate) -> Self {
        let repr = match substrate.space() {
            Space::Classical { labels } => AttributeRepr::Classical((0..labels.len()).collect()),
            Space::Quantum { dimension } => {
                AttributeRepr::Quantum((0..*dimension).map(|i| linalg::basis_ket(*dimension, i)).collect())
            }
        };
        Attribute {
            substrate: substrate.clone(),
            name: format!("all({})", substrate.name()),
            repr,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }

    pub fn repr(&self) -> &AttributeRepr {
        &self.repr
    }

    pub fn indices(&self) -> Option<&BTreeSet<usize>> {
        match &self.repr {
            AttributeRepr::Classical(s) => Some(s),
            AttributeRepr::Quantum(_) => None,
        }
    }

    pub fn basis(&self) -> Option<&[Ket]> {
        match &self.repr {
            AttributeRepr::Quantum(b) => Some(b),
            AttributeRepr::Classical(_) => None,
        }
    }

    /// Number of states, or subspace dimension.
    pub fn size(&self) -> usize {
        match &self.repr {
            AttributeRepr::Classical(s) => s.len(),
            AttributeRepr::Quantum(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    fn tol(&self) -> f64 {
        self.substrate.tolerance()
    }

    pub fn contains(&self, state: &State) -> Result<bool> {
        self.substrate.ensure_same(&state.substrate)?;
        Ok(match (&self.repr, &state.repr) {
            (AttributeRepr::Classical(s), StateRepr::Classical(i)) => s.contains(i),
            (AttributeRepr::Quantum(b), StateRepr::Quantum(v)) => {
                linalg::norm_sqr(&linalg::residual(v, b)) <= self.tol()
            }
            _ => unreachable!("same substrate implies same backend"),
        })
    }

    pub fn is_subset_of(&self, other: &Attribute) -> bool {
        if self.substrate != other.substrate {
            return false;
        }
        match (&self.repr, &other.repr) {
            (AttributeRepr::Classical(a), AttributeRepr::Classical(b)) => a.is_subset(b),
            (AttributeRepr::Quantum(a), AttributeRepr::Quantum(b)) => a
                .iter()
                .all(|v| linalg::norm_sqr(&linalg::residual(v, b)) <= self.tol()),
            _ => false,
        }
    }

    /// Classical: empty intersection. Quantum: the subspaces meet only at zero.
    pub fn is_disjoint_from(&self, other: &Attribute) -> bool {
        match (&self.repr, &other.repr) {
            (AttributeRepr::Classical(a), AttributeRepr::Classical(b)) => a.is_disjoint(b),
            (AttributeRepr::Quantum(a), AttributeRepr::Quantum(b)) => {
                let mut all = a.clone();
                all.extend(b.iter().cloned());
                linalg::orthonormal_span(&all, self.tol().sqrt()).len() == a.len() + b.len()
            }
            _ => false,
        }
    }

    /// `x ⊥ y`: every pair of generators has inner product within tolerance of zero.
    /// Classical attributes are orthogonal exactly when disjoint.
    pub fn is_orthogonal_to(&self, other: &Attribute) -> bool {
        match (&self.repr, &other.repr) {
            (AttributeRepr::Classical(a), AttributeRepr::Classical(b)) => a.is_disjoint(b),
            (AttributeRepr::Quantum(a), AttributeRepr::Quantum(b)) => a
                .iter()
                .all(|u| b.iter().all(|v| linalg::inner(u, v).norm() <= self.tol())),
            _ => false,
        }
    }

    /// `tr(P_x P_y)`, which is `|⟨x|y⟩|²` for rays and an overlap count for sets.
    pub fn overlap(&self, other: &Attribute) -> f64 {
        match (&self.repr, &other.repr) {
            (AttributeRepr::Classical(a), AttributeRepr::Classical(b)) => a.intersection(b).count() as f64,
            (AttributeRepr::Quantum(a), AttributeRepr::Quantum(b)) => a
                .iter()
                .flat_map(|u| b.iter().map(move |v| linalg::inner(u, v).norm_sqr()))
                .sum(),
            _ => 0.0,
        }
    }

    /// Classical union, or span of the combined generators.
    pub fn union(&self, other: &Attribute) -> Result<Attribute> {
        self.substrate.ensure_same(&other.substrate)?;
        let name = format!("{}∪{}", self.name, other.name);
        Ok(match (&self.repr, &other.repr) {
            (AttributeRepr::Classical(a), AttributeRepr::Classical(b)) => Attribute {
                substrate: self.substrate.clone(),
                name,
                repr: AttributeRepr::Classical(a.union(b).copied().collect()),
            },
            (AttributeRepr::Quantum(a), AttributeRepr::Quantum(b)) => {
                let mut all = a.clone();
                all.extend(b.iter().cloned());
                Attribute {
                    substrate: self.substrate.clone(),
                    name,
                    repr: AttributeRepr::Quantum(linalg::orthonormal_span(&all, self.tol().sqrt())),
                }
            }
            _ => unreachable!("same substrate implies same backend"),
        })
    }

    /// The bar operation: every state distinguishable from this attribute.
    ///
    /// Classical backend: plain complement. Quantum backend: orthocomplement.
    /// The result may be empty, which marks the attribute as maximal.
    pub fn bar(&self) -> Attribute {
        let repr = match &self.repr {
            AttributeRepr::Classical(s) => {
                AttributeRepr::Classical((0..self.substrate.size()).filter(|i| !s.contains(i)).collect())
            }
            AttributeRepr::Quantum(b) => {
                AttributeRepr::Quantum(linalg::orthocomplement(b, self.substrate.size(), self.tol().sqrt()))
            }
        };
        Attribute {
            substrate: self.substrate.clone(),
            name: format!("bar({})", self.name),
            repr,
        }
    }

    /// `(x, y)` on the composite of both substrates.
    pub fn product(&self, other: &Attribute) -> Result<Attribute> {
        let composite = Substrate::compose(&self.substrate, &other.substrate)?;
        self.product_on(other, &composite)
    }

    fn product_on(&self, other: &Attribute, composite: &Substrate) -> Result<Attribute> {
        let name = format!("({},{})", self.name, other.name);
        let repr = match (&self.repr, &other.repr) {
            (AttributeRepr::Classical(a), AttributeRepr::Classical(b)) => AttributeRepr::Classical(
                a.iter()
                    .flat_map(|&i| b.iter().map(move |&j| composite.join_index(&[i, j])))
                    .collect(),
            ),
            (AttributeRepr::Quantum(a), AttributeRepr::Quantum(b)) => AttributeRepr::Quantum(
                a.iter()
                    .flat_map(|u| b.iter().map(move |v| linalg::kron_ket(u, v)))
                    .collect(),
            ),
            _ => return Err(SubstrateError::MixedBackends),
        };
        Ok(Attribute {
            substrate: composite.clone(),
            name,
            repr,
        })
    }

    /// Classical projection of this state set onto one factor of its composite substrate.
    pub fn project_onto(&self, factor: usize) -> Result<Attribute> {
        self.substrate.check_factor(factor)?;
        let AttributeRepr::Classical(s) = &self.repr else {
            return Err(SubstrateError::WrongBackend(BackendKind::Classical));
        };
        let indices = s.iter().map(|&i| self.substrate.split_index(i)[factor]).collect();
        Ok(Attribute {
            substrate: self.substrate.factors()[factor].clone(),
            name: format!("{}|{}", self.name, factor),
            repr: AttributeRepr::Classical(indices),
        })
    }

    /// Image of a classical attribute under a state map.
    pub fn map_states(&self, map: &[usize]) -> Result<Attribute> {
        let AttributeRepr::Classical(s) = &self.repr else {
            return Err(SubstrateError::WrongBackend(BackendKind::Classical));
        };
        Ok(Attribute {
            substrate: self.substrate.clone(),
            name: self.name.clone(),
            repr: AttributeRepr::Classical(s.iter().map(|&i| map[i]).collect()),
        })
    }
}

fn check_dimension(substrate: &Substrate, v: &[Complex64]) -> Result<()> {
    if v.len() != substrate.size() {
        return Err(SubstrateError::DimensionMismatch {
            expected: substrate.size(),
            found: v.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Classical(usize),
    Quantum(Ket),
}

/// A single state: a classical label or a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    substrate: Substrate,
    repr: StateRepr,
}

impl State {
    pub fn classical(substrate: &Substrate, label: &str) -> Result<Self> {
        let i = substrate.state_index(label)?;
        Ok(State {
            substrate: substrate.clone(),
            repr: StateRepr::Classical(i),
        })
    }

    pub fn from_index(substrate: &Substrate, index: usize) -> Result<Self> {
        if substrate.kind() != BackendKind::Classical {
            return Err(SubstrateError::WrongBackend(BackendKind::Classical));
        }
        if index >= substrate.size() {
            return Err(SubstrateError::UnknownState {
                substrate: substrate.name().to_string(),
                label: format!("#{index}"),
            });
        }
        Ok(State {
            substrate: substrate.clone(),
            repr: StateRepr::Classical(index),
        })
    }

    pub fn quantum(substrate: &Substrate, vector: Ket) -> Result<Self> {
        if substrate.kind() != BackendKind::Quantum {
            return Err(SubstrateError::WrongBackend(BackendKind::Quantum));
        }
        check_dimension(substrate, &vector)?;
        if (linalg::norm_sqr(&vector) - 1.0).abs() > substrate.tolerance() {
            return Err(SubstrateError::NotNormalized("state".to_string()));
        }
        Ok(State {
            substrate: substrate.clone(),
            repr: StateRepr::Quantum(vector),
        })
    }

    pub fn product(a: &State, b: &State) -> Result<Self> {
        let composite = Substrate::compose(&a.substrate, &b.substrate)?;
        let repr = match (&a.repr, &b.repr) {
            (StateRepr::Classical(i), StateRepr::Classical(j)) => StateRepr::Classical(composite.join_index(&[*i, *j])),
            (StateRepr::Quantum(u), StateRepr::Quantum(v)) => StateRepr::Quantum(linalg::kron_ket(u, v)),
            _ => return Err(SubstrateError::MixedBackends),
        };
        Ok(State {
            substrate: composite,
            repr,
        })
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn index(&self) -> Option<usize> {
        match self.repr {
            StateRepr::Classical(i) => Some(i),
            StateRepr::Quantum(_) => None,
        }
    }

    pub fn vector(&self) -> Option<&[Complex64]> {
        match &self.repr {
            StateRepr::Quantum(v) => Some(v),
            StateRepr::Classical(_) => None,
        }
    }

    pub fn label(&self) -> Option<&str> {
        self.index().and_then(|i| self.substrate.label(i))
    }

    /// Restriction of this state to one factor of its composite substrate.
    ///
    /// Classical states project to the factor's component; quantum states yield
    /// the reduced density matrix obtained by tracing out every other factor.
    pub fn marginal(&self, factor: usize) -> Result<Marginal> {
        self.substrate.check_factor(factor)?;
        let target = self.substrate.factors()[factor].clone();
        match &self.repr {
            StateRepr::Classical(i) => {
                let part = self.substrate.split_index(*i)[factor];
                Ok(Marginal::Classical(State {
                    substrate: target,
                    repr: StateRepr::Classical(part),
                }))
            }
            StateRepr::Quantum(psi) => {
                let d = target.size();
                let mut rho = Matrix::zeros(d);
                // group amplitudes by the environment index (all other factors)
                let mut by_env: std::collections::BTreeMap<Vec<usize>, Vec<(usize, Complex64)>> =
                    std::collections::BTreeMap::new();
                for (idx, amp) in psi.iter().enumerate() {
                    let mut parts = self.substrate.split_index(idx);
                    let local = parts.remove(factor);
                    by_env.entry(parts).or_default().push((local, *amp));
                }
                for amps in by_env.values() {
                    for &(i, a) in amps {
                        for &(j, b) in amps {
                            rho[(i, j)] += a * b.conj();
                        }
                    }
                }
                Ok(Marginal::Quantum(rho))
            }
        }
    }

    /// Applies a classical state map.
    pub fn map_state(&self, map: &[usize]) -> Result<State> {
        let StateRepr::Classical(i) = self.repr else {
            return Err(SubstrateError::WrongBackend(BackendKind::Classical));
        };
        State::from_index(&self.substrate, map[i])
    }

    /// Applies an operator to a quantum state; the caller guarantees it is unitary.
    pub fn evolve(&self, op: &Matrix) -> Result<State> {
        let StateRepr::Quantum(v) = &self.repr else {
            return Err(SubstrateError::WrongBackend(BackendKind::Quantum));
        };
        if op.dim() != v.len() {
            return Err(SubstrateError::DimensionMismatch {
                expected: v.len(),
                found: op.dim(),
            });
        }
        Ok(State {
            substrate: self.substrate.clone(),
            repr: StateRepr::Quantum(op.apply(v)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    Classical(State),
    Quantum(Matrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disjointness {
    /// Classical attributes with empty pairwise intersections.
    Disjoint,
    /// Quantum subspaces that are pairwise orthogonal.
    Orthogonal,
    /// Quantum subspaces meeting only at zero, but not orthogonal.
    NonOrthogonal,
}

/// A set of pairwise-disjoint attributes of one substrate.
#[derive(Debug, Clone)]
pub struct Variable {
    name: String,
    substrate: Substrate,
    attributes: Vec<Attribute>,
    disjointness: Disjointness,
}

impl PartialEq for Variable {
    fn eq(&self, other: &Self) -> bool {
        self.substrate == other.substrate && self.attributes == other.attributes
    }
}

impl Variable {
    pub fn new(substrate: &Substrate, name: &str, attributes: Vec<Attribute>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(SubstrateError::NoAttributes);
        }
        for a in &attributes {
            substrate.ensure_same(a.substrate())?;
            if a.is_empty() {
                return Err(SubstrateError::EmptyAttribute(a.name.clone()));
            }
        }
        let mut orthogonal = true;
        for (i, a) in attributes.iter().enumerate() {
            for b in &attributes[i + 1..] {
                if !a.is_disjoint_from(b) {
                    return Err(SubstrateError::OverlappingAttributes(a.name.clone(), b.name.clone()));
                }
                orthogonal &= a.is_orthogonal_to(b);
            }
        }
        let disjointness = match (substrate.kind(), orthogonal) {
            (BackendKind::Classical, _) => Disjointness::Disjoint,
            (BackendKind::Quantum, true) => Disjointness::Orthogonal,
            (BackendKind::Quantum, false) => Disjointness::NonOrthogonal,
        };
        Ok(Variable {
            name: name.to_string(),
            substrate: substrate.clone(),
            attributes,
            disjointness,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn disjointness(&self) -> Disjointness {
        self.disjointness
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// The attribute in which `state` is sharp, if any.
    pub fn sharp_attribute(&self, state: &State) -> Result<Option<&Attribute>> {
        self.substrate.ensure_same(state.substrate())?;
        for a in &self.attributes {
            if a.contains(state)? {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    /// Union of every attribute in the variable.
    pub fn union(&self) -> Attribute {
        let mut acc = self.attributes[0].clone();
        for a in &self.attributes[1..] {
            acc = acc.union(a).expect("attributes share the variable's substrate");
        }
        acc.with_name(&format!("∪{}", self.name))
    }

    /// `{x, bar(x)}` for some attribute x.
    pub fn is_boolean(&self) -> bool {
        self.attributes.len() == 2 && self.attributes[0].bar() == self.attributes[1]
    }

    /// The bar of the union is empty.
    pub fn is_maximal(&self) -> bool {
        self.union().bar().is_empty()
    }

    /// Merges attributes block by block; `blocks` must partition the attribute indices.
    pub fn coarsen(&self, blocks: &[Vec<usize>]) -> Result<Variable> {
        let n = self.attributes.len();
        let mut seen = vec![false; n];
        for block in blocks {
            if block.is_empty() {
                return Err(SubstrateError::InvalidPartition("empty block".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(SubstrateError::InvalidPartition(format!("index {i} out of range")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(SubstrateError::InvalidPartition(format!("index {i} repeated")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(SubstrateError::InvalidPartition(format!("index {i} not covered")));
        }
        let attributes = blocks
            .iter()
            .map(|block| {
                let mut acc = self.attributes[block[0]].clone();
                for &i in &block[1..] {
                    acc = acc.union(&self.attributes[i])?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Variable::new(&self.substrate, &format!("{}/coarse", self.name), attributes)
    }

    /// `X×Y` on the composite substrate, attributes in row-major order.
    pub fn lift(x: &Variable, y: &Variable) -> Result<Variable> {
        let composite = Substrate::compose(&x.substrate, &y.substrate)?;
        let mut attributes = Vec::with_capacity(x.len() * y.len());
        for a in &x.attributes {
            for b in &y.attributes {
                attributes.push(a.product_on(b, &composite)?);
            }
        }
        Variable::new(&composite, &format!("{}×{}", x.name, y.name), attributes)
    }

    /// Variable built from the attributes of two variables on one substrate.
    pub fn joined(x: &Variable, y: &Variable) -> Result<Variable> {
        let mut attributes = x.attributes.clone();
        attributes.extend(y.attributes.iter().cloned());
        Variable::new(&x.substrate, &format!("{}∪{}", x.name, y.name), attributes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{angle_ket, basis_ket, c};

    fn coin() -> Substrate {
        Substrate::classical("coin", &["head", "tail"]).unwrap()
    }

    pub(crate) fn deck() -> Substrate {
        let mut labels = Vec::new();
        for seed in ["hearts", "diamonds", "clubs", "spades"] {
            for v in ["A", "2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K"] {
                labels.push(format!("{v}-{seed}"));
            }
        }
        Substrate::classical("deck", &labels).unwrap()
    }

    fn deck_attr(deck: &Substrate, name: &str, pred: impl Fn(&str) -> bool) -> Attribute {
        let labels: Vec<&str> = deck
            .labels()
            .unwrap()
            .iter()
            .map(String::as_str)
            .filter(|l| pred(l))
            .collect();
        Attribute::classical(deck, name, &labels).unwrap()
    }

    fn is_figure(label: &str) -> bool {
        matches!(label.split('-').next(), Some("J" | "Q" | "K"))
    }

    fn qubit() -> Substrate {
        Substrate::quantum("q", 2).unwrap()
    }

    fn ray(q: &Substrate, name: &str, deg: f64) -> Attribute {
        Attribute::subspace(q, name, vec![angle_ket(deg)]).unwrap()
    }

    #[test]
    fn coin_outcome_variable() {
        let s = coin();
        let h = Attribute::classical(&s, "head", &["head"]).unwrap();
        let t = Attribute::classical(&s, "tail", &["tail"]).unwrap();
        let v = Variable::new(&s, "outcome", vec![h, t]).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.disjointness(), Disjointness::Disjoint);
    }

    #[test]
    fn figures_and_numbers_form_a_boolean_maximal_variable() {
        let d = deck();
        let fig = deck_attr(&d, "figures", is_figure);
        let num = deck_attr(&d, "numbers", |l| !is_figure(l));
        let v = Variable::new(&d, "figure/number", vec![fig, num]).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.is_boolean());
        assert!(v.is_maximal());
    }

    #[test]
    fn overlapping_classical_attributes_rejected() {
        let s = coin();
        let h = Attribute::classical(&s, "head", &["head"]).unwrap();
        let both = Attribute::classical(&s, "any", &["head", "tail"]).unwrap();
        assert_eq!(
            Variable::new(&s, "bad", vec![h, both]).unwrap_err(),
            SubstrateError::OverlappingAttributes("head".into(), "any".into())
        );
    }

    #[test]
    fn empty_attribute_rejected() {
        let s = coin();
        assert!(matches!(
            Attribute::classical::<&str>(&s, "none", &[]),
            Err(SubstrateError::EmptyAttribute(_))
        ));
        let full = Attribute::full(&s);
        assert!(matches!(
            Variable::new(&s, "v", vec![full.bar()]),
            Err(SubstrateError::EmptyAttribute(_))
        ));
    }

    #[test]
    fn sharpness_classical_and_quantum() {
        let s = coin();
        let h = Attribute::classical(&s, "head", &["head"]).unwrap();
        let t = Attribute::classical(&s, "tail", &["tail"]).unwrap();
        let v = Variable::new(&s, "outcome", vec![h.clone(), t]).unwrap();
        let st = State::classical(&s, "head").unwrap();
        assert_eq!(v.sharp_attribute(&st).unwrap(), Some(&h));

        let q = qubit();
        let z = ray(&q, "0", 0.0);
        let o = ray(&q, "1", 90.0);
        let x = Variable::new(&q, "Z", vec![z.clone(), o]).unwrap();
        let plus = State::quantum(&q, angle_ket(45.0)).unwrap();
        assert_eq!(x.sharp_attribute(&plus).unwrap(), None);
        let zero = State::quantum(&q, basis_ket(2, 0)).unwrap();
        assert_eq!(x.sharp_attribute(&zero).unwrap(), Some(&z));
        assert!(matches!(
            v.sharp_attribute(&zero),
            Err(SubstrateError::SubstrateMismatch { .. })
        ));
    }

    #[test]
    fn composition_cardinalities() {
        let bit = Substrate::classical("bit", &["0", "1"]).unwrap();
        assert_eq!(Substrate::compose(&bit, &bit).unwrap().size(), 4);
        let q = qubit();
        assert_eq!(Substrate::compose(&q, &q).unwrap().size(), 4);
        assert_eq!(Substrate::compose(&bit, &q).unwrap_err(), SubstrateError::MixedBackends);
    }

    #[test]
    fn seed_times_value_lifts_to_52_attributes() {
        let seeds = Substrate::classical("seed", &["hearts", "diamonds", "clubs", "spades"]).unwrap();
        let values: Vec<String> = (1..=13).map(|v| v.to_string()).collect();
        let value = Substrate::classical("value", &values).unwrap();
        let sv = Variable::new(
            &seeds,
            "seed",
            seeds
                .labels()
                .unwrap()
                .iter()
                .map(|l| Attribute::classical(&seeds, l, &[l]).unwrap())
                .collect(),
        )
        .unwrap();
        let vv = Variable::new(
            &value,
            "value",
            values
                .iter()
                .map(|l| Attribute::classical(&value, l, &[l]).unwrap())
                .collect(),
        )
        .unwrap();
        let lifted = Variable::lift(&sv, &vv).unwrap();
        assert_eq!(lifted.len(), 52);
        assert_eq!(lifted.substrate().size(), 52);
        assert!(lifted.is_maximal());
    }

    #[test]
    fn bar_of_five_of_hearts_has_51_states() {
        let d = deck();
        let five = Attribute::classical(&d, "5h", &["5-hearts"]).unwrap();
        let b = five.bar();
        assert_eq!(b.size(), 51);
        assert!(!b.contains(&State::classical(&d, "5-hearts").unwrap()).unwrap());
        assert_eq!(b.bar(), five);
    }

    #[test]
    fn bar_on_qubit_is_orthocomplement() {
        let q = qubit();
        let z = ray(&q, "0", 0.0);
        assert_eq!(z.bar(), ray(&q, "1", 90.0));
        assert!(Attribute::full(&q).bar().is_empty());
        assert!(Attribute::full(&coin()).bar().is_empty());
    }

    #[test]
    fn boolean_and_maximal_flags() {
        let d = deck();
        let hearts = deck_attr(&d, "hearts", |l| l.ends_with("hearts"));
        let v = Variable::new(&d, "hearts", vec![hearts]).unwrap();
        assert!(!v.is_maximal());
        assert!(!v.is_boolean());

        let q = qubit();
        let z = Variable::new(&q, "Z", vec![ray(&q, "0", 0.0), ray(&q, "1", 90.0)]).unwrap();
        assert!(z.is_boolean());
        assert!(z.is_maximal());
    }

    #[test]
    fn coarsening() {
        let values: Vec<String> = (1..=10).map(|v| v.to_string()).collect();
        let s = Substrate::classical("value", &values).unwrap();
        let v = Variable::new(
            &s,
            "value",
            values
                .iter()
                .map(|l| Attribute::classical(&s, l, &[l]).unwrap())
                .collect(),
        )
        .unwrap();
        let even: Vec<usize> = (0..10).filter(|i| (i + 1) % 2 == 0).collect();
        let odd: Vec<usize> = (0..10).filter(|i| (i + 1) % 2 == 1).collect();
        let eo = v.coarsen(&[even, odd]).unwrap();
        assert_eq!(eo.len(), 2);
        assert!(eo.is_boolean());

        let identity: Vec<Vec<usize>> = (0..10).map(|i| vec![i]).collect();
        assert_eq!(v.coarsen(&identity).unwrap(), v);

        assert!(matches!(
            v.coarsen(&[vec![0, 1]]),
            Err(SubstrateError::InvalidPartition(_))
        ));
        assert!(matches!(
            v.coarsen(&[(0..10).collect(), vec![3]]),
            Err(SubstrateError::InvalidPartition(_))
        ));
    }

    #[test]
    fn deck_values_coarsen_to_figures_numbers() {
        let d = deck();
        let names = ["A", "2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K"];
        let attrs: Vec<Attribute> = names
            .iter()
            .map(|n| deck_attr(&d, n, |l| l.split('-').next() == Some(n)))
            .collect();
        let v = Variable::new(&d, "value", attrs).unwrap();
        let coarse = v.coarsen(&[(10..13).collect(), (0..10).collect()]).unwrap();
        let fig = deck_attr(&d, "figures", is_figure);
        let num = deck_attr(&d, "numbers", |l| !is_figure(l));
        assert_eq!(coarse, Variable::new(&d, "fn", vec![fig, num]).unwrap());
    }

    #[test]
    fn classical_marginal_of_pair_state() {
        let d = deck();
        let pair = State::product(
            &State::classical(&coin(), "head").unwrap(),
            &State::classical(&d, "5-hearts").unwrap(),
        )
        .unwrap();
        match pair.marginal(1).unwrap() {
            Marginal::Classical(s) => assert_eq!(s.label(), Some("5-hearts")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(pair.marginal(2), Err(SubstrateError::IndexOutOfRange { .. })));
        assert!(matches!(
            State::classical(&coin(), "head").unwrap().marginal(0),
            Err(SubstrateError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn quantum_marginals() {
        let q = qubit();
        let prod = State::product(
            &State::quantum(&q, basis_ket(2, 0)).unwrap(),
            &State::quantum(&q, angle_ket(45.0)).unwrap(),
        )
        .unwrap();
        let Marginal::Quantum(rho) = prod.marginal(0).unwrap() else {
            panic!()
        };
        assert!(rho.max_abs_diff(&Matrix::outer(&basis_ket(2, 0), &basis_ket(2, 0))) < 1e-12);

        let qq = Substrate::compose(&q, &q).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = State::quantum(&qq, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        let Marginal::Quantum(rho) = bell.marginal(0).unwrap() else {
            panic!()
        };
        let mut mixed = Matrix::zeros(2);
        mixed[(0, 0)] = c(0.5, 0.0);
        mixed[(1, 1)] = c(0.5, 0.0);
        assert!(rho.max_abs_diff(&mixed) < 1e-12);
    }

    #[test]
    fn non_orthogonal_quantum_variable_is_flagged() {
        let q = qubit();
        let v = Variable::new(&q, "ZX", vec![ray(&q, "0", 0.0), ray(&q, "+", 45.0)]).unwrap();
        assert_eq!(v.disjointness(), Disjointness::NonOrthogonal);
        let full = Attribute::full(&q);
        assert!(matches!(
            Variable::new(&q, "bad", vec![ray(&q, "0", 0.0), full]),
            Err(SubstrateError::OverlappingAttributes(..))
        ));
    }

    #[test]
    fn subspace_validation() {
        let q = qubit();
        assert!(matches!(
            Attribute::subspace(&q, "x", vec![vec![c(1.0, 0.0), c(1.0, 0.0)]]),
            Err(SubstrateError::NotNormalized(_))
        ));
        assert!(matches!(
            Attribute::subspace(&q, "x", vec![angle_ket(0.0), angle_ket(45.0)]),
            Err(SubstrateError::NotOrthogonal(_))
        ));
        assert!(matches!(
            Attribute::subspace(&q, "x", vec![vec![c(1.0, 0.0)]]),
            Err(SubstrateError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lifted_operators_act_on_one_factor() {
        let q = qubit();
        let qq = Substrate::compose(&q, &q).unwrap();
        let mut x = Matrix::zeros(2);
        x[(0, 1)] = c(1.0, 0.0);
        x[(1, 0)] = c(1.0, 0.0);
        let lifted = qq.lift_operator(0, &x).unwrap();
        let s = State::quantum(&qq, basis_ket(4, 0)).unwrap().evolve(&lifted).unwrap();
        assert_eq!(s.vector().unwrap(), basis_ket(4, 2).as_slice());

        let bit = Substrate::classical("bit", &["0", "1"]).unwrap();
        let bb = Substrate::compose(&bit, &bit).unwrap();
        assert_eq!(bb.lift_map(1, &[1, 0]).unwrap(), vec![1, 0, 3, 2]);
    }
}
