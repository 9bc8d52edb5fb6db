//! Tasks as finite sets of input→output attribute pairs, and networks of tasks.

use std::fmt;

use thiserror::Error;

use crate::substrate::{Attribute, Substrate, SubstrateError, Variable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaskError {
    #[error("a task needs at least one pair")]
    EmptyTask,
    #[error("input attributes `{0}` and `{1}` overlap")]
    AmbiguousInputs(String, String),
    #[error("substrate mismatch: `{expected}` vs `{found}`")]
    SubstrateMismatch { expected: String, found: String },
    #[error("not a permutation of {0} attribute indices")]
    NotAPermutation(usize),
    #[error("a reversible computation needs at least two attributes")]
    TooFewAttributes,
    #[error("{attributes} attributes but {labels} labels")]
    LabelCountMismatch { attributes: usize, labels: usize },
    #[error(transparent)]
    Substrate(#[from] SubstrateError),
}

pub type Result<T> = std::result::Result<T, TaskError>;

/// Which constructor built a task. The possibility oracle dispatches on this.
#[derive(Debug, Clone)]
pub enum TaskKind {
    General,
    Cloning(Variable),
    Distinguishing(Variable),
    Measuring(Variable),
    Preparation(Variable),
}

#[derive(Debug, Clone)]
pub struct Task {
    label: String,
    pairs: Vec<(Attribute, Attribute)>,
    input: Substrate,
    output: Substrate,
    kind: TaskKind,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {{", self.label)?;
        for (i, (x, y)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}→{y}")?;
        }
        f.write_str("}")
    }
}

fn same_substrate(expected: &Substrate, found: &Substrate) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(TaskError::SubstrateMismatch {
            expected: expected.name().to_string(),
            found: found.name().to_string(),
        })
    }
}

impl Task {
    /// Validated task: nonempty, no empty attributes, inputs pairwise disjoint,
    /// every input on one substrate and every output on one substrate.
    pub fn new(label: &str, pairs: Vec<(Attribute, Attribute)>) -> Result<Self> {
        Self::with_kind(label, pairs, TaskKind::General)
    }

    fn with_kind(label: &str, pairs: Vec<(Attribute, Attribute)>, kind: TaskKind) -> Result<Self> {
        let Some((x0, y0)) = pairs.first() else {
            return Err(TaskError::EmptyTask);
        };
        let input = x0.substrate().clone();
        let output = y0.substrate().clone();
        for (x, y) in &pairs {
            same_substrate(&input, x.substrate())?;
            same_substrate(&output, y.substrate())?;
            for a in [x, y] {
                if a.is_empty() {
                    return Err(SubstrateError::EmptyAttribute(a.name().to_string()).into());
                }
            }
        }
        for (i, (a, _)) in pairs.iter().enumerate() {
            for (b, _) in &pairs[i + 1..] {
                if !a.is_disjoint_from(b) {
                    return Err(TaskError::AmbiguousInputs(a.name().to_string(), b.name().to_string()));
                }
            }
        }
        Ok(Task {
            label: label.to_string(),
            pairs,
            input,
            output,
            kind,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pairs(&self) -> &[(Attribute, Attribute)] {
        &self.pairs
    }

    pub fn input_substrate(&self) -> &Substrate {
        &self.input
    }

    pub fn output_substrate(&self) -> &Substrate {
        &self.output
    }

    pub fn kind(&self) -> &TaskKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Equality of the pair sets, ignoring order, labels and kind.
    pub fn same_relation(&self, other: &Task) -> bool {
        self.pairs.len() == other.pairs.len()
            && self.pairs.iter().all(|p| other.pairs.iter().any(|q| p == q))
            && other.pairs.iter().all(|q| self.pairs.iter().any(|p| p == q))
    }

    /// `{x → x}` for every attribute of the variable.
    pub fn identity(variable: &Variable) -> Task {
        let pairs = variable.attributes().iter().map(|x| (x.clone(), x.clone())).collect();
        Task::new(&format!("id({})", variable.name()), pairs).expect("variable attributes are disjoint")
    }

    /// `∪_x {x → Π(x)}` for a permutation of the attribute indices.
    pub fn reversible_computation(variable: &Variable, permutation: &[usize]) -> Result<Task> {
        let n = variable.len();
        if n < 2 {
            return Err(TaskError::TooFewAttributes);
        }
        let mut hit = vec![false; n];
        if permutation.len() != n
            || permutation
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut hit[p], true))
        {
            return Err(TaskError::NotAPermutation(n));
        }
        let attrs = variable.attributes();
        let pairs = permutation
            .iter()
            .enumerate()
            .map(|(i, &p)| (attrs[i].clone(), attrs[p].clone()))
            .collect();
        Task::new(&format!("perm({})", variable.name()), pairs)
    }

    /// `R_S(x0) = ∪_{x∈S} {(x, x0) → (x, x)}` on the doubled substrate.
    pub fn cloning(variable: &Variable, receptive: &Attribute) -> Result<Task> {
        same_substrate(variable.substrate(), receptive.substrate())?;
        let pairs = variable
            .attributes()
            .iter()
            .map(|x| Ok((x.product(receptive)?, x.product(x)?)))
            .collect::<Result<Vec<_>>>()?;
        Task::with_kind(
            &format!("clone({})", variable.name()),
            pairs,
            TaskKind::Cloning(variable.clone()),
        )
    }

    /// `∪_x {x → i_x}` where the labels form an information variable.
    pub fn distinguishing(variable: &Variable, labels: &Variable) -> Result<Task> {
        check_label_count(variable, labels)?;
        let pairs = variable
            .attributes()
            .iter()
            .cloned()
            .zip(labels.attributes().iter().cloned())
            .collect();
        Task::with_kind(
            &format!("distinguish({})", variable.name()),
            pairs,
            TaskKind::Distinguishing(variable.clone()),
        )
    }

    /// `∪_x {(x, x0) → (x, 'x')}`: the measured attribute is left intact.
    pub fn measuring(variable: &Variable, receptive: &Attribute, labels: &Variable) -> Result<Task> {
        check_label_count(variable, labels)?;
        same_substrate(labels.substrate(), receptive.substrate())?;
        let pairs = variable
            .attributes()
            .iter()
            .zip(labels.attributes())
            .map(|(x, l)| Ok((x.product(receptive)?, x.product(l)?)))
            .collect::<Result<Vec<_>>>()?;
        Task::with_kind(
            &format!("measure({})", variable.name()),
            pairs,
            TaskKind::Measuring(variable.clone()),
        )
    }

    /// `∪_x {('x', x0) → ('x', x)}`: a label is read and the matching attribute prepared.
    ///
    /// Label-substrate states outside every label attribute (an "unknown"
    /// answer, say) are not legitimate inputs and the task says nothing about them.
    pub fn preparation(variable: &Variable, receptive: &Attribute, labels: &Variable) -> Result<Task> {
        check_label_count(variable, labels)?;
        same_substrate(variable.substrate(), receptive.substrate())?;
        let pairs = labels
            .attributes()
            .iter()
            .zip(variable.attributes())
            .map(|(l, x)| Ok((l.product(receptive)?, l.product(x)?)))
            .collect::<Result<Vec<_>>>()?;
        Task::with_kind(
            &format!("prepare({})", variable.name()),
            pairs,
            TaskKind::Preparation(labels.clone()),
        )
    }

    /// Reverses every pair. Fails when two outputs overlap.
    pub fn transpose(&self) -> Result<Task> {
        let pairs = self.pairs.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        Task::new(&format!("{}ᵀ", self.label), pairs)
    }
}

fn check_label_count(variable: &Variable, labels: &Variable) -> Result<()> {
    if variable.len() != labels.len() {
        return Err(TaskError::LabelCountMismatch {
            attributes: variable.len(),
            labels: labels.len(),
        });
    }
    Ok(())
}

/// Serial and parallel wiring of tasks. The tree shape makes every network acyclic.
#[derive(Debug, Clone)]
pub enum TaskNetwork {
    Leaf(Task),
    Serial(Box<TaskNetwork>, Box<TaskNetwork>),
    Parallel(Box<TaskNetwork>, Box<TaskNetwork>),
}

impl From<Task> for TaskNetwork {
    fn from(t: Task) -> Self {
        TaskNetwork::Leaf(t)
    }
}

impl TaskNetwork {
    pub fn input_substrate(&self) -> Substrate {
        match self {
            TaskNetwork::Leaf(t) => t.input.clone(),
            TaskNetwork::Serial(a, _) => a.input_substrate(),
            TaskNetwork::Parallel(a, b) => Substrate::compose(&a.input_substrate(), &b.input_substrate())
                .expect("parallel checked backends at construction"),
        }
    }

    pub fn output_substrate(&self) -> Substrate {
        match self {
            TaskNetwork::Leaf(t) => t.output.clone(),
            TaskNetwork::Serial(_, b) => b.output_substrate(),
            TaskNetwork::Parallel(a, b) => Substrate::compose(&a.output_substrate(), &b.output_substrate())
                .expect("parallel checked backends at construction"),
        }
    }

    /// `first` then `second`; the output substrate of the first must feed the second.
    pub fn serial(first: impl Into<TaskNetwork>, second: impl Into<TaskNetwork>) -> Result<Self> {
        let (a, b) = (first.into(), second.into());
        same_substrate(&a.output_substrate(), &b.input_substrate())?;
        Ok(TaskNetwork::Serial(Box::new(a), Box::new(b)))
    }

    /// Side-by-side on the composite of both substrates.
    pub fn parallel(left: impl Into<TaskNetwork>, right: impl Into<TaskNetwork>) -> Result<Self> {
        let (a, b) = (left.into(), right.into());
        Substrate::compose(&a.input_substrate(), &b.input_substrate())?;
        Substrate::compose(&a.output_substrate(), &b.output_substrate())?;
        Ok(TaskNetwork::Parallel(Box::new(a), Box::new(b)))
    }

    /// Evaluates the wiring into a single task.
    ///
    /// Serial: `x → z` whenever `x → y` in the first stage and `y ⊆ y'` for
    /// some `y' → z` in the second. Parallel: products of pairs.
    pub fn flatten(&self) -> Result<Task> {
        match self {
            TaskNetwork::Leaf(t) => Ok(t.clone()),
            TaskNetwork::Serial(a, b) => {
                let (ta, tb) = (a.flatten()?, b.flatten()?);
                let mut pairs = Vec::new();
                for (x, y) in &ta.pairs {
                    if let Some((_, z)) = tb.pairs.iter().find(|(y2, _)| y.is_subset_of(y2)) {
                        pairs.push((x.clone(), z.clone()));
                    }
                }
                Task::new(&format!("{};{}", ta.label, tb.label), pairs)
            }
            TaskNetwork::Parallel(a, b) => {
                let (ta, tb) = (a.flatten()?, b.flatten()?);
                let mut pairs = Vec::with_capacity(ta.len() * tb.len());
                for (x1, y1) in &ta.pairs {
                    for (x2, y2) in &tb.pairs {
                        pairs.push((x1.product(x2)?, y1.product(y2)?));
                    }
                }
                Task::new(&format!("{}⊗{}", ta.label, tb.label), pairs)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::angle_ket;

    fn coin() -> (Substrate, Attribute, Attribute, Variable) {
        let s = Substrate::classical("coin", &["head", "tail"]).unwrap();
        let h = Attribute::classical(&s, "head", &["head"]).unwrap();
        let t = Attribute::classical(&s, "tail", &["tail"]).unwrap();
        let v = Variable::new(&s, "outcome", vec![h.clone(), t.clone()]).unwrap();
        (s, h, t, v)
    }

    fn singletons(s: &Substrate, name: &str) -> Variable {
        let attrs = s
            .labels()
            .unwrap()
            .iter()
            .map(|l| Attribute::classical(s, l, &[l]).unwrap())
            .collect();
        Variable::new(s, name, attrs).unwrap()
    }

    #[test]
    fn belief_fixing_task() {
        let (_, h, t, _) = coin();
        let task = Task::new("fix", vec![(h.clone(), h.clone()), (t, h)]).unwrap();
        assert_eq!(task.len(), 2);
    }

    #[test]
    fn overlapping_inputs_rejected() {
        let (s, h, t, _) = coin();
        let any = Attribute::full(&s);
        assert!(matches!(
            Task::new("bad", vec![(h.clone(), h), (any, t)]),
            Err(TaskError::AmbiguousInputs(..))
        ));
        assert_eq!(Task::new("empty", vec![]).unwrap_err(), TaskError::EmptyTask);
    }

    #[test]
    fn swap_and_identity_permutations() {
        let (_, h, t, v) = coin();
        let swap = Task::reversible_computation(&v, &[1, 0]).unwrap();
        let expect = Task::new("s", vec![(h.clone(), t.clone()), (t, h)]).unwrap();
        assert!(swap.same_relation(&expect));
        assert!(Task::reversible_computation(&v, &[0, 1])
            .unwrap()
            .same_relation(&Task::identity(&v)));
        assert_eq!(
            Task::reversible_computation(&v, &[0, 0]).unwrap_err(),
            TaskError::NotAPermutation(2)
        );
        let single = Variable::new(v.substrate(), "h", vec![v.attributes()[0].clone()]).unwrap();
        assert_eq!(
            Task::reversible_computation(&single, &[0]).unwrap_err(),
            TaskError::TooFewAttributes
        );
    }

    #[test]
    fn lamp_three_cycle() {
        let lamp = Substrate::classical("lamp", &["r", "a", "g"]).unwrap();
        let v = singletons(&lamp, "colour");
        let t = Task::reversible_computation(&v, &[1, 2, 0]).unwrap();
        let names: Vec<(String, String)> = t
            .pairs()
            .iter()
            .map(|(x, y)| (x.name().to_string(), y.name().to_string()))
            .collect();
        assert_eq!(
            names,
            vec![
                ("r".into(), "a".into()),
                ("a".into(), "g".into()),
                ("g".into(), "r".into())
            ]
        );
    }

    #[test]
    fn serial_swaps_give_identity() {
        let (_, _, _, v) = coin();
        let swap = Task::reversible_computation(&v, &[1, 0]).unwrap();
        let net = TaskNetwork::serial(swap.clone(), swap).unwrap();
        assert!(net.flatten().unwrap().same_relation(&Task::identity(&v)));
    }

    #[test]
    fn parallel_identity_and_swap() {
        let bit = Substrate::classical("bit", &["0", "1"]).unwrap();
        let v = singletons(&bit, "b");
        let net =
            TaskNetwork::parallel(Task::identity(&v), Task::reversible_computation(&v, &[1, 0]).unwrap()).unwrap();
        let flat = net.flatten().unwrap();
        assert_eq!(flat.len(), 4);
        // (i, j) -> (i, 1-j), enumerated by hand
        let bb = flat.input_substrate().clone();
        let expected: Vec<(usize, usize)> = vec![(0, 1), (1, 0), (2, 3), (3, 2)];
        for (x, y) in flat.pairs() {
            let xi = *x.indices().unwrap().iter().next().unwrap();
            let yi = *y.indices().unwrap().iter().next().unwrap();
            assert!(
                expected.contains(&(xi, yi)),
                "{} -> {}",
                bb.label(xi).unwrap(),
                bb.label(yi).unwrap()
            );
        }
    }

    #[test]
    fn serial_requires_matching_substrates() {
        let (_, _, _, v) = coin();
        let lamp = Substrate::classical("lamp", &["r", "a", "g"]).unwrap();
        let lv = singletons(&lamp, "colour");
        assert!(matches!(
            TaskNetwork::serial(Task::identity(&v), Task::identity(&lv)),
            Err(TaskError::SubstrateMismatch { .. })
        ));
    }

    #[test]
    fn cloning_coin_outcomes() {
        let (s, h, t, v) = coin();
        let task = Task::cloning(&v, &h).unwrap();
        let hh = h.product(&h).unwrap();
        let th = t.product(&h).unwrap();
        let tt = t.product(&t).unwrap();
        let expect = Task::new("c", vec![(hh.clone(), hh), (th, tt)]).unwrap();
        assert!(task.same_relation(&expect));
        assert_eq!(task.input_substrate().size(), 4);

        let single = Variable::new(&s, "h", vec![h.clone()]).unwrap();
        assert_eq!(Task::cloning(&single, &h).unwrap().len(), 1);

        let lamp = Substrate::classical("lamp", &["r"]).unwrap();
        let r = Attribute::classical(&lamp, "r", &["r"]).unwrap();
        assert!(matches!(
            Task::cloning(&v, &r),
            Err(TaskError::SubstrateMismatch { .. })
        ));
    }

    #[test]
    fn qubit_cloning_task_on_composite() {
        let q = Substrate::quantum("q", 2).unwrap();
        let z = Attribute::subspace(&q, "0", vec![angle_ket(0.0)]).unwrap();
        let p = Attribute::subspace(&q, "+", vec![angle_ket(45.0)]).unwrap();
        let v = Variable::new(&q, "ZX", vec![z.clone(), p.clone()]).unwrap();
        let task = Task::cloning(&v, &z).unwrap();
        assert_eq!(task.len(), 2);
        assert_eq!(task.input_substrate().size(), 4);
        let (x1, y1) = &task.pairs()[1];
        assert_eq!(
            *x1,
            Attribute::span(
                x1.substrate(),
                "",
                &[crate::linalg::kron_ket(&angle_ket(45.0), &angle_ket(0.0))]
            )
            .unwrap()
        );
        assert_eq!(
            *y1,
            Attribute::span(
                y1.substrate(),
                "",
                &[crate::linalg::kron_ket(&angle_ket(45.0), &angle_ket(45.0))]
            )
            .unwrap()
        );
    }

    #[test]
    fn traffic_lamp_distinguished_by_position() {
        let lamp = Substrate::classical("colour", &["red", "amber", "green"]).unwrap();
        let pos = Substrate::classical("position", &["top", "middle", "bottom"]).unwrap();
        let t = Task::distinguishing(&singletons(&lamp, "colour"), &singletons(&pos, "position")).unwrap();
        assert_eq!(t.pairs()[0].0.name(), "red");
        assert_eq!(t.pairs()[0].1.name(), "top");

        let (_, _, _, v) = coin();
        assert_eq!(
            Task::distinguishing(&v, &singletons(&pos, "position")).unwrap_err(),
            TaskError::LabelCountMismatch {
                attributes: 2,
                labels: 3
            }
        );
    }

    #[test]
    fn measuring_coin_outcome() {
        let (_, h, t, v) = coin();
        let words = Substrate::classical("words", &["blank", "'head'", "'tail'"]).unwrap();
        let blank = Attribute::classical(&words, "blank", &["blank"]).unwrap();
        let lh = Attribute::classical(&words, "'head'", &["'head'"]).unwrap();
        let lt = Attribute::classical(&words, "'tail'", &["'tail'"]).unwrap();
        let labels = Variable::new(&words, "answer", vec![lh.clone(), lt.clone()]).unwrap();
        let m = Task::measuring(&v, &blank, &labels).unwrap();
        let expect = Task::new(
            "m",
            vec![
                (h.product(&blank).unwrap(), h.product(&lh).unwrap()),
                (t.product(&blank).unwrap(), t.product(&lt).unwrap()),
            ],
        )
        .unwrap();
        assert!(m.same_relation(&expect));
        assert!(matches!(
            Task::measuring(&v, &h, &labels),
            Err(TaskError::SubstrateMismatch { .. })
        ));
    }

    #[test]
    fn preparation_ignores_unknown_label() {
        let (s, h, _, v) = coin();
        let words = Substrate::classical("words", &["'head'", "'tail'", "'unknown'", "blank"]).unwrap();
        let labels = Variable::new(
            &words,
            "answer",
            vec![
                Attribute::classical(&words, "'head'", &["'head'"]).unwrap(),
                Attribute::classical(&words, "'tail'", &["'tail'"]).unwrap(),
            ],
        )
        .unwrap();
        let p = Task::preparation(&v, &h, &labels).unwrap();
        assert_eq!(p.len(), 2);
        let unknown = words.state_index("'unknown'").unwrap();
        let comp = p.input_substrate();
        for (x, _) in p.pairs() {
            assert!(x.indices().unwrap().iter().all(|&i| comp.split_index(i)[0] != unknown));
        }
        let _ = s;
    }

    #[test]
    fn transpose_cases() {
        let (_, h, t, v) = coin();
        let swap = Task::reversible_computation(&v, &[1, 0]).unwrap();
        assert!(swap.transpose().unwrap().same_relation(&swap));
        let id = Task::identity(&v);
        assert!(id.transpose().unwrap().same_relation(&id));
        let fix = Task::new("fix", vec![(h.clone(), h.clone()), (t, h)]).unwrap();
        assert!(matches!(fix.transpose(), Err(TaskError::AmbiguousInputs(..))));
    }
}
