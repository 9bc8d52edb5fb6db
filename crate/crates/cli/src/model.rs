//! Model files: substrates, attributes, variables, states and tasks.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "substrates": [{ "name": "qubit", "backend": "quantum", "dimension": 2 }],
//!   "attributes": [
//!     { "name": "0", "substrate": "qubit", "angle_deg": 0 },
//!     { "name": "1", "substrate": "qubit", "vectors": [[[0, 0], [1, 0]]] }
//!   ],
//!   "variables": [{ "name": "Z", "attributes": ["0", "1"] }]
//! }
//! ```

use std::collections::BTreeMap;

use ctcog::linalg::{self, Complex64, Ket};
use ctcog::substrate::{Attribute, BackendKind, State, Substrate, Variable};
use ctcog::task::Task;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A complex amplitude as `[re, im]`.
pub type ComplexLiteral = [f64; 2];

pub(crate) fn to_ket(v: &[ComplexLiteral]) -> Ket {
    v.iter().map(|[re, im]| linalg::c(*re, *im)).collect()
}

pub(crate) fn from_ket(v: &[Complex64]) -> Vec<ComplexLiteral> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstrateSpec {
    pub name: String,
    pub backend: BackendKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Composite of earlier substrates, first factor most significant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeSpec {
    pub name: String,
    pub substrate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    /// Generators of a subspace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<ComplexLiteral>>>,
    /// `cos θ|0⟩ + sin θ|1⟩` on a qubit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    pub substrate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<ComplexLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    /// `[input attribute, output attribute]` pairs.
    pub pairs: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub substrates: Vec<SubstrateSpec>,
    #[serde(default)]
    pub attributes: Vec<AttributeSpec>,
    #[serde(default)]
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub states: Vec<StateSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

/// A model file with every name resolved and every invariant checked.
#[derive(Debug, Clone)]
pub struct Model {
    pub file: ModelFile,
    pub substrates: Vec<Substrate>,
    pub attributes: Vec<Attribute>,
    pub variables: Vec<Variable>,
    pub states: Vec<(String, State)>,
    pub tasks: Vec<Task>,
}

fn unique<'a>(section: &str, names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeMap::new();
    for (i, n) in names.enumerate() {
        if seen.insert(n, i).is_some() {
            return Err(CliError::invariant(
                format!("{section}[{i}].name"),
                format!("duplicate name `{n}`"),
            ));
        }
    }
    Ok(())
}

fn lookup<'a, T>(map: &'a BTreeMap<&str, T>, path: String, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| CliError::UnresolvedName {
        path,
        name: name.to_string(),
    })
}

fn exactly_one(path: &str, fields: &[(&str, bool)]) -> Result<()> {
    let given: Vec<&str> = fields.iter().filter(|f| f.1).map(|f| f.0).collect();
    if given.len() != 1 {
        let names: Vec<&str> = fields.iter().map(|f| f.0).collect();
        return Err(CliError::invariant(
            path,
            format!("give exactly one of {}", names.join(", ")),
        ));
    }
    Ok(())
}

fn check_dimension(path: &str, s: &Substrate, v: &[ComplexLiteral]) -> Result<()> {
    if v.len() != s.size() {
        return Err(CliError::invariant(
            path,
            format!(
                "vector has {} entries, substrate `{}` has dimension {}",
                v.len(),
                s.name(),
                s.size()
            ),
        ));
    }
    Ok(())
}

fn angle_on(path: &str, s: &Substrate, deg: f64) -> Result<Ket> {
    if s.kind() != BackendKind::Quantum || s.size() != 2 {
        return Err(CliError::invariant(
            path,
            "angle_deg needs a quantum substrate of dimension 2",
        ));
    }
    Ok(linalg::angle_ket(deg))
}

impl ModelFile {
    pub fn resolve(&self) -> Result<Model> {
        if self.format_version != 1 {
            return Err(CliError::FormatVersion(self.format_version));
        }
        unique("substrates", self.substrates.iter().map(|s| s.name.as_str()))?;
        unique("attributes", self.attributes.iter().map(|s| s.name.as_str()))?;
        unique("variables", self.variables.iter().map(|s| s.name.as_str()))?;
        unique("states", self.states.iter().map(|s| s.name.as_str()))?;
        unique("tasks", self.tasks.iter().map(|s| s.name.as_str()))?;

        let mut subs: BTreeMap<&str, Substrate> = BTreeMap::new();
        let mut substrates = Vec::new();
        for (i, spec) in self.substrates.iter().enumerate() {
            let path = format!("substrates[{i}]");
            let wrap = |source| CliError::Substrate {
                path: path.clone(),
                source,
            };
            let s = match (&spec.factors, &spec.states, spec.dimension) {
                (Some(factors), None, None) => {
                    if factors.len() < 2 {
                        return Err(CliError::invariant(
                            format!("{path}.factors"),
                            "a composite needs at least two factors",
                        ));
                    }
                    let mut acc: Option<Substrate> = None;
                    for (k, f) in factors.iter().enumerate() {
                        let part = lookup(&subs, format!("{path}.factors[{k}]"), f)?.clone();
                        acc = Some(match acc {
                            None => part,
                            Some(a) => Substrate::compose(&a, &part).map_err(wrap)?,
                        });
                    }
                    let s = acc.expect("at least two factors");
                    if s.kind() != spec.backend {
                        return Err(CliError::invariant(
                            format!("{path}.backend"),
                            "factors use a different backend",
                        ));
                    }
                    s
                }
                (None, Some(states), None) if spec.backend == BackendKind::Classical => {
                    Substrate::classical(&spec.name, states).map_err(wrap)?
                }
                (None, None, Some(d)) if spec.backend == BackendKind::Quantum => {
                    Substrate::quantum(&spec.name, d).map_err(wrap)?
                }
                _ => {
                    return Err(CliError::invariant(
                        path,
                        "classical substrates take `states`, quantum ones `dimension`, composites `factors`",
                    ))
                }
            };
            subs.insert(&spec.name, s.clone());
            substrates.push(s);
        }

        let mut attrs: BTreeMap<&str, Attribute> = BTreeMap::new();
        let mut attributes = Vec::new();
        for (i, spec) in self.attributes.iter().enumerate() {
            let path = format!("attributes[{i}]");
            let s = lookup(&subs, format!("{path}.substrate"), &spec.substrate)?;
            exactly_one(
                &path,
                &[
                    ("states", spec.states.is_some()),
                    ("vectors", spec.vectors.is_some()),
                    ("angle_deg", spec.angle_deg.is_some()),
                ],
            )?;
            let wrap = |source| CliError::Substrate {
                path: path.clone(),
                source,
            };
            let a = if let Some(states) = &spec.states {
                Attribute::classical(s, &spec.name, states).map_err(wrap)?
            } else if let Some(vectors) = &spec.vectors {
                for (k, v) in vectors.iter().enumerate() {
                    check_dimension(&format!("{path}.vectors[{k}]"), s, v)?;
                }
                let kets: Vec<Ket> = vectors.iter().map(|v| to_ket(v)).collect();
                Attribute::span(s, &spec.name, &kets).map_err(wrap)?
            } else {
                let ket = angle_on(&path, s, spec.angle_deg.unwrap())?;
                Attribute::span(s, &spec.name, &[ket]).map_err(wrap)?
            };
            attrs.insert(&spec.name, a.clone());
            attributes.push(a);
        }

        let mut variables = Vec::new();
        for (i, spec) in self.variables.iter().enumerate() {
            let path = format!("variables[{i}]");
            if spec.attributes.is_empty() {
                return Err(CliError::invariant(
                    format!("{path}.attributes"),
                    "a variable needs at least one attribute",
                ));
            }
            let members = spec
                .attributes
                .iter()
                .enumerate()
                .map(|(k, n)| lookup(&attrs, format!("{path}.attributes[{k}]"), n).cloned())
                .collect::<Result<Vec<_>>>()?;
            let s = members[0].substrate().clone();
            let v = Variable::new(&s, &spec.name, members).map_err(|source| CliError::Substrate { path, source })?;
            variables.push(v);
        }

        let mut states = Vec::new();
        for (i, spec) in self.states.iter().enumerate() {
            let path = format!("states[{i}]");
            let s = lookup(&subs, format!("{path}.substrate"), &spec.substrate)?;
            exactly_one(
                &path,
                &[
                    ("label", spec.label.is_some()),
                    ("vector", spec.vector.is_some()),
                    ("angle_deg", spec.angle_deg.is_some()),
                ],
            )?;
            let wrap = |source| CliError::Substrate {
                path: path.clone(),
                source,
            };
            let st = if let Some(label) = &spec.label {
                State::classical(s, label).map_err(wrap)?
            } else if let Some(v) = &spec.vector {
                check_dimension(&format!("{path}.vector"), s, v)?;
                State::quantum(s, to_ket(v)).map_err(wrap)?
            } else {
                State::quantum(s, angle_on(&path, s, spec.angle_deg.unwrap())?).map_err(wrap)?
            };
            states.push((spec.name.clone(), st));
        }

        let mut tasks = Vec::new();
        for (i, spec) in self.tasks.iter().enumerate() {
            let path = format!("tasks[{i}]");
            let pairs = spec
                .pairs
                .iter()
                .enumerate()
                .map(|(k, [a, b])| {
                    Ok((
                        lookup(&attrs, format!("{path}.pairs[{k}][0]"), a)?.clone(),
                        lookup(&attrs, format!("{path}.pairs[{k}][1]"), b)?.clone(),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            tasks.push(Task::new(&spec.name, pairs).map_err(|source| CliError::Task { path, source })?);
        }

        Ok(Model {
            file: self.clone(),
            substrates,
            attributes,
            variables,
            states,
            tasks,
        })
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"{
      "format_version": 1,
      "substrates": [{ "name": "qubit", "backend": "quantum", "dimension": 2 }],
      "attributes": [
        { "name": "0", "substrate": "qubit", "angle_deg": 0 },
        { "name": "1", "substrate": "qubit", "vectors": [[[0, 0], [1, 0]]] },
        { "name": "+", "substrate": "qubit", "angle_deg": 45 },
        { "name": "-", "substrate": "qubit", "angle_deg": -45 }
      ],
      "variables": [
        { "name": "X", "attributes": ["0", "1"] },
        { "name": "Y", "attributes": ["+", "-"] }
      ]
    }"#;

    #[test]
    fn qubit_model() {
        let m = parse_model(QUBIT).unwrap();
        assert_eq!(m.variables.len(), 2);
        assert_eq!(m.substrates[0].size(), 2);
    }

    #[test]
    fn round_trip() {
        let m = parse_model(QUBIT).unwrap();
        let text = serde_json::to_string_pretty(&m.file).unwrap();
        assert_eq!(parse_model(&text).unwrap().file, m.file);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_model("{\n  \"format_version\": 1,\n  \"substrates\": [,]\n}").unwrap_err();
        assert!(matches!(err, CliError::Syntax { line: 3, .. }), "{err}");
    }

    #[test]
    fn unresolved_names() {
        let text = QUBIT.replace(r#"["+", "-"]"#, r#"["+", "minus"]"#);
        match parse_model(&text).unwrap_err() {
            CliError::UnresolvedName { path, name } => {
                assert_eq!(path, "variables[1].attributes[1]");
                assert_eq!(name, "minus");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn wrong_dimension() {
        let text = QUBIT.replace("[[[0, 0], [1, 0]]]", "[[[0, 0], [1, 0], [0, 0]]]");
        assert!(matches!(
            parse_model(&text).unwrap_err(),
            CliError::InvariantViolation { .. }
        ));
    }

    #[test]
    fn composite_classical() {
        let text = r#"{
          "format_version": 1,
          "substrates": [
            { "name": "coin", "backend": "classical", "states": ["head", "tail"] },
            { "name": "pair", "backend": "classical", "factors": ["coin", "coin"] }
          ],
          "attributes": [
            { "name": "hh", "substrate": "pair", "states": ["(head,head)"] },
            { "name": "tt", "substrate": "pair", "states": ["(tail,tail)"] }
          ],
          "tasks": [{ "name": "swap", "pairs": [["hh", "tt"], ["tt", "hh"]] }]
        }"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.substrates[1].size(), 4);
        assert_eq!(m.tasks[0].len(), 2);
    }
}
