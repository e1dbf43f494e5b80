//! Pieces shared by classical and Kripke models: assignments, tuple
//! indexing and the JSON interchange records.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::Formula;

/// Partial map from variables to individuals (indices into the model's
/// list of individuals).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(BTreeMap<String, usize>);

impl Assignment {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: &str, individual: usize) {
        self.0.insert(var.to_string(), individual);
    }

    pub fn with(mut self, var: &str, individual: usize) -> Self {
        self.bind(var, individual);
        self
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `{x -> a1, y -> a2}` using the given individual names.
    pub fn render(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .iter()
            .map(|(x, i)| format!("{x} -> {}", names.get(i).map_or("?", |s| s.as_str())))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn to_named(&self, names: &[String]) -> BTreeMap<String, String> {
        self.iter()
            .map(|(x, i)| (x.to_string(), names[i].clone()))
            .collect()
    }

    /// Every assignment of `vars` to individuals from `domain`, in
    /// lexicographic order with the first variable most significant.
    pub fn enumerate(vars: &[String], domain: &[usize]) -> Vec<Assignment> {
        let mut out = vec![Assignment::empty()];
        for var in vars {
            let mut next = Vec::with_capacity(out.len() * domain.len());
            for base in &out {
                for &d in domain {
                    next.push(base.clone().with(var, d));
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(x, i)| format!("{x} -> #{i}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Position of `tuple` in a dense table over a universe of `n` individuals,
/// first component most significant.
pub(crate) fn tuple_index(tuple: impl IntoIterator<Item = usize>, n: usize) -> usize {
    tuple.into_iter().fold(0, |acc, a| acc * n + a)
}

/// All tuples of the given arity over `0..n`, lexicographic.
pub(crate) fn all_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for a in 0..n {
                let mut t = t.clone();
                t.push(a);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn table_size(n: usize, arity: usize) -> Result<usize> {
    const LIMIT: usize = 1 << 24;
    let mut size: usize = 1;
    for _ in 0..arity {
        size = size
            .checked_mul(n)
            .filter(|&s| s <= LIMIT)
            .ok_or_else(|| Error::ModelTooLarge(format!("{n}^{arity} tuples")))?;
    }
    Ok(size)
}

/// Checks that the free variables of `f` are bound by `rho` and that every
/// atom agrees with `arity_of` on its predicate's arity.
pub(crate) fn precheck(
    f: &Formula,
    rho: &Assignment,
    arity_of: impl Fn(&str) -> Option<usize>,
) -> Result<()> {
    for x in f.free_vars() {
        if rho.get(&x).is_none() {
            return Err(Error::UnboundVariable(x));
        }
    }
    for (pred, arities) in f.predicates() {
        if let Some(model) = arity_of(&pred) {
            if let Some(&formula) = arities.iter().find(|&&a| a != model) {
                return Err(Error::PredicateArity {
                    pred,
                    model,
                    formula,
                });
            }
        }
    }
    Ok(())
}

/// Truth value in JSON documents: `0`/`1` (booleans accepted on input).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Int(u8),
    Bool(bool),
}

impl RawValue {
    pub fn as_bool(self) -> Result<bool> {
        match self {
            RawValue::Int(0) | RawValue::Bool(false) => Ok(false),
            RawValue::Int(1) | RawValue::Bool(true) => Ok(true),
            RawValue::Int(v) => Err(Error::InvalidModel(format!(
                "truth value must be 0 or 1, found {v}"
            ))),
        }
    }
}

impl From<bool> for RawValue {
    fn from(b: bool) -> Self {
        RawValue::Int(b as u8)
    }
}

/// One interpretation entry of a classical model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFact {
    pub pred: String,
    #[serde(default)]
    pub args: Vec<String>,
    pub value: RawValue,
}

/// Classical model file: `{"domain": [...], "interp": [{pred, args, value}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawClassicalModel {
    pub domain: Vec<String>,
    #[serde(default)]
    pub interp: Vec<RawFact>,
}

/// One interpretation entry of a Kripke model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawWorldFact {
    pub world: String,
    pub pred: String,
    #[serde(default)]
    pub args: Vec<String>,
    pub value: RawValue,
}

/// Kripke model file. Either `domain` (constant domain) or `domains`
/// (per world) must be present; `order` is closed reflexively and
/// transitively on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawKripkeModel {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domains: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_domain: Option<bool>,
    #[serde(default)]
    pub interp: Vec<RawWorldFact>,
}

/// Either kind of model file, told apart by the presence of `worlds`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawModel {
    Kripke(RawKripkeModel),
    Classical(RawClassicalModel),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_assignments_in_order() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let all = Assignment::enumerate(&vars, &[0, 1]);
        let rendered: Vec<_> = all
            .iter()
            .map(|a| (a.get("x").unwrap(), a.get("y").unwrap()))
            .collect();
        assert_eq!(rendered, [(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(Assignment::enumerate(&[], &[0, 1]).len(), 1);
    }

    #[test]
    fn tuple_indexing() {
        let ts = all_tuples(3, 2);
        for (i, t) in ts.iter().enumerate() {
            assert_eq!(tuple_index(t.iter().copied(), 3), i);
        }
        assert_eq!(all_tuples(5, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn raw_model_kinds() {
        let k: RawModel = serde_json::from_str(r#"{"worlds":["w0"],"domain":["a1"]}"#).unwrap();
        assert!(matches!(k, RawModel::Kripke(_)));
        let c: RawModel =
            serde_json::from_str(r#"{"domain":["a1"],"interp":[{"pred":"p","value":true}]}"#)
                .unwrap();
        assert!(matches!(c, RawModel::Classical(_)));
    }
}
