//! First-order formulas over a connective signature, and sequents.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::truthfn::Connective;

pub use parse::{parse_formula, parse_sequent, ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom {
        pred: String,
        args: Vec<String>,
    },
    Conn {
        conn: Connective,
        args: Vec<Formula>,
    },
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    /// A propositional symbol (0-ary atom).
    pub fn prop(name: &str) -> Formula {
        Formula::Atom {
            pred: name.to_string(),
            args: Vec::new(),
        }
    }

    pub fn atom(pred: &str, args: &[&str]) -> Formula {
        Formula::Atom {
            pred: pred.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn conn(conn: &Connective, args: Vec<Formula>) -> Result<Formula> {
        if args.len() != conn.arity() {
            return Err(Error::ConnectiveArity {
                name: conn.name().to_string(),
                expected: conn.arity(),
                found: args.len(),
            });
        }
        Ok(Formula::Conn {
            conn: conn.clone(),
            args,
        })
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { args, .. } => {
                for x in args {
                    if !bound.contains(&x.as_str()) {
                        out.insert(x.clone());
                    }
                }
            }
            Formula::Conn { args, .. } => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                bound.push(x);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Quantifier-free with only 0-ary atoms.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom { args, .. } => args.is_empty(),
            Formula::Conn { args, .. } => args.iter().all(Formula::is_propositional),
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom { .. } => true,
            Formula::Conn { args, .. } => args.iter().all(Formula::is_quantifier_free),
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// Nesting depth of connectives and quantifiers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Conn { args, .. } => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.depth(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom { .. } => 1,
            Formula::Conn { args, .. } => 1 + args.iter().map(Formula::size).sum::<usize>(),
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.size(),
        }
    }

    /// Replace every subformula equal to `target` by `replacement`, outermost first.
    /// Matches never overlap since a replaced subtree is not searched again.
    pub fn substitute(&self, target: &Formula, replacement: &Formula) -> Formula {
        if self == target {
            return replacement.clone();
        }
        match self {
            Formula::Atom { .. } => self.clone(),
            Formula::Conn { conn, args } => Formula::Conn {
                conn: conn.clone(),
                args: args
                    .iter()
                    .map(|a| a.substitute(target, replacement))
                    .collect(),
            },
            Formula::Forall(x, body) => {
                Formula::Forall(x.clone(), Box::new(body.substitute(target, replacement)))
            }
            Formula::Exists(x, body) => {
                Formula::Exists(x.clone(), Box::new(body.substitute(target, replacement)))
            }
        }
    }

    /// Predicate symbols with the arities they are used at.
    pub fn predicates(&self) -> BTreeMap<String, BTreeSet<usize>> {
        let mut out = BTreeMap::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut BTreeMap<String, BTreeSet<usize>>) {
        match self {
            Formula::Atom { pred, args } => {
                out.entry(pred.clone()).or_default().insert(args.len());
            }
            Formula::Conn { args, .. } => args.iter().for_each(|a| a.collect_predicates(out)),
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.collect_predicates(out),
        }
    }

    /// Connectives occurring in the formula, by name.
    pub fn connectives(&self) -> BTreeMap<String, Connective> {
        let mut out = BTreeMap::new();
        self.collect_connectives(&mut out);
        out
    }

    fn collect_connectives(&self, out: &mut BTreeMap<String, Connective>) {
        match self {
            Formula::Atom { .. } => {}
            Formula::Conn { conn, args } => {
                out.entry(conn.name().to_string())
                    .or_insert_with(|| conn.clone());
                args.iter().for_each(|a| a.collect_connectives(out));
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.collect_connectives(out),
        }
    }

    /// All subformulas, preorder, including `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            match f {
                Formula::Atom { .. } => {}
                Formula::Conn { args, .. } => stack.extend(args.iter().rev()),
                Formula::Forall(_, body) | Formula::Exists(_, body) => stack.push(body),
            }
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { pred, args } => {
                f.write_str(pred)?;
                if !args.is_empty() {
                    write!(f, "({})", args.join(", "))?;
                }
                Ok(())
            }
            Formula::Conn { conn, args } => {
                f.write_str(conn.name())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Forall(x, body) => write!(f, "forall {x}. {body}"),
            Formula::Exists(x, body) => write!(f, "exists {x}. {body}"),
        }
    }
}

/// `Γ ⇒ Δ` with both sides finite sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Sequent {
    pub antecedent: BTreeSet<Formula>,
    pub succedent: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(
        antecedent: impl IntoIterator<Item = Formula>,
        succedent: impl IntoIterator<Item = Formula>,
    ) -> Self {
        Sequent {
            antecedent: antecedent.into_iter().collect(),
            succedent: succedent.into_iter().collect(),
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(&self.succedent)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.formulas().flat_map(Formula::free_vars).collect()
    }

    pub fn is_propositional(&self) -> bool {
        self.formulas().all(Formula::is_propositional)
    }

    pub fn predicates(&self) -> BTreeMap<String, BTreeSet<usize>> {
        let mut out: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for f in self.formulas() {
            for (p, arities) in f.predicates() {
                out.entry(p).or_default().extend(arities);
            }
        }
        out
    }

    /// Predicates with a single consistent arity, sorted by name.
    pub fn predicate_arities(&self) -> Result<Vec<(String, usize)>> {
        self.predicates()
            .into_iter()
            .map(|(p, arities)| {
                let mut it = arities.iter();
                let first = *it.next().expect("non-empty");
                match it.next() {
                    Some(&other) => Err(Error::PredicateArity {
                        pred: p,
                        model: first,
                        formula: other,
                    }),
                    None => Ok((p, first)),
                }
            })
            .collect()
    }

    pub fn connectives(&self) -> BTreeMap<String, Connective> {
        let mut out = BTreeMap::new();
        for f in self.formulas() {
            out.extend(f.connectives());
        }
        out
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |set: &BTreeSet<Formula>| {
            set.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let left = side(&self.antecedent);
        let right = side(&self.succedent);
        match (left.is_empty(), right.is_empty()) {
            (true, true) => f.write_str("=>"),
            (true, false) => write!(f, "=> {right}"),
            (false, true) => write!(f, "{left} =>"),
            (false, false) => write!(f, "{left} => {right}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truthfn::standard;

    fn c2(a: Formula, b: Formula) -> Formula {
        let c = std::sync::Arc::new(crate::truthfn::TruthTable::from_bits("c", 2, "0110").unwrap());
        Formula::conn(&c, vec![a, b]).unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(
            Formula::atom("p", &["x", "y"]).free_vars(),
            set(&["x", "y"])
        );
        assert_eq!(
            Formula::forall("x", Formula::atom("p", &["x", "y"])).free_vars(),
            set(&["y"])
        );
        let f = c2(
            Formula::atom("p", &["x"]),
            Formula::exists("x", Formula::atom("q", &["x"])),
        );
        assert_eq!(f.free_vars(), set(&["x"]));
    }

    #[test]
    fn propositional_examples() {
        assert!(c2(Formula::prop("p"), Formula::prop("q")).is_propositional());
        assert!(!Formula::atom("p", &["x"]).is_propositional());
        assert!(!Formula::forall("x", Formula::prop("p")).is_propositional());
    }

    #[test]
    fn substitution_examples() {
        let tau = Formula::conn(
            &standard::implies(),
            vec![Formula::prop("s"), Formula::prop("s")],
        )
        .unwrap();
        let r = Formula::prop("r");
        let f = c2(tau.clone(), Formula::prop("p"));
        assert_eq!(f.substitute(&tau, &r), c2(r.clone(), Formula::prop("p")));
        assert_eq!(tau.substitute(&tau, &r), r);

        let ss = c2(Formula::prop("s"), Formula::prop("s"));
        let f = c2(ss.clone(), ss.clone());
        assert_eq!(f.substitute(&ss, &r), c2(r.clone(), r.clone()));
    }

    #[test]
    fn substitution_is_outermost() {
        // target c(s,s) nested in itself: the outer match wins and the inner is not revisited
        let ss = c2(Formula::prop("s"), Formula::prop("s"));
        let target = c2(ss.clone(), ss.clone());
        let f = c2(target.clone(), ss.clone());
        let r = Formula::prop("r");
        assert_eq!(f.substitute(&target, &r), c2(r, ss));
    }

    #[test]
    fn sequent_display() {
        let s = Sequent::new([], [Formula::prop("p")]);
        assert_eq!(s.to_string(), "=> p");
        assert_eq!(Sequent::default().to_string(), "=>");
        let s = Sequent::new([Formula::prop("q"), Formula::prop("p")], []);
        assert_eq!(s.to_string(), "p, q =>");
    }

    #[test]
    fn conn_arity_checked() {
        assert!(matches!(
            Formula::conn(&standard::nand(), vec![Formula::prop("p")]),
            Err(Error::ConnectiveArity { .. })
        ));
    }
}
