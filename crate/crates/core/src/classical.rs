//! Finite classical models, evaluation, and validity checking.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{
    all_tuples, precheck, table_size, tuple_index, Assignment, RawClassicalModel, RawFact,
};
use crate::syntax::{Formula, Sequent};

/// Default ceiling on the number of interpretations a bounded search may visit.
pub const DEFAULT_CEILING: u128 = 1 << 24;

/// The interpretation of one predicate, dense over `universe^arity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    values: Vec<bool>,
}

impl Relation {
    pub fn arity(&self) -> usize {
        self.arity
    }
}

/// `⟨D, I⟩` over a non-empty finite domain. Predicates without an entry are
/// false everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalModel {
    individuals: Vec<String>,
    relations: BTreeMap<String, Relation>,
}

impl ClassicalModel {
    pub fn new(individuals: Vec<String>) -> Result<Self> {
        if individuals.is_empty() {
            return Err(Error::InvalidModel("empty domain".into()));
        }
        let unique: BTreeSet<_> = individuals.iter().collect();
        if unique.len() != individuals.len() {
            return Err(Error::InvalidModel("duplicate individual".into()));
        }
        Ok(ClassicalModel {
            individuals,
            relations: BTreeMap::new(),
        })
    }

    /// Domain `a1, ..., an`.
    pub fn with_size(n: usize) -> Result<Self> {
        ClassicalModel::new((1..=n).map(|i| format!("a{i}")).collect())
    }

    pub fn individuals(&self) -> &[String] {
        &self.individuals
    }

    pub fn size(&self) -> usize {
        self.individuals.len()
    }

    pub fn individual(&self, name: &str) -> Result<usize> {
        self.individuals
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownIndividual(name.to_string()))
    }

    /// Declare `pred` with the given arity, all tuples false.
    pub fn declare(&mut self, pred: &str, arity: usize) -> Result<()> {
        match self.relations.get(pred) {
            Some(r) if r.arity != arity => Err(Error::PredicateArity {
                pred: pred.to_string(),
                model: r.arity,
                formula: arity,
            }),
            Some(_) => Ok(()),
            None => {
                let size = table_size(self.size(), arity)?;
                self.relations.insert(
                    pred.to_string(),
                    Relation {
                        arity,
                        values: vec![false; size],
                    },
                );
                Ok(())
            }
        }
    }

    pub fn set(&mut self, pred: &str, tuple: &[usize], value: bool) -> Result<()> {
        self.declare(pred, tuple.len())?;
        if let Some(&bad) = tuple.iter().find(|&&a| a >= self.size()) {
            return Err(Error::UnknownIndividual(format!("#{bad}")));
        }
        let n = self.size();
        let rel = self.relations.get_mut(pred).expect("declared");
        rel.values[tuple_index(tuple.iter().copied(), n)] = value;
        Ok(())
    }

    pub fn get(&self, pred: &str, tuple: &[usize]) -> bool {
        self.relations
            .get(pred)
            .filter(|r| r.arity == tuple.len())
            .is_some_and(|r| r.values[tuple_index(tuple.iter().copied(), self.size())])
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn predicate_arity(&self, pred: &str) -> Option<usize> {
        self.relations.get(pred).map(|r| r.arity)
    }

    /// Load from the JSON record. Returns the model plus warnings about
    /// entries that were absent and therefore read as 0.
    pub fn from_raw(raw: &RawClassicalModel) -> Result<(Self, Vec<String>)> {
        let mut m = ClassicalModel::new(raw.domain.clone())?;
        let mut seen = BTreeSet::new();
        for fact in &raw.interp {
            let tuple = fact
                .args
                .iter()
                .map(|a| m.individual(a))
                .collect::<Result<Vec<_>>>()?;
            if !seen.insert((fact.pred.clone(), tuple.clone())) {
                return Err(Error::InvalidModel(format!(
                    "duplicate entry for {}({})",
                    fact.pred,
                    fact.args.join(", ")
                )));
            }
            m.set(&fact.pred, &tuple, fact.value.as_bool()?)?;
        }
        let mut warnings = Vec::new();
        for (pred, rel) in &m.relations {
            let missing = all_tuples(m.size(), rel.arity)
                .into_iter()
                .filter(|t| !seen.contains(&(pred.clone(), t.clone())))
                .count();
            if missing > 0 {
                warnings.push(format!(
                    "predicate `{pred}`: {missing} tuple(s) without an entry, read as 0"
                ));
            }
        }
        Ok((m, warnings))
    }

    pub fn to_raw(&self) -> RawClassicalModel {
        let mut interp = Vec::new();
        for (pred, rel) in &self.relations {
            for t in all_tuples(self.size(), rel.arity) {
                interp.push(RawFact {
                    pred: pred.clone(),
                    args: t.iter().map(|&i| self.individuals[i].clone()).collect(),
                    value: self.get(pred, &t).into(),
                });
            }
        }
        RawClassicalModel {
            domain: self.individuals.clone(),
            interp,
        }
    }

    fn check(&self, rho: &Assignment, f: &Formula) -> Result<()> {
        precheck(f, rho, |p| self.predicate_arity(p))?;
        if let Some((x, _)) = rho.iter().find(|&(_, a)| a >= self.size()) {
            return Err(Error::UnknownIndividual(format!("value of `{x}`")));
        }
        Ok(())
    }

    fn eval_in<'f>(&self, f: &'f Formula, env: &mut Vec<(&'f str, usize)>) -> bool {
        match f {
            Formula::Atom { pred, args } => {
                let Some(rel) = self.relations.get(pred) else {
                    return false;
                };
                let n = self.size();
                let idx = tuple_index(args.iter().map(|x| lookup(env, x)), n);
                rel.values[idx]
            }
            Formula::Conn { conn, args } => {
                let mut row = 0usize;
                for a in args {
                    row = (row << 1) | self.eval_in(a, env) as usize;
                }
                conn.eval_row(row)
            }
            Formula::Forall(x, body) => (0..self.size()).all(|a| {
                env.push((x, a));
                let v = self.eval_in(body, env);
                env.pop();
                v
            }),
            Formula::Exists(x, body) => (0..self.size()).any(|a| {
                env.push((x, a));
                let v = self.eval_in(body, env);
                env.pop();
                v
            }),
        }
    }
}

pub(crate) fn lookup(env: &[(&str, usize)], x: &str) -> usize {
    env.iter()
        .rev()
        .find(|(y, _)| *y == x)
        .map(|&(_, a)| a)
        .expect("free variables are checked before evaluation")
}

pub(crate) fn env_of(rho: &Assignment) -> Vec<(&str, usize)> {
    rho.iter().collect()
}

/// `⟦f⟧` under `rho`.
pub fn eval_classical(m: &ClassicalModel, rho: &Assignment, f: &Formula) -> Result<bool> {
    m.check(rho, f)?;
    Ok(m.eval_in(f, &mut env_of(rho)))
}

/// 0 exactly when every antecedent formula holds and every succedent formula fails.
pub fn eval_sequent_classical(m: &ClassicalModel, rho: &Assignment, s: &Sequent) -> Result<bool> {
    for f in s.formulas() {
        m.check(rho, f)?;
    }
    Ok(sequent_value(m, rho, s))
}

fn sequent_value(m: &ClassicalModel, rho: &Assignment, s: &Sequent) -> bool {
    let mut env = env_of(rho);
    let refuted = s.antecedent.iter().all(|f| m.eval_in(f, &mut env))
        && s.succedent.iter().all(|f| !m.eval_in(f, &mut env));
    !refuted
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropVerdict {
    /// Valid under all `rows` valuations of the occurring symbols.
    Valid {
        symbols: Vec<String>,
        rows: usize,
    },
    Countermodel(ClassicalModel),
}

impl PropVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, PropVerdict::Valid { .. })
    }
}

/// Decide a propositional sequent by enumerating the valuations of its
/// propositional symbols. Valuations are visited in lexicographic order
/// (symbols sorted by name, first symbol most significant, 0 before 1) and
/// the first falsifying one is returned as a one-element model.
pub fn decide_propositional(s: &Sequent) -> Result<PropVerdict> {
    if !s.is_propositional() {
        return Err(Error::NotPropositional);
    }
    let symbols: Vec<String> = s.predicates().into_keys().collect();
    let k = symbols.len();
    if k > 24 {
        return Err(Error::BoundInfeasible {
            required: 1u128 << k,
            ceiling: DEFAULT_CEILING,
        });
    }
    let mut m = ClassicalModel::with_size(1)?;
    for p in &symbols {
        m.declare(p, 0)?;
    }
    let rho = Assignment::empty();
    for row in 0..1usize << k {
        for (j, p) in symbols.iter().enumerate() {
            m.set(p, &[], (row >> (k - 1 - j)) & 1 == 1)?;
        }
        if !sequent_value(&m, &rho, s) {
            return Ok(PropVerdict::Countermodel(m));
        }
    }
    Ok(PropVerdict::Valid {
        symbols,
        rows: 1 << k,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedVerdict {
    /// No countermodel with domain size at most the bound. Not a proof of validity.
    NoCountermodelUpTo(usize),
    Countermodel {
        model: ClassicalModel,
        assignment: Assignment,
    },
}

/// Number of interpretations `bounded_fo_validity` visits for the given
/// predicate arities and bound.
pub fn interpretation_count(arities: &[(String, usize)], max_domain: usize) -> u128 {
    let mut total: u128 = 0;
    for n in 1..=max_domain {
        let mut instances: u128 = 0;
        for (_, arity) in arities {
            instances = instances.saturating_add((n as u128).saturating_pow(*arity as u32));
        }
        let count = if instances >= 127 {
            u128::MAX
        } else {
            1u128 << instances
        };
        total = total.saturating_add(count);
    }
    total
}

/// Exhaustive search for a classical countermodel with domain size at most
/// `max_domain`.
///
/// Domains are tried in ascending size. For each size, interpretations are
/// binary counters over the atom instances (predicates by name, tuples
/// lexicographic, the first instance most significant) and, for each
/// interpretation, assignments of the free variables in lexicographic order.
pub fn bounded_fo_validity(
    s: &Sequent,
    max_domain: usize,
    ceiling: u128,
) -> Result<BoundedVerdict> {
    if max_domain == 0 {
        return Err(Error::InvalidBound);
    }
    let arities = s.predicate_arities()?;
    let required = interpretation_count(&arities, max_domain);
    if required > ceiling {
        return Err(Error::BoundInfeasible { required, ceiling });
    }
    let vars: Vec<String> = s.free_vars().into_iter().collect();
    for n in 1..=max_domain {
        let mut instances = Vec::new();
        for (p, arity) in &arities {
            for t in all_tuples(n, *arity) {
                instances.push((p.as_str(), t));
            }
        }
        let domain: Vec<usize> = (0..n).collect();
        let assignments = Assignment::enumerate(&vars, &domain);
        let count = instances.len();
        let mut m = ClassicalModel::with_size(n)?;
        for (p, arity) in &arities {
            m.declare(p, *arity)?;
        }
        for code in 0u64..1 << count {
            for (j, (p, t)) in instances.iter().enumerate() {
                m.set(p, t, (code >> (count - 1 - j)) & 1 == 1)?;
            }
            if let Some(rho) = assignments.iter().find(|rho| !sequent_value(&m, rho, s)) {
                return Ok(BoundedVerdict::Countermodel {
                    model: m,
                    assignment: rho.clone(),
                });
            }
        }
    }
    Ok(BoundedVerdict::NoCountermodelUpTo(max_domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_sequent};
    use crate::truthfn::{standard, Signature};

    fn sig() -> Signature {
        Signature::from_tables([
            standard::and(),
            standard::or(),
            standard::implies(),
            standard::nand(),
        ])
        .unwrap()
    }

    fn seq(text: &str) -> Sequent {
        parse_sequent(text, &sig()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let mut m = ClassicalModel::with_size(1).unwrap();
        m.set("p", &[], true).unwrap();
        m.set("q", &[], false).unwrap();
        let rho = Assignment::empty();
        assert!(eval_classical(&m, &rho, &Formula::prop("p")).unwrap());
        let f = parse_formula("and(p, q)", &sig()).unwrap();
        assert!(!eval_classical(&m, &rho, &f).unwrap());

        let mut m = ClassicalModel::with_size(2).unwrap();
        m.set("P", &[0], true).unwrap();
        m.set("P", &[1], false).unwrap();
        let f = parse_formula("forall x. P(x)", &sig()).unwrap();
        assert!(!eval_classical(&m, &rho, &f).unwrap());
        let f = parse_formula("exists x. P(x)", &sig()).unwrap();
        assert!(eval_classical(&m, &rho, &f).unwrap());
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let m = ClassicalModel::with_size(1).unwrap();
        let f = Formula::atom("P", &["x"]);
        assert!(matches!(
            eval_classical(&m, &Assignment::empty(), &f),
            Err(Error::UnboundVariable(x)) if x == "x"
        ));
        let rho = Assignment::empty().with("x", 3);
        assert!(eval_classical(&m, &rho, &f).is_err());
    }

    #[test]
    fn sequent_examples() {
        let mut m = ClassicalModel::with_size(1).unwrap();
        let rho = Assignment::empty();
        for v in [false, true] {
            m.set("p", &[], v).unwrap();
            assert!(eval_sequent_classical(&m, &rho, &seq("p => p")).unwrap());
        }
        m.set("p", &[], false).unwrap();
        assert!(!eval_sequent_classical(&m, &rho, &seq("=> p")).unwrap());
        m.set("p", &[], true).unwrap();
        assert!(!eval_sequent_classical(&m, &rho, &seq("p =>")).unwrap());
        assert!(!eval_sequent_classical(&m, &rho, &seq("=>")).unwrap());
    }

    #[test]
    fn decide_examples() {
        assert!(
            decide_propositional(&seq("=> implies(implies(implies(p, q), p), p)"))
                .unwrap()
                .is_valid()
        );
        assert!(
            decide_propositional(&seq("nand(nand(p, p), nand(p, p)) => p"))
                .unwrap()
                .is_valid()
        );
        match decide_propositional(&seq("=> p")).unwrap() {
            PropVerdict::Countermodel(m) => assert!(!m.get("p", &[])),
            v => panic!("{v:?}"),
        }
        assert!(matches!(
            decide_propositional(&seq("=> P(x)")),
            Err(Error::NotPropositional)
        ));
    }

    #[test]
    fn decide_returns_lexicographically_first_countermodel() {
        // falsified by (p,q) = (0,1) and (1,0); (0,1) comes first
        match decide_propositional(&seq("=> and(implies(p, q), implies(q, p))")).unwrap() {
            PropVerdict::Countermodel(m) => {
                assert!(!m.get("p", &[]));
                assert!(m.get("q", &[]));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn bounded_examples() {
        assert_eq!(
            bounded_fo_validity(&seq("P(x) => exists y. P(y)"), 2, DEFAULT_CEILING).unwrap(),
            BoundedVerdict::NoCountermodelUpTo(2)
        );
        match bounded_fo_validity(&seq("exists x. P(x) => forall x. P(x)"), 2, DEFAULT_CEILING)
            .unwrap()
        {
            BoundedVerdict::Countermodel { model, .. } => {
                assert_eq!(model.size(), 2);
                let count = (0..2).filter(|&a| model.get("P", &[a])).count();
                assert_eq!(count, 1);
            }
            v => panic!("{v:?}"),
        }
        match bounded_fo_validity(&seq("=> p"), 1, DEFAULT_CEILING).unwrap() {
            BoundedVerdict::Countermodel { model, .. } => assert!(!model.get("p", &[])),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn bounded_errors() {
        assert!(matches!(
            bounded_fo_validity(&seq("=> p"), 0, DEFAULT_CEILING),
            Err(Error::InvalidBound)
        ));
        // R/3 over a 4-element domain has 64 atom instances
        assert!(matches!(
            bounded_fo_validity(&seq("=> R(x, y, z)"), 4, DEFAULT_CEILING),
            Err(Error::BoundInfeasible { .. })
        ));
    }

    #[test]
    fn bounded_agrees_with_decide_at_one() {
        for text in [
            "=> implies(implies(implies(p, q), p), p)",
            "and(p, q) => or(q, r)",
            "or(p, q) => and(p, q)",
            "nand(p, q) => implies(p, q)",
        ] {
            let s = seq(text);
            let prop = decide_propositional(&s).unwrap().is_valid();
            let bounded = matches!(
                bounded_fo_validity(&s, 1, DEFAULT_CEILING).unwrap(),
                BoundedVerdict::NoCountermodelUpTo(1)
            );
            assert_eq!(prop, bounded, "{text}");
        }
    }

    #[test]
    fn monotone_formulas_are_monotone_in_valuation() {
        // every {and, or} formula of depth <= 2 over p, q, r
        let and = standard::and();
        let or = standard::or();
        let atoms: Vec<Formula> = ["p", "q", "r"].iter().map(|p| Formula::prop(p)).collect();
        let mut level = atoms.clone();
        for _ in 0..2 {
            let mut next = atoms.clone();
            for a in &level {
                for b in &level {
                    next.push(Formula::conn(&and, vec![a.clone(), b.clone()]).unwrap());
                    next.push(Formula::conn(&or, vec![a.clone(), b.clone()]).unwrap());
                }
            }
            level = next;
        }
        let model_of = |row: usize| {
            let mut m = ClassicalModel::with_size(1).unwrap();
            for (j, p) in ["p", "q", "r"].iter().enumerate() {
                m.set(p, &[], (row >> j) & 1 == 1).unwrap();
            }
            m
        };
        let rho = Assignment::empty();
        for f in &level {
            for lo in 0..8usize {
                for hi in (0..8usize).filter(|hi| lo & !hi == 0) {
                    let a = eval_classical(&model_of(lo), &rho, f).unwrap();
                    let b = eval_classical(&model_of(hi), &rho, f).unwrap();
                    assert!(a <= b, "{f}");
                }
            }
        }
    }

    #[test]
    fn raw_round_trip_and_warnings() {
        let raw: RawClassicalModel = serde_json::from_str(
            r#"{"domain":["a1","a2"],"interp":[{"pred":"P","args":["a1"],"value":1}]}"#,
        )
        .unwrap();
        let (m, warnings) = ClassicalModel::from_raw(&raw).unwrap();
        assert!(m.get("P", &[0]));
        assert!(!m.get("P", &[1]));
        assert_eq!(warnings.len(), 1);
        let (back, warnings) = ClassicalModel::from_raw(&m.to_raw()).unwrap();
        assert_eq!(back, m);
        assert!(warnings.is_empty());

        let bad: RawClassicalModel = serde_json::from_str(
            r#"{"domain":["a1"],"interp":[{"pred":"P","args":["b"],"value":1}]}"#,
        )
        .unwrap();
        assert!(ClassicalModel::from_raw(&bad).is_err());
        let bad: RawClassicalModel = serde_json::from_str(r#"{"domain":[]}"#).unwrap();
        assert!(ClassicalModel::from_raw(&bad).is_err());
    }
}
