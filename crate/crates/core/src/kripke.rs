//! Finite Kripke models for arbitrary connectives.
//!
//! A connective `c(α1..αn)` holds at `w` iff the truth function returns 1 on
//! the argument values at every `v ⪰ w`; `∀x α` holds at `w` iff `α` holds at
//! every `v ⪰ w` for every individual of `D(v)`; `∃x α` holds at `w` iff `α`
//! holds at `w` for some individual of `D(w)`.
//!
//! Evaluation works on bitmasks over worlds (at most 64): each subformula is
//! evaluated once per assignment at all worlds simultaneously.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::classical::{env_of, lookup};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::model::{
    all_tuples, precheck, table_size, tuple_index, Assignment, RawKripkeModel, RawWorldFact,
};
use crate::syntax::{Formula, Sequent};

pub const MAX_WORLDS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
struct WorldRelation {
    arity: usize,
    /// For each tuple, the worlds where the atom holds.
    masks: Vec<u64>,
}

/// A validated finite Kripke model. The order is stored as its
/// reflexive-transitive closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<String>,
    up: Vec<u64>,
    individuals: Vec<String>,
    /// `present[a]`: worlds whose domain contains individual `a`.
    present: Vec<u64>,
    relations: BTreeMap<String, WorldRelation>,
    constant_domain: bool,
}

/// Which clause to use for connectives or universal quantifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// Quantify over every `v ⪰ w` (the defining clause).
    Upward,
    /// Look only at the present world.
    Present,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clauses {
    pub conn: Clause,
    pub forall: Clause,
}

impl Clauses {
    pub const STANDARD: Clauses = Clauses {
        conn: Clause::Upward,
        forall: Clause::Upward,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationCode {
    EmptyWorlds,
    TooManyWorlds,
    DuplicateWorld,
    UnknownWorld,
    MissingDomain,
    EmptyDomain,
    UnknownIndividual,
    DomainMonotonicity,
    ConstantDomain,
    BadValue,
    ArityMismatch,
    DuplicateEntry,
    OutsideDomain,
    Heredity,
}

/// A model-condition failure with machine-readable witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub world: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub later_world: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pred: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<String>>,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Violation {
            code,
            message: message.into(),
            world: None,
            later_world: None,
            pred: None,
            tuple: None,
        }
    }

    fn at(mut self, w: &str) -> Self {
        self.world = Some(w.to_string());
        self
    }

    fn later(mut self, v: &str) -> Self {
        self.later_world = Some(v.to_string());
        self
    }

    fn atom(mut self, pred: &str, tuple: Vec<String>) -> Self {
        self.pred = Some(pred.to_string());
        self.tuple = Some(tuple);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = serde_json::to_value(self.code).expect("serializable");
        write!(f, "[{}] {}", code.as_str().unwrap_or("?"), self.message)
    }
}

/// One atomic fact for model construction: `(world, predicate, tuple, value)`.
pub type Fact = (usize, String, Vec<usize>, bool);

impl KripkeModel {
    /// Build and validate. `order` pairs `(w, v)` mean `w ⪯ v` and are closed
    /// reflexively and transitively; `domains[w]` lists individual indices.
    pub fn new(
        worlds: Vec<String>,
        order: &[(usize, usize)],
        individuals: Vec<String>,
        domains: Vec<Vec<usize>>,
        facts: &[Fact],
    ) -> std::result::Result<Self, Vec<Violation>> {
        let model = Self::assemble(worlds, order, individuals, domains, facts)?;
        let violations = model.violations();
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(violations)
        }
    }

    /// Like [`KripkeModel::new`] but skipping the domain-monotonicity and
    /// heredity checks. Only for constructing deliberately broken models.
    pub fn new_unchecked(
        worlds: Vec<String>,
        order: &[(usize, usize)],
        individuals: Vec<String>,
        domains: Vec<Vec<usize>>,
        facts: &[Fact],
    ) -> std::result::Result<Self, Vec<Violation>> {
        Self::assemble(worlds, order, individuals, domains, facts)
    }

    fn assemble(
        worlds: Vec<String>,
        order: &[(usize, usize)],
        individuals: Vec<String>,
        domains: Vec<Vec<usize>>,
        facts: &[Fact],
    ) -> std::result::Result<Self, Vec<Violation>> {
        use ViolationCode::*;
        let k = worlds.len();
        let mut errs = Vec::new();
        if k == 0 {
            return Err(vec![Violation::new(EmptyWorlds, "model has no worlds")]);
        }
        if k > MAX_WORLDS {
            return Err(vec![Violation::new(
                TooManyWorlds,
                format!("{k} worlds exceed the limit of {MAX_WORLDS}"),
            )]);
        }
        if domains.len() != k {
            return Err(vec![Violation::new(
                MissingDomain,
                "one domain per world is required",
            )]);
        }
        let n = individuals.len();
        let mut up = vec![0u64; k];
        for &(w, v) in order {
            if w >= k || v >= k {
                errs.push(Violation::new(
                    UnknownWorld,
                    format!("order pair ({w}, {v})"),
                ));
                continue;
            }
            up[w] |= 1 << v;
        }
        let up = enumerate::closure(up);
        let mut present = vec![0u64; n];
        for (w, dom) in domains.iter().enumerate() {
            if dom.is_empty() {
                errs.push(Violation::new(EmptyDomain, "empty domain").at(&worlds[w]));
            }
            for &a in dom {
                if a >= n {
                    errs.push(
                        Violation::new(UnknownIndividual, format!("individual #{a}"))
                            .at(&worlds[w]),
                    );
                    continue;
                }
                present[a] |= 1 << w;
            }
        }
        let constant_domain = present.iter().all(|&m| m == 0 || m == all_worlds(k));
        let mut relations: BTreeMap<String, WorldRelation> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (w, pred, tuple, value) in facts {
            let (w, value) = (*w, *value);
            if w >= k {
                errs.push(Violation::new(UnknownWorld, format!("world #{w}")));
                continue;
            }
            if let Some(&a) = tuple.iter().find(|&&a| a >= n) {
                errs.push(
                    Violation::new(UnknownIndividual, format!("individual #{a}")).at(&worlds[w]),
                );
                continue;
            }
            let names: Vec<String> = tuple.iter().map(|&a| individuals[a].clone()).collect();
            let rel = match relations.get_mut(pred) {
                Some(rel) if rel.arity != tuple.len() => {
                    errs.push(
                        Violation::new(
                            ArityMismatch,
                            format!(
                                "`{pred}` used with arities {} and {}",
                                rel.arity,
                                tuple.len()
                            ),
                        )
                        .at(&worlds[w])
                        .atom(pred, names),
                    );
                    continue;
                }
                Some(rel) => rel,
                None => {
                    let size = match table_size(n, tuple.len()) {
                        Ok(s) => s,
                        Err(e) => {
                            errs.push(Violation::new(ArityMismatch, e.to_string()));
                            continue;
                        }
                    };
                    relations.entry(pred.clone()).or_insert(WorldRelation {
                        arity: tuple.len(),
                        masks: vec![0; size],
                    })
                }
            };
            if !seen.insert((w, pred.clone(), tuple.clone())) {
                errs.push(
                    Violation::new(DuplicateEntry, format!("duplicate entry for `{pred}`"))
                        .at(&worlds[w])
                        .atom(pred, names),
                );
                continue;
            }
            if tuple.iter().any(|&a| present[a] & (1 << w) == 0) {
                errs.push(
                    Violation::new(
                        OutsideDomain,
                        format!("`{pred}` entry mentions an individual outside the domain"),
                    )
                    .at(&worlds[w])
                    .atom(pred, names),
                );
                continue;
            }
            if value {
                rel.masks[tuple_index(tuple.iter().copied(), n)] |= 1 << w;
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(KripkeModel {
            worlds,
            up,
            individuals,
            present,
            relations,
            constant_domain,
        })
    }

    /// Domain monotonicity and atomic heredity, every failure with witnesses.
    pub fn violations(&self) -> Vec<Violation> {
        use ViolationCode::*;
        let mut out = Vec::new();
        let k = self.worlds.len();
        for w in 0..k {
            for v in self.successors(w).filter(|&v| v != w) {
                for a in 0..self.individuals.len() {
                    if self.in_domain(w, a) && !self.in_domain(v, a) {
                        out.push(
                            Violation::new(
                                DomainMonotonicity,
                                format!(
                                    "{} ⪯ {} but `{}` ∈ D({}) \\ D({})",
                                    self.worlds[w],
                                    self.worlds[v],
                                    self.individuals[a],
                                    self.worlds[w],
                                    self.worlds[v]
                                ),
                            )
                            .at(&self.worlds[w])
                            .later(&self.worlds[v]),
                        );
                    }
                }
            }
        }
        let n = self.individuals.len();
        for (pred, rel) in &self.relations {
            for (idx, tuple) in all_tuples(n, rel.arity).into_iter().enumerate() {
                let mask = rel.masks[idx];
                for w in (0..k).filter(|&w| mask & (1 << w) != 0) {
                    if !tuple.iter().all(|&a| self.in_domain(w, a)) {
                        continue;
                    }
                    for v in self.successors(w).filter(|&v| mask & (1 << v) == 0) {
                        let names: Vec<String> =
                            tuple.iter().map(|&a| self.individuals[a].clone()).collect();
                        out.push(
                            Violation::new(
                                Heredity,
                                format!(
                                    "{} ⪯ {} but {pred}({}) holds at {} and fails at {}",
                                    self.worlds[w],
                                    self.worlds[v],
                                    names.join(", "),
                                    self.worlds[w],
                                    self.worlds[v]
                                ),
                            )
                            .at(&self.worlds[w])
                            .later(&self.worlds[v])
                            .atom(pred, names),
                        );
                    }
                }
            }
        }
        out
    }

    /// Constant-domain model over `a1..an` from per-instance world masks,
    /// used by the enumerators. Masks must be up-sets of `up`.
    pub(crate) fn from_instance_masks(
        up: &[u64],
        n: usize,
        preds: &[(String, usize)],
        instances: &[(String, Vec<usize>)],
        masks: &[u64],
    ) -> KripkeModel {
        let k = up.len();
        let mut relations = BTreeMap::new();
        for (p, arity) in preds {
            relations.insert(
                p.clone(),
                WorldRelation {
                    arity: *arity,
                    masks: vec![0; n.pow(*arity as u32)],
                },
            );
        }
        for ((p, t), &m) in instances.iter().zip(masks) {
            let rel = relations.get_mut(p).expect("declared");
            rel.masks[tuple_index(t.iter().copied(), n)] = m;
        }
        let model = KripkeModel {
            worlds: (0..k).map(|w| format!("w{w}")).collect(),
            up: up.to_vec(),
            individuals: (1..=n).map(|i| format!("a{i}")).collect(),
            present: vec![all_worlds(k); n],
            relations,
            constant_domain: true,
        };
        debug_assert!(model.violations().is_empty());
        model
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world(&self, name: &str) -> Result<usize> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| Error::UnknownWorld(name.to_string()))
    }

    pub fn individuals(&self) -> &[String] {
        &self.individuals
    }

    pub fn individual(&self, name: &str) -> Result<usize> {
        self.individuals
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownIndividual(name.to_string()))
    }

    pub fn leq(&self, w: usize, v: usize) -> bool {
        self.up[w] & (1 << v) != 0
    }

    /// Worlds `v` with `w ⪯ v`, ascending.
    pub fn successors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.up[w];
        (0..self.worlds.len()).filter(move |&v| mask & (1 << v) != 0)
    }

    pub fn in_domain(&self, w: usize, a: usize) -> bool {
        self.present[a] & (1 << w) != 0
    }

    /// `D(w)` as ascending individual indices.
    pub fn domain(&self, w: usize) -> Vec<usize> {
        (0..self.individuals.len())
            .filter(|&a| self.in_domain(w, a))
            .collect()
    }

    pub fn is_constant_domain(&self) -> bool {
        self.constant_domain
    }

    pub fn holds(&self, w: usize, pred: &str, tuple: &[usize]) -> bool {
        self.relations
            .get(pred)
            .filter(|r| r.arity == tuple.len())
            .is_some_and(|r| {
                r.masks[tuple_index(tuple.iter().copied(), self.individuals.len())] & (1 << w) != 0
            })
    }

    /// Interpreted predicates with their arities, by name.
    pub fn predicates(&self) -> Vec<(String, usize)> {
        self.relations
            .iter()
            .map(|(p, r)| (p.clone(), r.arity))
            .collect()
    }

    pub fn predicate_arity(&self, pred: &str) -> Option<usize> {
        self.relations.get(pred).map(|r| r.arity)
    }

    /// Overwrite one atomic value without re-validating. Intended for
    /// negative controls; the result may violate heredity.
    pub fn set_atom_unchecked(&mut self, w: usize, pred: &str, tuple: &[usize], value: bool) {
        let n = self.individuals.len();
        let rel = self
            .relations
            .entry(pred.to_string())
            .or_insert_with(|| WorldRelation {
                arity: tuple.len(),
                masks: vec![0; n.pow(tuple.len() as u32)],
            });
        let idx = tuple_index(tuple.iter().copied(), n);
        if value {
            rel.masks[idx] |= 1 << w;
        } else {
            rel.masks[idx] &= !(1 << w);
        }
    }

    pub fn to_raw(&self) -> RawKripkeModel {
        let k = self.worlds.len();
        let mut order = Vec::new();
        for w in 0..k {
            for v in self.successors(w).filter(|&v| v != w) {
                order.push((self.worlds[w].clone(), self.worlds[v].clone()));
            }
        }
        let names = |dom: Vec<usize>| -> Vec<String> {
            dom.into_iter()
                .map(|a| self.individuals[a].clone())
                .collect()
        };
        let (domain, domains) = if self.constant_domain {
            (Some(names(self.domain(0))), None)
        } else {
            (
                None,
                Some(
                    (0..k)
                        .map(|w| (self.worlds[w].clone(), names(self.domain(w))))
                        .collect(),
                ),
            )
        };
        let mut interp = Vec::new();
        for (pred, rel) in &self.relations {
            for w in 0..k {
                for t in all_tuples(self.individuals.len(), rel.arity) {
                    if t.iter().all(|&a| self.in_domain(w, a)) {
                        interp.push(RawWorldFact {
                            world: self.worlds[w].clone(),
                            pred: pred.clone(),
                            args: t.iter().map(|&a| self.individuals[a].clone()).collect(),
                            value: self.holds(w, pred, &t).into(),
                        });
                    }
                }
            }
        }
        RawKripkeModel {
            worlds: self.worlds.clone(),
            order,
            domain,
            domains,
            constant_domain: None,
            interp,
        }
    }

    fn check(&self, w: usize, rho: &Assignment, f: &Formula) -> Result<()> {
        if w >= self.worlds.len() {
            return Err(Error::UnknownWorld(format!("#{w}")));
        }
        precheck(f, rho, |p| self.predicate_arity(p))?;
        for (x, a) in rho.iter() {
            if a >= self.individuals.len() || !self.in_domain(w, a) {
                return Err(Error::OutsideDomain {
                    var: x.to_string(),
                    world: self.worlds[w].clone(),
                });
            }
        }
        Ok(())
    }

    fn all(&self) -> u64 {
        all_worlds(self.worlds.len())
    }

    /// Worlds `w` such that every `v ⪰ w` is in `mask`.
    fn boxed(&self, mask: u64) -> u64 {
        let mut out = 0;
        for (w, &up) in self.up.iter().enumerate() {
            if up & !mask == 0 {
                out |= 1 << w;
            }
        }
        out
    }

    /// Worlds where `f` holds under `env`. Values at worlds whose domain
    /// does not contain the assigned individuals are meaningless; they never
    /// feed into meaningful worlds since every clause looks only upward or at
    /// the present world.
    fn mask<'f>(&self, f: &'f Formula, env: &mut Vec<(&'f str, usize)>, clauses: Clauses) -> u64 {
        match f {
            Formula::Atom { pred, args } => match self.relations.get(pred) {
                Some(rel) => {
                    let idx =
                        tuple_index(args.iter().map(|x| lookup(env, x)), self.individuals.len());
                    rel.masks[idx]
                }
                None => 0,
            },
            Formula::Conn { conn, args } => {
                let children: Vec<u64> = args.iter().map(|a| self.mask(a, env, clauses)).collect();
                let mut raw = 0u64;
                for v in 0..self.worlds.len() {
                    let row = children
                        .iter()
                        .fold(0usize, |acc, &m| (acc << 1) | ((m >> v) & 1) as usize);
                    if conn.eval_row(row) {
                        raw |= 1 << v;
                    }
                }
                match clauses.conn {
                    Clause::Upward => self.boxed(raw),
                    Clause::Present => raw,
                }
            }
            Formula::Forall(x, body) => {
                let mut inner = self.all();
                for a in 0..self.individuals.len() {
                    env.push((x, a));
                    let m = self.mask(body, env, clauses);
                    env.pop();
                    inner &= m | !self.present[a];
                }
                match clauses.forall {
                    Clause::Upward => self.boxed(inner),
                    Clause::Present => inner,
                }
            }
            Formula::Exists(x, body) => {
                let mut out = 0;
                for a in 0..self.individuals.len() {
                    env.push((x, a));
                    let m = self.mask(body, env, clauses);
                    env.pop();
                    out |= m & self.present[a];
                }
                out
            }
        }
    }

    fn standard_mask<'f>(&self, f: &'f Formula, env: &mut Vec<(&'f str, usize)>) -> u64 {
        let m = self.mask(f, env, Clauses::STANDARD);
        if cfg!(debug_assertions) && self.constant_domain {
            let present = Clauses {
                conn: Clause::Upward,
                forall: Clause::Present,
            };
            debug_assert_eq!(
                m,
                self.mask(f, env, present),
                "universal clauses disagree on a constant-domain model for {f}"
            );
        }
        m
    }

    /// Worlds where the assignment maps into the domain.
    fn defined_at(&self, rho: &Assignment) -> u64 {
        rho.iter().fold(self.all(), |acc, (_, a)| {
            acc & self.present.get(a).copied().unwrap_or(0)
        })
    }
}

fn all_worlds(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// `∥f∥` at world `w` under `rho`.
pub fn eval_kripke(k: &KripkeModel, w: usize, rho: &Assignment, f: &Formula) -> Result<bool> {
    k.check(w, rho, f)?;
    Ok(k.standard_mask(f, &mut env_of(rho)) & (1 << w) != 0)
}

/// Evaluation with alternative clauses, for comparing the defining upward
/// clauses with their present-world simplifications.
pub fn eval_kripke_with(
    k: &KripkeModel,
    w: usize,
    rho: &Assignment,
    f: &Formula,
    clauses: Clauses,
) -> Result<bool> {
    k.check(w, rho, f)?;
    Ok(k.mask(f, &mut env_of(rho), clauses) & (1 << w) != 0)
}

/// Values of `f` at every world, `None` where `rho` leaves the domain.
pub fn eval_all_worlds(
    k: &KripkeModel,
    rho: &Assignment,
    f: &Formula,
) -> Result<Vec<Option<bool>>> {
    precheck(f, rho, |p| k.predicate_arity(p))?;
    if let Some((x, _)) = rho.iter().find(|&(_, a)| a >= k.individuals.len()) {
        return Err(Error::UnknownIndividual(format!(
            "#{} for `{x}`",
            rho.get(x).unwrap_or(0)
        )));
    }
    let defined = k.defined_at(rho);
    let m = k.standard_mask(f, &mut env_of(rho));
    Ok((0..k.world_count())
        .map(|w| (defined & (1 << w) != 0).then_some(m & (1 << w) != 0))
        .collect())
}

/// 0 exactly when every antecedent formula holds at `w` and every succedent
/// formula fails there.
pub fn eval_sequent_kripke(
    k: &KripkeModel,
    w: usize,
    rho: &Assignment,
    s: &Sequent,
) -> Result<bool> {
    for f in s.formulas() {
        k.check(w, rho, f)?;
    }
    Ok(k.refuted_at(rho, s) & (1 << w) == 0)
}

impl KripkeModel {
    fn refuted_at(&self, rho: &Assignment, s: &Sequent) -> u64 {
        let mut env = env_of(rho);
        let mut refuted = self.defined_at(rho);
        for f in &s.antecedent {
            refuted &= self.standard_mask(f, &mut env);
        }
        for f in &s.succedent {
            refuted &= !self.standard_mask(f, &mut env);
        }
        refuted
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelVerdict {
    Valid,
    Failure {
        world: usize,
        assignment: Assignment,
    },
}

impl ModelVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ModelVerdict::Valid)
    }
}

/// Check a sequent at every world under every assignment of its free
/// variables into the world's domain. The reported failure is the first
/// world (by index) and, within it, the first assignment in lexicographic
/// order.
pub fn model_validity(k: &KripkeModel, s: &Sequent) -> Result<ModelVerdict> {
    for f in s.formulas() {
        precheck_arities(k, f)?;
    }
    let vars: Vec<String> = s.free_vars().into_iter().collect();
    let universe: Vec<usize> = (0..k.individuals.len()).collect();
    let mut best: Option<(usize, Assignment)> = None;
    for rho in Assignment::enumerate(&vars, &universe) {
        let refuted = k.refuted_at(&rho, s);
        if refuted == 0 {
            continue;
        }
        let w = refuted.trailing_zeros() as usize;
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, rho));
            if w == 0 {
                break;
            }
        }
    }
    Ok(match best {
        Some((world, assignment)) => ModelVerdict::Failure { world, assignment },
        None => ModelVerdict::Valid,
    })
}

fn precheck_arities(k: &KripkeModel, f: &Formula) -> Result<()> {
    for (pred, arities) in f.predicates() {
        if let Some(model) = k.predicate_arity(&pred) {
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

/// True iff `∥f∥_w ≤ ∥f∥_v` for all `w ⪯ v` at which `rho` is defined.
pub fn check_heredity(k: &KripkeModel, f: &Formula, rho: &Assignment) -> Result<bool> {
    Ok(heredity_counterexample(k, f, rho)?.is_none())
}

/// The first pair `w ⪯ v` with `∥f∥_w = 1` and `∥f∥_v = 0`, if any.
pub fn heredity_counterexample(
    k: &KripkeModel,
    f: &Formula,
    rho: &Assignment,
) -> Result<Option<(usize, usize)>> {
    precheck(f, rho, |p| k.predicate_arity(p))?;
    let defined = k.defined_at(rho);
    let m = k.mask(f, &mut env_of(rho), Clauses::STANDARD);
    for w in (0..k.world_count()).filter(|&w| defined & m & (1 << w) != 0) {
        if let Some(v) = k.successors(w).find(|&v| m & (1 << v) == 0) {
            return Ok(Some((w, v)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CdSearchVerdict {
    /// No constant-domain countermodel within the bounds. Not a validity proof.
    NoCountermodelUpTo { worlds: usize, domain: usize },
    Countermodel {
        model: KripkeModel,
        world: usize,
        assignment: Assignment,
    },
}

/// Enumerate constant-domain models within the bounds (see
/// [`enumerate::for_each_cd_model`] for the order) and return the first one
/// refuting `s`.
pub fn bounded_cd_countermodel_search(
    s: &Sequent,
    max_worlds: usize,
    max_domain: usize,
    ceiling: u128,
) -> Result<CdSearchVerdict> {
    let preds = s.predicate_arities()?;
    let found = enumerate::for_each_cd_model(&preds, max_worlds, max_domain, ceiling, |m| {
        match model_validity(m, s) {
            Ok(ModelVerdict::Valid) => ControlFlow::Continue(()),
            Ok(ModelVerdict::Failure { world, assignment }) => {
                ControlFlow::Break(Ok((m.clone(), world, assignment)))
            }
            Err(e) => ControlFlow::Break(Err(e)),
        }
    })?;
    match found {
        None => Ok(CdSearchVerdict::NoCountermodelUpTo {
            worlds: max_worlds,
            domain: max_domain,
        }),
        Some(r) => {
            let (model, world, assignment) = r?;
            Ok(CdSearchVerdict::Countermodel {
                model,
                world,
                assignment,
            })
        }
    }
}

/// Build a model from its JSON record, reporting every violated condition.
pub fn validate_kripke_model(
    raw: &RawKripkeModel,
) -> std::result::Result<KripkeModel, Vec<Violation>> {
    use ViolationCode::*;
    let mut errs = Vec::new();
    let mut world_idx = BTreeMap::new();
    for (i, w) in raw.worlds.iter().enumerate() {
        if world_idx.insert(w.as_str(), i).is_some() {
            errs.push(Violation::new(DuplicateWorld, format!("world `{w}` listed twice")).at(w));
        }
    }
    let mut order = Vec::new();
    for (w, v) in &raw.order {
        match (world_idx.get(w.as_str()), world_idx.get(v.as_str())) {
            (Some(&a), Some(&b)) => order.push((a, b)),
            _ => errs.push(Violation::new(
                UnknownWorld,
                format!("order pair ({w}, {v}) names an unknown world"),
            )),
        }
    }
    let mut individuals: Vec<String> = Vec::new();
    let intern = |name: &str, individuals: &mut Vec<String>| -> usize {
        match individuals.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                individuals.push(name.to_string());
                individuals.len() - 1
            }
        }
    };
    let domains: Vec<Vec<usize>> = match (&raw.domain, &raw.domains) {
        (Some(dom), None) => {
            let ids: Vec<usize> = dom.iter().map(|a| intern(a, &mut individuals)).collect();
            vec![ids; raw.worlds.len()]
        }
        (None, Some(map)) => {
            for w in map.keys() {
                if !world_idx.contains_key(w.as_str()) {
                    errs.push(Violation::new(
                        UnknownWorld,
                        format!("domain for unknown world `{w}`"),
                    ));
                }
            }
            raw.worlds
                .iter()
                .map(|w| match map.get(w) {
                    Some(dom) => dom.iter().map(|a| intern(a, &mut individuals)).collect(),
                    None => Vec::new(),
                })
                .collect()
        }
        _ => {
            errs.push(Violation::new(
                MissingDomain,
                "exactly one of `domain` and `domains` is required",
            ));
            vec![Vec::new(); raw.worlds.len()]
        }
    };
    let mut facts = Vec::new();
    for fact in &raw.interp {
        let Some(&w) = world_idx.get(fact.world.as_str()) else {
            errs.push(Violation::new(
                UnknownWorld,
                format!("entry for unknown world `{}`", fact.world),
            ));
            continue;
        };
        let mut tuple = Vec::new();
        for a in &fact.args {
            match individuals.iter().position(|n| n == a) {
                Some(i) => tuple.push(i),
                None => errs.push(
                    Violation::new(UnknownIndividual, format!("unknown individual `{a}`"))
                        .at(&fact.world)
                        .atom(&fact.pred, fact.args.clone()),
                ),
            }
        }
        if tuple.len() != fact.args.len() {
            continue;
        }
        match fact.value.as_bool() {
            Ok(v) => facts.push((w, fact.pred.clone(), tuple, v)),
            Err(e) => errs.push(
                Violation::new(BadValue, e.to_string())
                    .at(&fact.world)
                    .atom(&fact.pred, fact.args.clone()),
            ),
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    let model = KripkeModel::assemble(raw.worlds.clone(), &order, individuals, domains, &facts)?;
    let mut violations = model.violations();
    if raw.constant_domain == Some(true) && !model.is_constant_domain() {
        violations.push(Violation::new(
            ConstantDomain,
            "model is flagged constant-domain but its domains differ",
        ));
    }
    if violations.is_empty() {
        Ok(model)
    } else {
        Err(violations)
    }
}
