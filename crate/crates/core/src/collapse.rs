//! Monotone collapse: over a constant-domain model, a formula built from
//! monotonic connectives has the same value at `w` as in the classical
//! model read off at `w`.

use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::classical::{eval_classical, ClassicalModel};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::kripke::{eval_all_worlds, KripkeModel};
use crate::model::{all_tuples, Assignment};
use crate::syntax::Formula;
use crate::truthfn::{standard, Connective};

/// The classical model `M_{K,w}`: the domain of `k` with every predicate
/// interpreted as at `w`.
pub fn project_world(k: &KripkeModel, w: usize) -> Result<ClassicalModel> {
    if !k.is_constant_domain() {
        return Err(Error::NotConstantDomain);
    }
    if w >= k.world_count() {
        return Err(Error::UnknownWorld(format!("#{w}")));
    }
    let mut m = ClassicalModel::new(k.individuals().to_vec())?;
    for (pred, arity) in k.predicates() {
        m.declare(&pred, arity)?;
        for t in all_tuples(k.individuals().len(), arity) {
            if k.holds(w, &pred, &t) {
                m.set(&pred, &t, true)?;
            }
        }
    }
    Ok(m)
}

/// The one-world constant-domain model with `m`'s domain and interpretation.
pub fn lift_classical(m: &ClassicalModel) -> KripkeModel {
    let mut facts = Vec::new();
    for (pred, rel) in m.relations() {
        for t in all_tuples(m.size(), rel.arity()) {
            let value = m.get(pred, &t);
            facts.push((0, pred.to_string(), t, value));
        }
    }
    KripkeModel::new(
        vec!["w0".to_string()],
        &[],
        m.individuals().to_vec(),
        vec![(0..m.size()).collect()],
        &facts,
    )
    .expect("a single world satisfies every model condition")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapsePair {
    pub world: String,
    pub formula: String,
    pub assignment: std::collections::BTreeMap<String, String>,
    pub kripke: bool,
    pub classical: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseReport {
    pub model_id: String,
    pub pairs: Vec<CollapsePair>,
    pub agreement: bool,
}

const REPORTED_DISAGREEMENTS: usize = 100;

impl CollapseReport {
    pub fn disagreements(&self) -> impl Iterator<Item = &CollapsePair> {
        self.pairs.iter().filter(|p| p.kripke != p.classical)
    }

    pub fn summary(&self) -> String {
        let bad = self.disagreements().count();
        format!(
            "model {}: {} checks, {} disagreement(s)",
            self.model_id,
            self.pairs.len(),
            bad
        )
    }
}

impl Serialize for CollapseReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            summary: String,
            model_id: &'a str,
            checks: usize,
            agreement: bool,
            disagreements: Vec<&'a CollapsePair>,
        }
        Doc {
            summary: self.summary(),
            model_id: &self.model_id,
            checks: self.pairs.len(),
            agreement: self.agreement,
            disagreements: self.disagreements().take(REPORTED_DISAGREEMENTS).collect(),
        }
        .serialize(s)
    }
}

/// Refuse formulas with a non-monotonic connective, naming its witness.
pub fn require_monotone<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Result<()> {
    for f in formulas {
        for (name, c) in f.connectives() {
            if let Some((a, b)) = c.monotonicity_witness() {
                return Err(Error::NonMonotone {
                    name,
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Compare Kripke and projected classical values for every world, formula
/// and assignment of the formula's free variables.
pub fn check_collapse(
    k: &KripkeModel,
    model_id: &str,
    formulas: &[Formula],
) -> Result<CollapseReport> {
    let domain: Vec<usize> = (0..k.individuals().len()).collect();
    check_collapse_with(k, model_id, formulas, |f| {
        let vars: Vec<String> = f.free_vars().into_iter().collect();
        Assignment::enumerate(&vars, &domain)
    })
}

/// [`check_collapse`] with caller-chosen assignments per formula.
pub fn check_collapse_with(
    k: &KripkeModel,
    model_id: &str,
    formulas: &[Formula],
    mut assignments: impl FnMut(&Formula) -> Vec<Assignment>,
) -> Result<CollapseReport> {
    if !k.is_constant_domain() {
        return Err(Error::NotConstantDomain);
    }
    require_monotone(formulas)?;
    let projections = (0..k.world_count())
        .map(|w| project_world(k, w))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for f in formulas {
        let text = f.to_string();
        for rho in assignments(f) {
            let values = eval_all_worlds(k, &rho, f)?;
            for (w, m) in projections.iter().enumerate() {
                let kripke = values[w].ok_or_else(|| Error::OutsideDomain {
                    var: rho.to_string(),
                    world: k.worlds()[w].clone(),
                })?;
                pairs.push(CollapsePair {
                    world: k.worlds()[w].clone(),
                    formula: text.clone(),
                    assignment: rho.to_named(k.individuals()),
                    kripke,
                    classical: eval_classical(m, &rho, f)?,
                });
            }
        }
    }
    let agreement = pairs.iter().all(|p| p.kripke == p.classical);
    Ok(CollapseReport {
        model_id: model_id.to_string(),
        pairs,
        agreement,
    })
}

/// Bounds for [`exhaustive_collapse`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveConfig {
    pub max_worlds: usize,
    pub max_domain: usize,
    pub depth: usize,
    /// Individual variables available to atoms and quantifiers.
    pub variables: Vec<String>,
    /// Formulas up to this depth are also enumerated one by one and run
    /// through the evaluators directly, on models with at most
    /// `literal_max_worlds` worlds.
    pub literal_depth: usize,
    pub literal_max_worlds: usize,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        ExhaustiveConfig {
            max_worlds: 3,
            max_domain: 2,
            depth: 3,
            variables: vec!["x".into(), "y".into()],
            literal_depth: 2,
            literal_max_worlds: 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExhaustiveReport {
    pub models: u64,
    /// Distinct (Kripke, classical) value profiles summed over models.
    pub classes: u64,
    /// Profiles whose representative formula was re-evaluated by the engine.
    pub representatives_checked: u64,
    pub literal_formulas: u64,
    pub literal_checks: u64,
    pub disagreements: u64,
    pub examples: Vec<String>,
}

impl ExhaustiveReport {
    pub fn passed(&self) -> bool {
        self.disagreements == 0
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.disagreements += 1;
        if self.examples.len() < REPORTED_DISAGREEMENTS {
            self.examples.push(msg());
        }
    }
}

/// How a profile was first reached, as indices into the profile list.
#[derive(Debug, Clone, Copy)]
enum Recipe {
    Atom(usize),
    And(usize, usize),
    Or(usize, usize),
    Forall(usize, usize),
    Exists(usize, usize),
}

/// Per-model value tables over points `(world, values of the variables)`,
/// point index `w * n^m + tuple index`.
struct Points<'a> {
    k: &'a KripkeModel,
    n: usize,
    m: usize,
    /// `n^m`
    slice: usize,
    slice_mask: u64,
}

impl Points<'_> {
    fn slices(&self, mask: u64) -> impl Iterator<Item = u64> + '_ {
        (0..self.k.world_count()).map(move |w| (mask >> (w * self.slice)) & self.slice_mask)
    }

    /// Points whose value holds at every later world.
    fn boxed(&self, mask: u64) -> u64 {
        let s: Vec<u64> = self.slices(mask).collect();
        let mut out = 0;
        for w in 0..s.len() {
            let mut acc = self.slice_mask;
            for v in self.k.successors(w) {
                acc &= s[v];
            }
            out |= acc << (w * self.slice);
        }
        out
    }

    fn digits(&self, r: usize) -> Vec<usize> {
        let mut d = vec![0; self.m];
        let mut r = r;
        for i in (0..self.m).rev() {
            d[i] = r % self.n;
            r /= self.n;
        }
        d
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    /// Within each world, points that hold for all (or some) values of
    /// variable `j`.
    fn quantify(&self, mask: u64, j: usize, universal: bool) -> u64 {
        let mut out = 0;
        for w in 0..self.k.world_count() {
            for r in 0..self.slice {
                let mut d = self.digits(r);
                let mut acc = universal;
                for b in 0..self.n {
                    d[j] = b;
                    let bit = mask >> (w * self.slice + self.index(&d)) & 1 == 1;
                    acc = if universal { acc && bit } else { acc || bit };
                }
                if acc {
                    out |= 1 << (w * self.slice + r);
                }
            }
        }
        out
    }

    /// Atom masks for `p`, `q` and `P(v)` per variable, identical for the
    /// Kripke and the projected classical reading.
    fn atoms(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for prop in ["p", "q"] {
            let mut m = 0;
            for w in 0..self.k.world_count() {
                if self.k.holds(w, prop, &[]) {
                    m |= self.slice_mask << (w * self.slice);
                }
            }
            out.push(m);
        }
        for j in 0..self.m {
            let mut m = 0;
            for w in 0..self.k.world_count() {
                for r in 0..self.slice {
                    if self.k.holds(w, "P", &[self.digits(r)[j]]) {
                        m |= 1 << (w * self.slice + r);
                    }
                }
            }
            out.push(m);
        }
        out
    }
}

/// Check the collapse over every constant-domain model within the bounds
/// interpreting one unary predicate `P` and propositions `p`, `q`, and every
/// formula over `{and, or}`, the quantifiers and the configured variables up
/// to the configured depth.
///
/// Formulas are grouped per model by their value profile: the pair of
/// (Kripke, classical) value tables over all worlds and assignments. Each
/// clause's value depends only on the profiles of its immediate
/// subformulas, so closing the atom profiles under the clauses `depth` times
/// reaches the profile of every formula of that depth. Every profile's first
/// formula is re-run through the evaluators as a cross-check, and small
/// formulas are additionally enumerated literally.
pub fn exhaustive_collapse(cfg: &ExhaustiveConfig) -> Result<ExhaustiveReport> {
    let preds = vec![
        ("P".to_string(), 1),
        ("p".to_string(), 0),
        ("q".to_string(), 0),
    ];
    let and = standard::and();
    let or = standard::or();
    let literal = literal_formulas(&and, &or, &cfg.variables, cfg.literal_depth);
    let mut report = ExhaustiveReport {
        literal_formulas: literal.len() as u64,
        ..Default::default()
    };
    let mut failure = None;
    let _: Option<()> =
        enumerate::for_each_cd_model(&preds, cfg.max_worlds, cfg.max_domain, u128::MAX, |k| {
            report.models += 1;
            let id = format!("#{}", report.models);
            if let Err(e) = collapse_profiles(k, &id, cfg, &and, &or, &mut report) {
                failure = Some(e);
                return ControlFlow::Break(());
            }
            if k.world_count() <= cfg.literal_max_worlds {
                if let Err(e) = collapse_literal(k, &id, &literal, &cfg.variables, &mut report) {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

fn collapse_profiles(
    k: &KripkeModel,
    id: &str,
    cfg: &ExhaustiveConfig,
    and: &Connective,
    or: &Connective,
    report: &mut ExhaustiveReport,
) -> Result<()> {
    let n = k.individuals().len();
    let m = cfg.variables.len();
    let slice = n.pow(m as u32);
    if k.world_count() * slice > 64 {
        return Err(Error::ModelTooLarge(format!(
            "{} worlds × {slice} assignments exceed 64 points",
            k.world_count()
        )));
    }
    let pts = Points {
        k,
        n,
        m,
        slice,
        slice_mask: if slice == 64 {
            u64::MAX
        } else {
            (1 << slice) - 1
        },
    };
    let mut profiles: Vec<(u64, u64, Recipe)> = Vec::new();
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut add = |kv: u64, cv: u64, r: Recipe, profiles: &mut Vec<(u64, u64, Recipe)>| {
        index.entry((kv, cv)).or_insert_with(|| {
            profiles.push((kv, cv, r));
            profiles.len() - 1
        });
    };
    for (i, a) in pts.atoms().into_iter().enumerate() {
        add(a, a, Recipe::Atom(i), &mut profiles);
    }
    for _ in 0..cfg.depth {
        let level = profiles.len();
        for i in 0..level {
            let (ki, ci, _) = profiles[i];
            for j in i..level {
                let (kj, cj, _) = profiles[j];
                add(
                    pts.boxed(ki & kj),
                    ci & cj,
                    Recipe::And(i, j),
                    &mut profiles,
                );
                add(pts.boxed(ki | kj), ci | cj, Recipe::Or(i, j), &mut profiles);
            }
            for v in 0..m {
                add(
                    pts.boxed(pts.quantify(ki, v, true)),
                    pts.quantify(ci, v, true),
                    Recipe::Forall(v, i),
                    &mut profiles,
                );
                add(
                    pts.quantify(ki, v, false),
                    pts.quantify(ci, v, false),
                    Recipe::Exists(v, i),
                    &mut profiles,
                );
            }
        }
    }
    report.classes += profiles.len() as u64;

    let projections = (0..k.world_count())
        .map(|w| project_world(k, w))
        .collect::<Result<Vec<_>>>()?;
    let assignments = Assignment::enumerate(&cfg.variables, &(0..n).collect::<Vec<_>>());
    let mut built: Vec<Option<Formula>> = vec![None; profiles.len()];
    for idx in 0..profiles.len() {
        let (kv, cv, _) = profiles[idx];
        if kv != cv {
            let f = build(idx, &profiles, &mut built, and, or, &cfg.variables);
            report.fail(|| format!("model {id}: profiles of `{f}` differ"));
        }
        let f = build(idx, &profiles, &mut built, and, or, &cfg.variables);
        for (r, rho) in assignments.iter().enumerate() {
            let values = eval_all_worlds(k, rho, &f)?;
            for (w, proj) in projections.iter().enumerate() {
                let bit = 1 << (w * pts.slice + r);
                let kripke = values[w] == Some(true);
                let classical = eval_classical(proj, rho, &f)?;
                if kripke != (kv & bit != 0) || classical != (cv & bit != 0) {
                    report.fail(|| {
                        format!("model {id}: engine disagrees with profile of `{f}` at w{w}")
                    });
                }
                if kripke != classical {
                    report.fail(|| {
                        format!("model {id}: `{f}` is {kripke} in Kripke and {classical} classically at w{w} under {rho}")
                    });
                }
            }
        }
        report.representatives_checked += 1;
    }
    Ok(())
}

fn build(
    idx: usize,
    profiles: &[(u64, u64, Recipe)],
    built: &mut Vec<Option<Formula>>,
    and: &Connective,
    or: &Connective,
    vars: &[String],
) -> Formula {
    if let Some(f) = &built[idx] {
        return f.clone();
    }
    let f = match profiles[idx].2 {
        Recipe::Atom(0) => Formula::prop("p"),
        Recipe::Atom(1) => Formula::prop("q"),
        Recipe::Atom(i) => Formula::atom("P", &[&vars[i - 2]]),
        Recipe::And(i, j) | Recipe::Or(i, j) => {
            let c = if matches!(profiles[idx].2, Recipe::And(..)) {
                and
            } else {
                or
            };
            let a = build(i, profiles, built, and, or, vars);
            let b = build(j, profiles, built, and, or, vars);
            Formula::conn(c, vec![a, b]).expect("binary")
        }
        Recipe::Forall(v, i) => Formula::forall(&vars[v], build(i, profiles, built, and, or, vars)),
        Recipe::Exists(v, i) => Formula::exists(&vars[v], build(i, profiles, built, and, or, vars)),
    };
    built[idx] = Some(f.clone());
    f
}

/// Every formula over `{and, or}`, the quantifiers, `p`, `q` and `P(v)` up
/// to the given depth.
pub fn literal_formulas(
    and: &Connective,
    or: &Connective,
    vars: &[String],
    depth: usize,
) -> Vec<Formula> {
    let mut all = vec![Formula::prop("p"), Formula::prop("q")];
    all.extend(vars.iter().map(|v| Formula::atom("P", &[v])));
    for _ in 0..depth {
        let prev = all.clone();
        for a in &prev {
            for b in &prev {
                for c in [and, or] {
                    all.push(Formula::conn(c, vec![a.clone(), b.clone()]).expect("binary"));
                }
            }
            for v in vars {
                all.push(Formula::forall(v, a.clone()));
                all.push(Formula::exists(v, a.clone()));
            }
        }
        all.sort();
        all.dedup();
    }
    all
}

fn collapse_literal(
    k: &KripkeModel,
    id: &str,
    formulas: &[Formula],
    vars: &[String],
    report: &mut ExhaustiveReport,
) -> Result<()> {
    let domain: Vec<usize> = (0..k.individuals().len()).collect();
    let assignments = Assignment::enumerate(vars, &domain);
    let projections = (0..k.world_count())
        .map(|w| project_world(k, w))
        .collect::<Result<Vec<_>>>()?;
    for f in formulas {
        for rho in &assignments {
            let values = eval_all_worlds(k, rho, f)?;
            for (w, proj) in projections.iter().enumerate() {
                let classical = eval_classical(proj, rho, f)?;
                report.literal_checks += 1;
                if values[w] != Some(classical) {
                    report.fail(|| format!("model {id}: `{f}` differs at w{w} under {rho}"));
                }
            }
        }
    }
    Ok(())
}
