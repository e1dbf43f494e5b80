//! Seeded random property suites: formula heredity on growing-domain
//! models, one-world lifting of classical countermodels, and agreement of
//! monotone formulas with their projections on constant-domain models.
//!
//! Every suite draws from its own ChaCha8 stream of the given seed, so a
//! report is a pure function of `(seed, trials, inject)`. A violation is
//! shrunk greedily before it is reported.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical::{decide_propositional, PropVerdict};
use crate::collapse::{check_collapse, lift_classical};
use crate::error::Result;
use crate::kripke::{heredity_counterexample, model_validity, Fact, KripkeModel, ModelVerdict};
use crate::model::{all_tuples, Assignment, RawKripkeModel};
use crate::syntax::{Formula, Sequent};
use crate::truthfn::{standard, Connective, Signature, TruthTable, TruthVector};

pub const DEFAULT_TRIALS: usize = 10_000;

const PREDICATES: &[(&str, usize)] = &[("p", 0), ("q", 0), ("P", 1), ("R", 2)];
const VARIABLES: &[&str] = &["x", "y", "z"];
const SYMBOLS: &[&str] = &["p", "q", "r"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    /// Corrupt the first heredity trial with a non-hereditary atom that
    /// bypasses validation. The suite must then report a violation.
    pub inject_non_hereditary: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: DEFAULT_TRIALS,
            seed: 0,
            inject_non_hereditary: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub signature: String,
    pub model: RawKripkeModel,
    /// Formula or sequent text.
    pub subject: String,
    pub assignment: BTreeMap<String, String>,
    pub detail: String,
    pub shrink_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    /// Elementary comparisons performed across all trials.
    pub checks: u64,
    /// Trials that exercised the property non-vacuously.
    pub effective: usize,
    pub violations: usize,
    pub counterexample: Option<Counterexample>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub trials: usize,
    pub inject_non_hereditary: bool,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

pub fn fuzz(cfg: &FuzzConfig) -> Result<FuzzReport> {
    let suites = vec![
        heredity_suite(cfg.trials, cfg.seed, cfg.inject_non_hereditary)?,
        lift_suite(cfg.trials, cfg.seed)?,
        collapse_suite(cfg.trials, cfg.seed)?,
    ];
    let passed = suites.iter().all(SuiteReport::passed);
    Ok(FuzzReport {
        seed: cfg.seed,
        trials: cfg.trials,
        inject_non_hereditary: cfg.inject_non_hereditary,
        suites,
        passed,
    })
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

// ---------------------------------------------------------------- generators

/// A random table of arity 0 to 3, named after its bits.
pub fn random_table<R: Rng>(rng: &mut R) -> Connective {
    let arity = rng.gen_range(0..=3);
    let bits: Vec<bool> = (0..1usize << arity).map(|_| rng.gen()).collect();
    let v = TruthVector::new(bits);
    let name = format!("c{arity}_{}", v.to_bit_string());
    Arc::new(TruthTable::new(name, arity, v).expect("arity within bounds"))
}

/// One to three connectives drawn from the standard tables and fresh random
/// tables, without duplicate names.
pub fn random_signature<R: Rng>(rng: &mut R) -> Signature {
    let mut pool = vec![
        standard::and(),
        standard::or(),
        standard::implies(),
        standard::nand(),
        standard::xor(),
        standard::not(),
    ];
    pool.push(random_table(rng));
    pool.push(random_table(rng));
    pool.shuffle(rng);
    let n = rng.gen_range(1..=3);
    let mut sig = Signature::new();
    for c in pool {
        if sig.len() == n {
            break;
        }
        let _ = sig.add(c);
    }
    sig
}

fn random_upset<R: Rng>(rng: &mut R, up: &[u64], density: f64) -> u64 {
    (0..up.len())
        .filter(|_| rng.gen_bool(density))
        .fold(0, |acc, g| acc | up[g])
}

fn random_preorder<R: Rng>(rng: &mut R, worlds: usize) -> Vec<u64> {
    let raw: Vec<u64> = (0..worlds)
        .map(|w| {
            (0..worlds)
                .filter(|&v| v != w && rng.gen_bool(0.3))
                .fold(0, |acc, v| acc | 1 << v)
        })
        .collect();
    crate::enumerate::closure(raw)
}

/// A random validated model over [`PREDICATES`]. Individual `a0` exists at
/// every world; with `constant` false the others appear on random up-sets.
pub fn random_model<R: Rng>(
    rng: &mut R,
    max_worlds: usize,
    max_individuals: usize,
    constant: bool,
) -> KripkeModel {
    let k = rng.gen_range(1..=max_worlds);
    let n = rng.gen_range(1..=max_individuals);
    let up = random_preorder(rng, k);
    let all = (1u64 << k) - 1;
    let present: Vec<u64> = (0..n)
        .map(|a| {
            if a == 0 || constant {
                return all;
            }
            loop {
                let m = random_upset(rng, &up, 0.4);
                if m != 0 {
                    break m;
                }
            }
        })
        .collect();
    let mut facts: Vec<Fact> = Vec::new();
    for &(pred, arity) in PREDICATES {
        for t in all_tuples(n, arity) {
            let defined = t.iter().fold(all, |acc, &a| acc & present[a]);
            let truth = random_upset(rng, &up, 0.35) & defined;
            for w in (0..k).filter(|&w| defined & (1 << w) != 0) {
                facts.push((w, pred.to_string(), t.clone(), truth & (1 << w) != 0));
            }
        }
    }
    build(&up, n, &present, &facts, true)
}

fn build(up: &[u64], n: usize, present: &[u64], facts: &[Fact], validate: bool) -> KripkeModel {
    let k = up.len();
    let worlds = (0..k).map(|w| format!("w{w}")).collect();
    let individuals = (0..n).map(|a| format!("a{a}")).collect();
    let order: Vec<(usize, usize)> = (0..k)
        .flat_map(|w| {
            (0..k)
                .filter(move |&v| up[w] & (1 << v) != 0)
                .map(move |v| (w, v))
        })
        .collect();
    let domains = (0..k)
        .map(|w| (0..n).filter(|&a| present[a] & (1 << w) != 0).collect())
        .collect();
    let made = if validate {
        KripkeModel::new(worlds, &order, individuals, domains, facts)
    } else {
        KripkeModel::new_unchecked(worlds, &order, individuals, domains, facts)
    };
    made.unwrap_or_else(|v| panic!("generated model is malformed: {v:?}"))
}

/// A formula of depth at most `depth` over `conns`, the predicates of
/// [`PREDICATES`] (or only `symbols` when `propositional`) and, unless
/// propositional, the quantifiers.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    conns: &[Connective],
    symbols: &[&str],
    propositional: bool,
    depth: usize,
) -> Formula {
    if depth == 0 || conns.is_empty() || rng.gen_bool(0.25) {
        if propositional {
            return Formula::prop(symbols.choose(rng).expect("symbols"));
        }
        let &(pred, arity) = PREDICATES.choose(rng).expect("predicates");
        let args: Vec<&str> = (0..arity)
            .map(|_| *VARIABLES.choose(rng).expect("vars"))
            .collect();
        return Formula::atom(pred, &args);
    }
    let roll = rng.gen_range(0..5);
    if !propositional && roll >= 3 {
        let x = VARIABLES.choose(rng).expect("vars");
        let body = random_formula(rng, conns, symbols, propositional, depth - 1);
        return if roll == 3 {
            Formula::forall(x, body)
        } else {
            Formula::exists(x, body)
        };
    }
    let c = conns.choose(rng).expect("connectives");
    let args = (0..c.arity())
        .map(|_| random_formula(rng, conns, symbols, propositional, depth - 1))
        .collect();
    Formula::conn(c, args).expect("arity matches")
}

fn random_assignment<R: Rng>(rng: &mut R, k: &KripkeModel, f: &Formula) -> Assignment {
    let w = rng.gen_range(0..k.world_count());
    let dom = k.domain(w);
    let mut rho = Assignment::empty();
    for x in f.free_vars() {
        rho.bind(&x, *dom.choose(rng).expect("domains are non-empty"));
    }
    rho
}

// ------------------------------------------------------------------ shrinking

/// Greedy shrinking: repeatedly move to the first candidate that still
/// fails, until none does. Returns the result and the number of moves.
pub fn shrink<T>(
    mut x: T,
    candidates: impl Fn(&T) -> Vec<T>,
    fails: impl Fn(&T) -> bool,
) -> (T, usize) {
    let mut steps = 0;
    'outer: loop {
        for c in candidates(&x) {
            if fails(&c) {
                x = c;
                steps += 1;
                continue 'outer;
            }
        }
        return (x, steps);
    }
}

/// Immediate subformulas, and the formula with one argument replaced by
/// one of that argument's immediate subformulas.
fn formula_shrinks(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    match f {
        Formula::Atom { .. } => {}
        Formula::Conn { conn, args } => {
            out.extend(args.iter().cloned());
            for (i, a) in args.iter().enumerate() {
                for smaller in formula_shrinks(a) {
                    let mut next = args.clone();
                    next[i] = smaller;
                    out.push(Formula::Conn {
                        conn: conn.clone(),
                        args: next,
                    });
                }
            }
        }
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            out.push((**body).clone());
            for smaller in formula_shrinks(body) {
                out.push(match f {
                    Formula::Forall(..) => Formula::forall(x, smaller),
                    _ => Formula::exists(x, smaller),
                });
            }
        }
    }
    out
}

/// The submodel generated by `w`: its up-set with everything restricted,
/// `w` becoming world 0. Values at worlds of the cone are unchanged since
/// every clause looks only upward.
pub fn cone(k: &KripkeModel, w: usize) -> KripkeModel {
    let keep: Vec<usize> = std::iter::once(w)
        .chain(k.successors(w).filter(|&v| v != w))
        .collect();
    let index = |v: usize| keep.iter().position(|&u| u == v).expect("kept world");
    let up: Vec<u64> = keep
        .iter()
        .map(|&u| k.successors(u).fold(0, |acc, v| acc | 1 << index(v)))
        .collect();
    let n = k.individuals().len();
    let present: Vec<u64> = (0..n)
        .map(|a| {
            keep.iter()
                .enumerate()
                .filter(|&(_, &u)| k.in_domain(u, a))
                .fold(0, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let mut facts = Vec::new();
    for (pred, arity) in k.predicates() {
        for t in all_tuples(n, arity) {
            for (i, &u) in keep.iter().enumerate() {
                if t.iter().all(|&a| k.in_domain(u, a)) {
                    facts.push((i, pred.clone(), t.clone(), k.holds(u, &pred, &t)));
                }
            }
        }
    }
    build(&up, n, &present, &facts, false)
}

// --------------------------------------------------------------------- suites

fn heredity_fails(k: &KripkeModel, f: &Formula, rho: &Assignment) -> Option<(usize, usize)> {
    heredity_counterexample(k, f, rho).ok().flatten()
}

/// Corrupt one atom instance so that it holds at a world and fails at a
/// later one. Returns `None` when the order has no strict pair.
fn inject<R: Rng>(rng: &mut R, k: &mut KripkeModel) -> Option<Formula> {
    let pairs: Vec<(usize, usize)> = (0..k.world_count())
        .flat_map(|w| {
            k.successors(w)
                .filter(move |&v| v != w)
                .map(move |v| (w, v))
        })
        .collect();
    let &(w, v) = pairs.choose(rng)?;
    let pred = ["p", "q"].choose(rng)?;
    k.set_atom_unchecked(w, pred, &[], true);
    k.set_atom_unchecked(v, pred, &[], false);
    Some(Formula::prop(pred))
}

/// For random mixed signatures (non-monotone connectives included), random
/// growing-domain models, formulas and assignments: `∥f∥_w ≤ ∥f∥_v` for
/// every `w ⪯ v` at which the assignment is defined.
pub fn heredity_suite(
    trials: usize,
    seed: u64,
    inject_non_hereditary: bool,
) -> Result<SuiteReport> {
    let mut rng = stream(seed, 1);
    let mut report = SuiteReport {
        name: "heredity",
        trials,
        checks: 0,
        effective: 0,
        violations: 0,
        counterexample: None,
    };
    for trial in 0..trials {
        let sig = random_signature(&mut rng);
        let conns: Vec<Connective> = sig.connectives().cloned().collect();
        let mut k = random_model(&mut rng, 4, 3, false);
        let mut f = random_formula(&mut rng, &conns, SYMBOLS, false, 4);
        if inject_non_hereditary && trial == 0 {
            while k.world_count() < 2 || !(0..k.world_count()).any(|w| k.successors(w).count() > 1)
            {
                k = random_model(&mut rng, 4, 3, false);
            }
            f = inject(&mut rng, &mut k).expect("model has a strict pair");
        }
        let rho = random_assignment(&mut rng, &k, &f);
        report.checks += (0..k.world_count())
            .map(|w| k.successors(w).count() as u64)
            .sum::<u64>();
        report.effective += 1;
        if heredity_fails(&k, &f, &rho).is_none() {
            continue;
        }
        report.violations += 1;
        if report.counterexample.is_some() {
            continue;
        }
        let ((k, f, rho), steps) = shrink(
            (k, f, rho),
            |(k, f, rho)| {
                let mut out = Vec::new();
                for g in formula_shrinks(f) {
                    let mut r = Assignment::empty();
                    for x in g.free_vars() {
                        r.bind(&x, rho.get(&x).unwrap_or(0));
                    }
                    out.push((k.clone(), g, r));
                }
                if let Some((w, _)) = heredity_fails(k, f, rho) {
                    if k.successors(w).count() < k.world_count() {
                        out.push((cone(k, w), f.clone(), rho.clone()));
                    }
                }
                out
            },
            |(k, f, rho)| heredity_fails(k, f, rho).is_some(),
        );
        let (w, v) = heredity_fails(&k, &f, &rho).expect("shrinking preserves failure");
        report.counterexample = Some(Counterexample {
            trial,
            signature: sig.to_text(),
            subject: f.to_string(),
            assignment: rho.to_named(k.individuals()),
            detail: format!(
                "holds at {} but fails at {} although {0} ⪯ {1}",
                k.worlds()[w],
                k.worlds()[v]
            ),
            model: k.to_raw(),
            shrink_steps: steps,
        });
    }
    Ok(report)
}

fn random_sequent<R: Rng>(rng: &mut R, conns: &[Connective]) -> Sequent {
    loop {
        let left = rng.gen_range(0..=2);
        let right = rng.gen_range(0..=2);
        if left + right == 0 {
            continue;
        }
        let mut side = |n: usize| -> Vec<Formula> {
            (0..n)
                .map(|_| random_formula(rng, conns, SYMBOLS, true, 3))
                .collect()
        };
        let ante = side(left);
        let succ = side(right);
        return Sequent::new(ante, succ);
    }
}

/// `Some(detail)` when `s` has a classical countermodel whose lift does not
/// refute it.
fn lift_fails(s: &Sequent) -> Option<String> {
    let PropVerdict::Countermodel(m) = decide_propositional(s).ok()? else {
        return None;
    };
    match model_validity(&lift_classical(&m), s) {
        Ok(ModelVerdict::Failure { world: 0, .. }) => None,
        Ok(v) => Some(format!("lifted countermodel gives {v:?}")),
        Err(e) => Some(format!("lifted countermodel could not be evaluated: {e}")),
    }
}

fn sequent_shrinks(s: &Sequent) -> Vec<Sequent> {
    let mut out = Vec::new();
    for (side, f) in s
        .antecedent
        .iter()
        .map(|f| (0, f))
        .chain(s.succedent.iter().map(|f| (1, f)))
    {
        let mut without = s.clone();
        match side {
            0 => without.antecedent.remove(f),
            _ => without.succedent.remove(f),
        };
        out.push(without.clone());
        for g in formula_shrinks(f) {
            let mut next = without.clone();
            match side {
                0 => next.antecedent.insert(g),
                _ => next.succedent.insert(g),
            };
            out.push(next);
        }
    }
    out
}

/// For random propositional sequents over mixed signatures: whenever a
/// classical countermodel exists, its one-world lift refutes the sequent.
pub fn lift_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = stream(seed, 2);
    let mut report = SuiteReport {
        name: "lift",
        trials,
        checks: 0,
        effective: 0,
        violations: 0,
        counterexample: None,
    };
    for trial in 0..trials {
        let sig = random_signature(&mut rng);
        let conns: Vec<Connective> = sig.connectives().cloned().collect();
        let s = random_sequent(&mut rng, &conns);
        let m = match decide_propositional(&s)? {
            PropVerdict::Countermodel(m) => m,
            PropVerdict::Valid { .. } => continue,
        };
        report.effective += 1;
        report.checks += 1;
        if lift_fails(&s).is_none() {
            continue;
        }
        report.violations += 1;
        if report.counterexample.is_some() {
            continue;
        }
        let (s, steps) = shrink(s, sequent_shrinks, |s| lift_fails(s).is_some());
        let m = match decide_propositional(&s)? {
            PropVerdict::Countermodel(small) => small,
            PropVerdict::Valid { .. } => m,
        };
        report.counterexample = Some(Counterexample {
            trial,
            signature: sig.to_text(),
            model: lift_classical(&m).to_raw(),
            subject: s.to_string(),
            assignment: BTreeMap::new(),
            detail: lift_fails(&s).unwrap_or_default(),
            shrink_steps: steps,
        });
    }
    Ok(report)
}

fn collapse_fails(k: &KripkeModel, f: &Formula) -> Option<String> {
    let report = check_collapse(k, "random", std::slice::from_ref(f)).ok()?;
    let bad = report.disagreements().next()?;
    Some(format!(
        "at {} under {:?}: Kripke {} but classical {}",
        bad.world, bad.assignment, bad.kripke as u8, bad.classical as u8
    ))
}

/// For random constant-domain models and random formulas over `{∧, ∨}`
/// with quantifiers: the Kripke value at each world equals the classical
/// value in that world's projection, under every assignment.
pub fn collapse_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = stream(seed, 3);
    let conns = [standard::and(), standard::or()];
    let sig = Signature::from_tables(conns.iter().cloned())?;
    let mut report = SuiteReport {
        name: "collapse",
        trials,
        checks: 0,
        effective: 0,
        violations: 0,
        counterexample: None,
    };
    for trial in 0..trials {
        let k = random_model(&mut rng, 4, 2, true);
        let f = random_formula(&mut rng, &conns, SYMBOLS, false, 4);
        let checked = check_collapse(&k, "random", std::slice::from_ref(&f))?;
        report.effective += 1;
        report.checks += checked.pairs.len() as u64;
        if checked.agreement {
            continue;
        }
        report.violations += 1;
        if report.counterexample.is_some() {
            continue;
        }
        let ((k, f), steps) = shrink(
            (k, f),
            |(k, f)| {
                formula_shrinks(f)
                    .into_iter()
                    .map(|g| (k.clone(), g))
                    .collect()
            },
            |(k, f)| collapse_fails(k, f).is_some(),
        );
        report.counterexample = Some(Counterexample {
            trial,
            signature: sig.to_text(),
            subject: f.to_string(),
            assignment: BTreeMap::new(),
            detail: collapse_fails(&k, &f).unwrap_or_default(),
            model: k.to_raw(),
            shrink_steps: steps,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_runs() {
        let r = fuzz(&FuzzConfig {
            trials: 300,
            seed: 7,
            inject_non_hereditary: false,
        })
        .unwrap();
        assert!(r.passed, "{r:#?}");
        assert!(r.suites.iter().all(|s| s.effective > 0));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = FuzzConfig {
            trials: 100,
            seed: 42,
            inject_non_hereditary: true,
        };
        let a = serde_json::to_string(&fuzz(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&fuzz(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn injected_model_is_caught_and_shrunk() {
        let r = heredity_suite(20, 3, true).unwrap();
        assert!(r.violations >= 1);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.trial, 0);
        assert!(cx.subject == "p" || cx.subject == "q", "{}", cx.subject);
        assert!(cx.model.worlds.len() >= 2);
    }

    #[test]
    fn generated_growing_models_validate() {
        let mut rng = stream(9, 0);
        let mut growing = 0;
        for _ in 0..200 {
            let k = random_model(&mut rng, 4, 3, false);
            assert!(k.violations().is_empty());
            growing += !k.is_constant_domain() as usize;
        }
        assert!(growing > 20);
    }

    #[test]
    fn cone_preserves_values() {
        let mut rng = stream(11, 0);
        let sig = random_signature(&mut rng);
        let conns: Vec<Connective> = sig.connectives().cloned().collect();
        for _ in 0..100 {
            let k = random_model(&mut rng, 4, 2, false);
            let f = random_formula(&mut rng, &conns, SYMBOLS, false, 3);
            let w = rng.gen_range(0..k.world_count());
            let c = cone(&k, w);
            let dom = k.domain(w);
            let mut rho = Assignment::empty();
            for x in f.free_vars() {
                rho.bind(&x, dom[0]);
            }
            let here = crate::kripke::eval_kripke(&k, w, &rho, &f).unwrap();
            assert_eq!(
                crate::kripke::eval_kripke(&c, 0, &rho, &f).unwrap(),
                here,
                "{f}"
            );
        }
    }

    #[test]
    fn shrink_reaches_a_local_minimum() {
        let (x, steps) = shrink(100u32, |&n| vec![n / 2, n.saturating_sub(1)], |&n| n >= 13);
        assert_eq!((x, steps > 0), (13, true));
    }
}
