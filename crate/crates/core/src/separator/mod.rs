//! Separating sequents for non-monotonic connectives: a propositional
//! sequent that is classically valid but refuted in a two-world
//! constant-domain model, built by cases on `(t(0̄), t(1̄))`.

mod render;
pub mod schema;

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

pub use render::{display_name, render_human};

use crate::classical::{decide_propositional, eval_classical, ClassicalModel, PropVerdict};
use crate::error::{Error, Result};
use crate::kripke::{
    eval_kripke, eval_sequent_kripke, model_validity, validate_kripke_model, KripkeModel,
    ModelVerdict,
};
use crate::model::Assignment;
use crate::syntax::{Formula, Sequent};
use crate::truthfn::{Case, Connective, Signature, TruthVector};

/// Symbols a separating sequent may use.
pub const SYMBOLS: [&str; 4] = ["p", "q", "r", "s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcase {
    One,
    Two,
    None,
}

impl Serialize for Subcase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Subcase::One => s.serialize_u8(1),
            Subcase::Two => s.serialize_u8(2),
            Subcase::None => s.serialize_none(),
        }
    }
}

/// The vectors a construction is indexed by. Case (a) has no `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnesses {
    pub a: TruthVector,
    pub b: Option<TruthVector>,
}

impl Witnesses {
    /// Named vectors in the order used to label argument tuples.
    pub fn named(&self) -> Vec<(&'static str, TruthVector)> {
        let n = self.a.len();
        let mut out = vec![("a", self.a.clone())];
        if let Some(b) = &self.b {
            out.push(("b", b.clone()));
            if let Ok(rel) = TruthVector::relative_invert(&self.a, b) {
                out.push(("b̄^a", rel));
            }
        }
        out.push(("1̄", TruthVector::ones(n)));
        out.push(("0̄", TruthVector::zeros(n)));
        out.push(("ā", self.a.invert()));
        out
    }

    pub fn label(&self, v: &TruthVector) -> Option<&'static str> {
        self.named()
            .into_iter()
            .find(|(_, x)| x == v)
            .map(|(l, _)| l)
    }

    pub fn vector(&self, label: &str) -> Option<TruthVector> {
        self.named()
            .into_iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub formula: String,
    pub args: TruthVector,
    pub label: Option<&'static str>,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Point {
    Valuation(BTreeMap<String, bool>),
    World(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub point: Point,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Classical,
    Kripke,
}

/// Argument tuples and values of the layered formulas, per valuation
/// (classical) or per world of the countermodel, highest world first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueTable {
    pub kind: TableKind,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub name: String,
    pub formula: Formula,
    pub world: usize,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassicalRecord {
    pub passed: bool,
    pub symbols: Vec<String>,
    pub rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<crate::model::RawClassicalModel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub passed: bool,
    pub stated_world: String,
    pub found_world: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub classical_valid: ClassicalRecord,
    pub cd_fails: FailureRecord,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationResult {
    pub connective: Connective,
    pub case: Case,
    pub subcase: Subcase,
    pub witnesses: Witnesses,
    /// Named intermediate formulas in construction order.
    pub auxiliary: Vec<(String, Formula)>,
    pub sequent: Sequent,
    pub model_name: String,
    pub countermodel: KripkeModel,
    pub failing_world: usize,
    pub tables: Vec<ValueTable>,
    pub claims: Vec<Claim>,
    pub notes: Vec<String>,
    pub verification: VerificationReport,
}

impl SeparationResult {
    pub fn aux(&self, name: &str) -> Option<&Formula> {
        self.auxiliary
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
    }

    pub fn table(&self, kind: TableKind) -> Option<&ValueTable> {
        self.tables.iter().find(|t| t.kind == kind)
    }
}

impl Serialize for SeparationResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ConnectiveDoc<'a> {
            name: &'a str,
            arity: usize,
            table: String,
        }
        #[derive(Serialize)]
        struct NamedFormula<'a> {
            name: &'a str,
            formula: String,
        }
        #[derive(Serialize)]
        struct ClaimDoc<'a> {
            formula: &'a str,
            world: &'a str,
            value: u8,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            connective: ConnectiveDoc<'a>,
            case: char,
            subcase: Subcase,
            witnesses: BTreeMap<&'static str, String>,
            auxiliary: Vec<NamedFormula<'a>>,
            sequent: String,
            model_name: &'a str,
            countermodel: crate::model::RawKripkeModel,
            failing_world: &'a str,
            tables: &'a [ValueTable],
            claims: Vec<ClaimDoc<'a>>,
            #[serde(skip_serializing_if = "<[String]>::is_empty")]
            notes: &'a [String],
            verification: &'a VerificationReport,
        }
        let worlds = self.countermodel.worlds();
        Doc {
            connective: ConnectiveDoc {
                name: self.connective.name(),
                arity: self.connective.arity(),
                table: self.connective.outputs().to_bit_string(),
            },
            case: self.case.label(),
            subcase: self.subcase,
            witnesses: self
                .witnesses
                .named()
                .into_iter()
                .filter(|(l, _)| !matches!(*l, "1̄" | "0̄"))
                .map(|(l, v)| (l, v.to_bit_string()))
                .collect(),
            auxiliary: self
                .auxiliary
                .iter()
                .map(|(n, f)| NamedFormula {
                    name: n,
                    formula: f.to_string(),
                })
                .collect(),
            sequent: self.sequent.to_string(),
            model_name: &self.model_name,
            countermodel: self.countermodel.to_raw(),
            failing_world: &worlds[self.failing_world],
            tables: &self.tables,
            claims: self
                .claims
                .iter()
                .map(|c| ClaimDoc {
                    formula: &c.name,
                    world: &worlds[c.world],
                    value: c.value as u8,
                })
                .collect(),
            notes: &self.notes,
            verification: &self.verification,
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separation {
    AllMonotone,
    Separated(Box<SeparationResult>),
}

/// `¬_c f = c(f, ..., f)`.
pub fn build_negation(c: &Connective, f: &Formula) -> Result<Formula> {
    if c.arity() == 0 {
        return Err(Error::NullaryConnective(c.name().to_string()));
    }
    Formula::conn(c, vec![f.clone(); c.arity()])
}

/// `τ = c(s, ..., s)`, true at every world when `t(0̄) = t(1̄) = 1`.
pub fn build_tau(c: &Connective) -> Result<Formula> {
    expect_case(c, Case::D)?;
    build_negation(c, &Formula::prop("s"))
}

fn expect_case(c: &Connective, expected: Case) -> Result<()> {
    if c.arity() == 0 {
        return Err(Error::NullaryConnective(c.name().to_string()));
    }
    let found = c.classify_case();
    if found != expected {
        return Err(Error::WrongCase {
            name: c.name().to_string(),
            expected: expected.label(),
            found: found.label(),
        });
    }
    Ok(())
}

fn witness_pair(c: &Connective) -> Result<(TruthVector, TruthVector)> {
    c.monotonicity_witness().ok_or_else(|| Error::Verification {
        connective: c.name().to_string(),
        detail: "connective is monotonic".into(),
    })
}

/// Two-world chain `w0 ⪯ w1` over the single individual `a1`.
pub fn chain_model(values: &[(&str, [bool; 2])]) -> KripkeModel {
    let mut facts = Vec::new();
    for (sym, vals) in values {
        for (w, &v) in vals.iter().enumerate() {
            facts.push((w, sym.to_string(), vec![], v));
        }
    }
    KripkeModel::new(
        vec!["w0".into(), "w1".into()],
        &[(0, 1)],
        vec!["a1".into()],
        vec![vec![0], vec![0]],
        &facts,
    )
    .expect("chain model values must be hereditary")
}

const P_RISES: (&str, [bool; 2]) = ("p", [false, true]);
const Q_FALSE: (&str, [bool; 2]) = ("q", [false, false]);
const R_TRUE: (&str, [bool; 2]) = ("r", [true, true]);
const S_FALSE: (&str, [bool; 2]) = ("s", [false, false]);

/// `K*`: `p` false then true, `q` false at both worlds.
pub fn k_star() -> KripkeModel {
    chain_model(&[P_RISES, Q_FALSE])
}

/// `K+`: `K*` with `r` true at both worlds.
pub fn k_plus() -> KripkeModel {
    chain_model(&[P_RISES, Q_FALSE, R_TRUE])
}

struct Draft {
    connective: Connective,
    case: Case,
    subcase: Subcase,
    witnesses: Witnesses,
    auxiliary: Vec<(String, Formula)>,
    /// Auxiliary names shown as table columns.
    columns: Vec<String>,
    sequent: Sequent,
    model_name: &'static str,
    countermodel: KripkeModel,
    claims: Vec<(String, usize, bool)>,
    notes: Vec<String>,
}

impl Draft {
    fn finish(self) -> Result<SeparationResult> {
        let r = self.assemble()?;
        if !r.verification.passed {
            let detail: Vec<String> = r
                .verification
                .failures()
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            return Err(Error::Verification {
                connective: r.connective.name().to_string(),
                detail: detail.join("; "),
            });
        }
        Ok(r)
    }

    fn assemble(self) -> Result<SeparationResult> {
        let lookup = |name: &str| -> Formula {
            self.auxiliary
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, f)| f.clone())
                .unwrap_or_else(|| Formula::prop(name))
        };
        let layered: Vec<(String, Formula)> = self
            .columns
            .iter()
            .map(|n| (n.clone(), lookup(n)))
            .collect();
        let tables = vec![
            classical_table(&layered, &self.witnesses)?,
            kripke_table(&layered, &self.countermodel, &self.witnesses)?,
        ];
        let claims = self
            .claims
            .iter()
            .map(|(name, world, value)| Claim {
                name: name.clone(),
                formula: lookup(name),
                world: *world,
                value: *value,
            })
            .collect();
        let mut r = SeparationResult {
            connective: self.connective,
            case: self.case,
            subcase: self.subcase,
            witnesses: self.witnesses,
            auxiliary: self.auxiliary,
            sequent: self.sequent,
            model_name: self.model_name.to_string(),
            countermodel: self.countermodel,
            failing_world: 0,
            tables,
            claims,
            notes: self.notes,
            verification: VerificationReport {
                classical_valid: ClassicalRecord {
                    passed: false,
                    symbols: vec![],
                    rows: 0,
                    countermodel: None,
                },
                cd_fails: FailureRecord {
                    passed: false,
                    stated_world: String::new(),
                    found_world: None,
                },
                checks: vec![],
                passed: false,
            },
        };
        r.verification = verify_separation(&r);
        Ok(r)
    }
}

fn named(layers: Vec<(&'static str, Formula)>) -> Vec<(String, Formula)> {
    layers
        .into_iter()
        .map(|(n, f)| (n.to_string(), f))
        .collect()
}

/// Case (d): `t(0̄) = t(1̄) = 1`. The sequent is `⇒ φ^P` or `⇒ φ^Q`
/// depending on `t(b̄^a)`, refuted at `w0` of `K*`.
pub fn build_case_d(c: &Connective) -> Result<SeparationResult> {
    expect_case(c, Case::D)?;
    let (a, b) = witness_pair(c)?;
    let rel = TruthVector::relative_invert(&a, &b)?;
    let tau = build_tau(c)?;
    let (subcase, layers, phi) = if c.eval(&rel)? {
        (Subcase::One, schema::CASE_D_P, "phi_P")
    } else {
        (Subcase::Two, schema::CASE_D_Q, "phi_Q")
    };
    let built = named(schema::instantiate(c, layers, &a, Some(&b), Some(&tau))?);
    let columns = built.iter().map(|(n, _)| n.clone()).collect();
    let target = built.last().expect("three layers").1.clone();
    let mut auxiliary = vec![("tau".to_string(), tau)];
    auxiliary.extend(built);
    Draft {
        connective: c.clone(),
        case: Case::D,
        subcase,
        witnesses: Witnesses { a, b: Some(b) },
        auxiliary,
        columns,
        sequent: Sequent::new([], [target]),
        model_name: "K*",
        countermodel: chain_model(&[P_RISES, Q_FALSE, S_FALSE]),
        claims: vec![(phi.to_string(), 0, false)],
        notes: vec![],
    }
    .finish()
}

/// Case (c): `t(0̄) = 1`, `t(1̄) = 0`. The sequent is `¬_c¬_c p ⇒ p`.
pub fn build_case_c(c: &Connective) -> Result<SeparationResult> {
    expect_case(c, Case::C)?;
    let (a, b) = witness_pair(c)?;
    let neg = build_negation(c, &Formula::prop("p"))?;
    let neg_neg = build_negation(c, &neg)?;
    Draft {
        connective: c.clone(),
        case: Case::C,
        subcase: Subcase::None,
        witnesses: Witnesses { a, b: Some(b) },
        auxiliary: vec![
            ("neg_p".to_string(), neg),
            ("neg_neg_p".to_string(), neg_neg.clone()),
        ],
        columns: vec!["neg_p".into(), "neg_neg_p".into()],
        sequent: Sequent::new([neg_neg], [Formula::prop("p")]),
        model_name: "2-chain",
        countermodel: chain_model(&[P_RISES]),
        claims: vec![("neg_neg_p".into(), 0, true), ("p".into(), 0, false)],
        notes: vec![],
    }
    .finish()
}

/// Case (b): `t(0̄) = 0`, `t(1̄) = 1`, refuted at `w0` of `K+`. Subcase 1
/// (`t(ā) = 1`) gives `φ ⇒ χ`; subcase 2 gives `ψ ⇒ φ^PP` or `ψ ⇒ φ^QQ`,
/// the case (d) formulas with `τ` replaced by `r`.
pub fn build_case_b(c: &Connective) -> Result<SeparationResult> {
    expect_case(c, Case::B)?;
    let (a, b) = witness_pair(c)?;
    let witnesses = Witnesses {
        a: a.clone(),
        b: Some(b.clone()),
    };
    if c.eval(&a.invert())? {
        let built = named(schema::instantiate(
            c,
            schema::CASE_B_1,
            &a,
            Some(&b),
            None,
        )?);
        let columns = built.iter().map(|(n, _)| n.clone()).collect();
        let chi = built[0].1.clone();
        let phi = built[2].1.clone();
        return Draft {
            connective: c.clone(),
            case: Case::B,
            subcase: Subcase::One,
            witnesses,
            auxiliary: built,
            columns,
            sequent: Sequent::new([phi], [chi]),
            model_name: "K+",
            countermodel: k_plus(),
            claims: vec![("phi".into(), 0, true), ("chi".into(), 0, false)],
            notes: vec![],
        }
        .finish();
    }

    let psi = schema::instantiate(c, &[schema::PSI_B2], &a, None, None)?
        .remove(0)
        .1;
    let tau = build_negation(c, &Formula::prop("s"))?;
    let r = Formula::prop("r");
    let candidate = |layers: &[schema::Layer], suffix: &str| -> Result<Draft> {
        let built = schema::instantiate(c, layers, &a, Some(&b), Some(&tau))?;
        let mut auxiliary = vec![("psi".to_string(), psi.clone())];
        let mut columns = vec!["psi".to_string()];
        for (name, f) in built {
            let base = name.split('_').next().unwrap_or(name);
            let name = format!("{base}_{suffix}");
            columns.push(name.clone());
            auxiliary.push((name, f.substitute(&tau, &r)));
        }
        let phi = auxiliary.last().expect("layers").1.clone();
        Ok(Draft {
            connective: c.clone(),
            case: Case::B,
            subcase: Subcase::Two,
            witnesses: witnesses.clone(),
            auxiliary,
            columns,
            sequent: Sequent::new([psi.clone()], [phi]),
            model_name: "K+",
            countermodel: k_plus(),
            claims: vec![("psi".into(), 0, true), (format!("phi_{suffix}"), 0, false)],
            notes: vec![],
        })
    };
    let pp = candidate(schema::CASE_D_P, "PP")?.assemble()?;
    let qq = candidate(schema::CASE_D_Q, "QQ")?.assemble()?;
    let prefer_pp = c.eval(&TruthVector::relative_invert(&a, &b)?)?;
    let (mut chosen, other) = if prefer_pp { (pp, qq) } else { (qq, pp) };
    let label = |r: &SeparationResult| {
        r.auxiliary
            .last()
            .map(|(n, _)| display_name(n))
            .unwrap_or_default()
    };
    if !chosen.verification.passed {
        if !other.verification.passed {
            return Err(Error::Verification {
                connective: c.name().to_string(),
                detail: "neither φ^PP nor φ^QQ separates".into(),
            });
        }
        let note = format!(
            "{} selected by t(b̄^a) failed verification; {} used instead",
            label(&chosen),
            label(&other)
        );
        chosen = other;
        chosen.notes.push(note);
    } else {
        let verdict = if other.verification.passed {
            "also verifies"
        } else {
            "does not verify"
        };
        let note = format!(
            "{} selected by t(b̄^a); {} {verdict}",
            label(&chosen),
            label(&other)
        );
        chosen.notes.push(note);
    }
    Ok(chosen)
}

/// Case (a): `t(0̄) = t(1̄) = 0`. With `a` the least vector where `t` is 1,
/// the sequent `φ ⇒ p` is refuted at `w0` of `K+`.
pub fn build_case_a(c: &Connective) -> Result<SeparationResult> {
    expect_case(c, Case::A)?;
    let a = (0..c.rows())
        .find(|&row| c.eval_row(row))
        .map(|row| TruthVector::from_row(row, c.arity()))
        .ok_or_else(|| Error::Verification {
            connective: c.name().to_string(),
            detail: "constant-false connective is monotonic".into(),
        })?;
    let built = named(schema::instantiate(c, schema::CASE_A, &a, None, None)?);
    let columns = built.iter().map(|(n, _)| n.clone()).collect();
    let phi = built[1].1.clone();
    Draft {
        connective: c.clone(),
        case: Case::A,
        subcase: Subcase::None,
        witnesses: Witnesses { a, b: None },
        auxiliary: built,
        columns,
        sequent: Sequent::new([phi], [Formula::prop("p")]),
        model_name: "K+",
        countermodel: k_plus(),
        claims: vec![("phi".into(), 0, true), ("p".into(), 0, false)],
        notes: vec![],
    }
    .finish()
}

/// Separate using the first non-monotonic connective in name order.
pub fn separate(sig: &Signature) -> Result<Separation> {
    let Some(c) = sig.connectives().find(|c| !c.is_monotonic()) else {
        return Ok(Separation::AllMonotone);
    };
    separate_connective(c).map(|r| Separation::Separated(Box::new(r)))
}

/// Dispatch a single non-monotonic connective to its case.
pub fn separate_connective(c: &Connective) -> Result<SeparationResult> {
    match c.classify_case() {
        Case::A => build_case_a(c),
        Case::B => build_case_b(c),
        Case::C => build_case_c(c),
        Case::D => build_case_d(c),
    }
}

fn layer_args(f: &Formula) -> &[Formula] {
    match f {
        Formula::Conn { args, .. } => args,
        _ => &[],
    }
}

fn cell(name: &str, args: Vec<bool>, value: bool, w: &Witnesses) -> Cell {
    let args = TruthVector::new(args);
    Cell {
        formula: name.to_string(),
        label: w.label(&args),
        args,
        value,
    }
}

fn symbols_of(layered: &[(String, Formula)]) -> Vec<String> {
    let mut out: Vec<String> = layered
        .iter()
        .flat_map(|(_, f)| f.predicates().into_keys())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn classical_table(layered: &[(String, Formula)], w: &Witnesses) -> Result<ValueTable> {
    let symbols = symbols_of(layered);
    let k = symbols.len();
    let rho = Assignment::empty();
    let mut rows = Vec::new();
    for code in 0u64..1 << k {
        let mut m = ClassicalModel::with_size(1)?;
        let mut valuation = BTreeMap::new();
        for (j, sym) in symbols.iter().enumerate() {
            let v = (code >> (k - 1 - j)) & 1 == 1;
            m.declare(sym, 0)?;
            m.set(sym, &[], v)?;
            valuation.insert(sym.clone(), v);
        }
        let mut cells = Vec::new();
        for (name, f) in layered {
            let args = layer_args(f)
                .iter()
                .map(|g| eval_classical(&m, &rho, g))
                .collect::<Result<Vec<_>>>()?;
            cells.push(cell(name, args, eval_classical(&m, &rho, f)?, w));
        }
        rows.push(TableRow {
            point: Point::Valuation(valuation),
            cells,
        });
    }
    Ok(ValueTable {
        kind: TableKind::Classical,
        columns: layered.iter().map(|(n, _)| n.clone()).collect(),
        rows,
    })
}

fn kripke_table(
    layered: &[(String, Formula)],
    k: &KripkeModel,
    w: &Witnesses,
) -> Result<ValueTable> {
    let rho = Assignment::empty();
    let mut rows = Vec::new();
    for world in (0..k.world_count()).rev() {
        let mut cells = Vec::new();
        for (name, f) in layered {
            let args = layer_args(f)
                .iter()
                .map(|g| eval_kripke(k, world, &rho, g))
                .collect::<Result<Vec<_>>>()?;
            cells.push(cell(name, args, eval_kripke(k, world, &rho, f)?, w));
        }
        rows.push(TableRow {
            point: Point::World(k.worlds()[world].clone()),
            cells,
        });
    }
    Ok(ValueTable {
        kind: TableKind::Kripke,
        columns: layered.iter().map(|(n, _)| n.clone()).collect(),
        rows,
    })
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: if passed { String::new() } else { detail.into() },
    }
}

/// Re-check a result from scratch: classical validity by truth tables,
/// refutation at the stated world, the model conditions, the symbol and
/// quantifier restrictions, every embedded table cell and every claim.
pub fn verify_separation(r: &SeparationResult) -> VerificationReport {
    let mut checks = Vec::new();
    let stated = r
        .countermodel
        .worlds()
        .get(r.failing_world)
        .cloned()
        .unwrap_or_else(|| format!("#{}", r.failing_world));

    let mut classical_error = None;
    let classical_valid = match decide_propositional(&r.sequent) {
        Ok(PropVerdict::Valid { symbols, rows }) => ClassicalRecord {
            passed: true,
            symbols,
            rows,
            countermodel: None,
        },
        Ok(PropVerdict::Countermodel(m)) => ClassicalRecord {
            passed: false,
            symbols: vec![],
            rows: 0,
            countermodel: Some(m.to_raw()),
        },
        Err(e) => {
            classical_error = Some(e.to_string());
            ClassicalRecord {
                passed: false,
                symbols: vec![],
                rows: 0,
                countermodel: None,
            }
        }
    };
    checks.push(check(
        "classical validity",
        classical_valid.passed,
        classical_error.unwrap_or_else(|| "decide_propositional found a countermodel".into()),
    ));

    let found = model_validity(&r.countermodel, &r.sequent);
    let at_stated = eval_sequent_kripke(
        &r.countermodel,
        r.failing_world,
        &Assignment::empty(),
        &r.sequent,
    );
    let found_world = match &found {
        Ok(ModelVerdict::Failure { world, .. }) => r.countermodel.worlds().get(*world).cloned(),
        _ => None,
    };
    let cd_passed =
        matches!(at_stated, Ok(false)) && found_world.as_deref() == Some(stated.as_str());
    checks.push(check(
        "constant-domain refutation",
        cd_passed,
        format!(
            "stated {stated}, model_validity gives {found:?}, value at stated world {at_stated:?}"
        ),
    ));
    let cd_fails = FailureRecord {
        passed: cd_passed,
        stated_world: stated.clone(),
        found_world,
    };

    match validate_kripke_model(&r.countermodel.to_raw()) {
        Ok(m) => checks.push(check(
            "countermodel conditions",
            m.is_constant_domain(),
            "countermodel does not have a constant domain",
        )),
        Err(vs) => checks.push(check(
            "countermodel conditions",
            false,
            vs.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        )),
    }

    let stray: Vec<String> = r
        .sequent
        .predicates()
        .into_iter()
        .filter(|(p, ar)| !SYMBOLS.contains(&p.as_str()) || ar.iter().any(|&a| a != 0))
        .map(|(p, _)| p)
        .collect();
    checks.push(check(
        "symbols within p, q, r, s",
        stray.is_empty(),
        format!("unexpected symbols {stray:?}"),
    ));
    checks.push(check(
        "quantifier-free",
        r.sequent.formulas().all(Formula::is_quantifier_free),
        "sequent contains a quantifier",
    ));
    let others: Vec<String> = r
        .sequent
        .connectives()
        .into_keys()
        .filter(|n| n != r.connective.name())
        .collect();
    checks.push(check(
        "single connective",
        others.is_empty(),
        format!("other connectives {others:?}"),
    ));

    for table in &r.tables {
        checks.push(verify_table(r, table));
    }

    for claim in &r.claims {
        let got = eval_kripke(
            &r.countermodel,
            claim.world,
            &Assignment::empty(),
            &claim.formula,
        );
        checks.push(check(
            format!(
                "claim ∥{}∥ at {} = {}",
                display_name(&claim.name),
                r.countermodel
                    .worlds()
                    .get(claim.world)
                    .map_or("?", |s| s.as_str()),
                claim.value as u8
            ),
            matches!(got, Ok(v) if v == claim.value),
            format!("engine gives {got:?}"),
        ));
    }

    let passed = checks.iter().all(|c| c.passed);
    VerificationReport {
        classical_valid,
        cd_fails,
        checks,
        passed,
    }
}

/// Recompute a table and cross-check each cell against the truth function:
/// classically `value = t(args)`; in the model `value` is the minimum of
/// `t(args)` over the world and every later world.
fn verify_table(r: &SeparationResult, table: &ValueTable) -> Check {
    let name = match table.kind {
        TableKind::Classical => "classical table",
        TableKind::Kripke => "Kripke table",
    };
    let layered: Vec<(String, Formula)> = table
        .columns
        .iter()
        .map(|n| {
            (
                n.clone(),
                r.aux(n).cloned().unwrap_or_else(|| Formula::prop(n)),
            )
        })
        .collect();
    let again = match table.kind {
        TableKind::Classical => classical_table(&layered, &r.witnesses),
        TableKind::Kripke => kripke_table(&layered, &r.countermodel, &r.witnesses),
    };
    match again {
        Err(e) => return check(name, false, e.to_string()),
        Ok(t) if &t != table => return check(name, false, "recomputed table differs"),
        Ok(_) => {}
    }
    let t = &r.connective;
    for (ri, row) in table.rows.iter().enumerate() {
        for (ci, cell) in row.cells.iter().enumerate() {
            let expected = match table.kind {
                TableKind::Classical => t.eval_bits(cell.args.bits()),
                TableKind::Kripke => {
                    let Point::World(wname) = &row.point else {
                        return check(name, false, "row without a world");
                    };
                    let Ok(w) = r.countermodel.world(wname) else {
                        return check(name, false, format!("unknown world {wname}"));
                    };
                    r.countermodel.successors(w).all(|v| {
                        let idx = table.rows.iter().position(|row| {
                            row.point == Point::World(r.countermodel.worlds()[v].clone())
                        });
                        idx.is_some_and(|i| t.eval_bits(table.rows[i].cells[ci].args.bits()))
                    })
                }
            };
            if expected != cell.value {
                return check(
                    name,
                    false,
                    format!(
                        "row {ri}, column {}: value {} but clause gives {}",
                        cell.formula, cell.value as u8, expected as u8
                    ),
                );
            }
        }
    }
    check(name, true, "")
}

#[cfg(test)]
mod tests;
