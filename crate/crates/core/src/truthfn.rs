//! Truth-value vectors, truth tables and monotonicity analysis.
//!
//! Truth tables are stored row by row. Row `i` holds the value on the
//! argument tuple whose binary encoding is `i`, with argument 1 as the most
//! significant bit. For a binary connective the rows are therefore
//! `00, 01, 10, 11`, so implication is `"1101"` and NAND is `"1110"`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest arity accepted for a truth table.
pub const MAX_ARITY: usize = 16;

/// A fixed-length sequence of truth values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct TruthVector(Vec<bool>);

impl TruthVector {
    pub fn new(bits: Vec<bool>) -> Self {
        TruthVector(bits)
    }

    pub fn zeros(n: usize) -> Self {
        TruthVector(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        TruthVector(vec![true; n])
    }

    /// The vector encoded by `row` in the table row order.
    pub fn from_row(row: usize, n: usize) -> Self {
        TruthVector((0..n).map(|j| (row >> (n - 1 - j)) & 1 == 1).collect())
    }

    pub fn row(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    fn check_len(&self, other: &TruthVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    /// Pointwise order: `self ⊑ other`.
    pub fn leq(&self, other: &TruthVector) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(&x, &y)| x <= y))
    }

    /// Componentwise minimum, the greatest lower bound under `⊑`.
    pub fn meet(&self, other: &TruthVector) -> Result<TruthVector> {
        self.check_len(other)?;
        Ok(TruthVector(
            self.0.iter().zip(&other.0).map(|(&x, &y)| x && y).collect(),
        ))
    }

    pub fn invert(&self) -> TruthVector {
        TruthVector(self.0.iter().map(|&x| !x).collect())
    }

    /// Relative inversion of `b` with respect to `a` (requires `a ⊑ b`):
    /// component `i` is 0 exactly where `a[i] = 0` and `b[i] = 1`.
    pub fn relative_invert(a: &TruthVector, b: &TruthVector) -> Result<TruthVector> {
        if !a.leq(b)? {
            return Err(Error::NotBelow {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        Ok(TruthVector(
            a.0.iter().zip(&b.0).map(|(&x, &y)| x || !y).collect(),
        ))
    }

    /// Bit string form, e.g. `"010"`.
    pub fn to_bit_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl FromStr for TruthVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BadTable {
                    name: s.to_string(),
                    reason: format!("unexpected character `{ch}` in bit string"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(TruthVector)
    }
}

impl TryFrom<String> for TruthVector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TruthVector> for String {
    fn from(v: TruthVector) -> String {
        v.to_bit_string()
    }
}

impl fmt::Display for TruthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, &b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(">")
    }
}
/// The four classes of non-monotonic tables used by the separating
/// constructions, keyed on the values at the all-zero and all-one vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// f(0̄) = 0, f(1̄) = 0
    A,
    /// f(0̄) = 0, f(1̄) = 1
    B,
    /// f(0̄) = 1, f(1̄) = 0
    C,
    /// f(0̄) = 1, f(1̄) = 1
    D,
}

impl Case {
    pub fn label(self) -> char {
        match self {
            Case::A => 'a',
            Case::B => 'b',
            Case::C => 'c',
            Case::D => 'd',
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A named connective together with its truth function.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthTable {
    name: String,
    arity: usize,
    outputs: TruthVector,
}

/// Connectives are shared between the signature and every formula using them.
pub type Connective = Arc<TruthTable>;

impl TruthTable {
    pub fn new(name: impl Into<String>, arity: usize, outputs: TruthVector) -> Result<Self> {
        let name = name.into();
        if arity > MAX_ARITY {
            return Err(Error::BadTable {
                name,
                reason: format!("arity {arity} exceeds the maximum of {MAX_ARITY}"),
            });
        }
        if outputs.len() != 1 << arity {
            return Err(Error::BadTable {
                reason: format!(
                    "arity {arity} needs {} output bits, found {}",
                    1usize << arity,
                    outputs.len()
                ),
                name,
            });
        }
        Ok(TruthTable {
            name,
            arity,
            outputs,
        })
    }

    /// Build from a bit string in row order, e.g. `("nand", 2, "1110")`.
    pub fn from_bits(name: impl Into<String>, arity: usize, bits: &str) -> Result<Self> {
        let name = name.into();
        let outputs = bits.parse().map_err(|_| Error::BadTable {
            name: name.clone(),
            reason: format!("`{bits}` is not a bit string"),
        })?;
        TruthTable::new(name, arity, outputs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn outputs(&self) -> &TruthVector {
        &self.outputs
    }

    pub fn rows(&self) -> usize {
        self.outputs.len()
    }

    pub fn eval_row(&self, row: usize) -> bool {
        self.outputs.get(row)
    }

    pub fn eval(&self, args: &TruthVector) -> Result<bool> {
        if args.len() != self.arity {
            return Err(Error::ConnectiveArity {
                name: self.name.clone(),
                expected: self.arity,
                found: args.len(),
            });
        }
        Ok(self.eval_row(args.row()))
    }

    /// Evaluate on a slice of argument values without allocating.
    pub fn eval_bits(&self, args: &[bool]) -> bool {
        debug_assert_eq!(args.len(), self.arity);
        self.eval_row(args.iter().fold(0, |acc, &b| (acc << 1) | b as usize))
    }

    /// `None` when the table is monotonic; otherwise the first pair
    /// `a ⊑ b` with `f(a) = 1`, `f(b) = 0` ordered by (row of a, row of b).
    pub fn monotonicity_witness(&self) -> Option<(TruthVector, TruthVector)> {
        let rows = self.rows();
        for a in (0..rows).filter(|&a| self.eval_row(a)) {
            // in the row encoding, a ⊑ b iff every set bit of a is set in b
            if let Some(b) = (0..rows).find(|&b| a & !b == 0 && !self.eval_row(b)) {
                return Some((
                    TruthVector::from_row(a, self.arity),
                    TruthVector::from_row(b, self.arity),
                ));
            }
        }
        None
    }

    pub fn is_monotonic(&self) -> bool {
        self.monotonicity_witness().is_none()
    }

    pub fn classify_case(&self) -> Case {
        let zero = self.eval_row(0);
        let one = self.eval_row(self.rows() - 1);
        match (zero, one) {
            (false, false) => Case::A,
            (false, true) => Case::B,
            (true, false) => Case::C,
            (true, true) => Case::D,
        }
    }

    /// Every table of the given arity, in ascending order of the output bits
    /// read as a binary number with row 0 most significant.
    pub fn all_of_arity(arity: usize) -> impl Iterator<Item = TruthTable> {
        assert!(
            arity <= 4,
            "enumerating all tables is only sensible for arity <= 4"
        );
        let rows = 1usize << arity;
        (0u64..1 << rows).map(move |code| {
            let bits = (0..rows)
                .map(|r| (code >> (rows - 1 - r)) & 1 == 1)
                .collect();
            TruthTable {
                name: format!("t{arity}_{code:0width$b}", width = rows),
                arity,
                outputs: TruthVector(bits),
            }
        })
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} {}",
            self.name,
            self.arity,
            self.outputs.to_bit_string()
        )
    }
}

/// The usual connectives, in the documented row order.
pub mod standard {
    use super::{Connective, TruthTable};
    use std::sync::Arc;

    fn table(name: &str, arity: usize, bits: &str) -> Connective {
        Arc::new(TruthTable::from_bits(name, arity, bits).expect("static table"))
    }

    pub fn and() -> Connective {
        table("and", 2, "0001")
    }

    pub fn or() -> Connective {
        table("or", 2, "0111")
    }

    pub fn implies() -> Connective {
        table("implies", 2, "1101")
    }

    pub fn nand() -> Connective {
        table("nand", 2, "1110")
    }

    pub fn xor() -> Connective {
        table("xor", 2, "0110")
    }

    pub fn not() -> Connective {
        table("not", 1, "10")
    }

    pub fn bot() -> Connective {
        table("bot", 0, "0")
    }
}

const RESERVED: &[&str] = &["forall", "exists"];

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// A set of connectives with unique names, plus optional predicate arity
/// declarations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    connectives: BTreeMap<String, Connective>,
    predicates: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tables(tables: impl IntoIterator<Item = Connective>) -> Result<Self> {
        let mut sig = Signature::new();
        for t in tables {
            sig.add(t)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, table: Connective) -> Result<()> {
        let name = table.name().to_string();
        if !is_identifier(&name) || RESERVED.contains(&name.as_str()) {
            return Err(Error::BadTable {
                name,
                reason: "not a valid connective name".into(),
            });
        }
        if self.predicates.contains_key(&name) || self.connectives.contains_key(&name) {
            return Err(Error::BadTable {
                name,
                reason: "duplicate name".into(),
            });
        }
        self.connectives.insert(name, table);
        Ok(())
    }

    pub fn declare_predicate(&mut self, name: &str, arity: usize) -> Result<()> {
        if !is_identifier(name) || RESERVED.contains(&name) || self.connectives.contains_key(name) {
            return Err(Error::BadTable {
                name: name.to_string(),
                reason: "not a valid predicate name".into(),
            });
        }
        match self.predicates.insert(name.to_string(), arity) {
            Some(old) if old != arity => Err(Error::BadTable {
                name: name.to_string(),
                reason: "predicate declared twice with different arities".into(),
            }),
            _ => Ok(()),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Connective> {
        self.connectives.get(name)
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    /// Connectives in name order.
    pub fn connectives(&self) -> impl Iterator<Item = &Connective> {
        self.connectives.values()
    }

    pub fn len(&self) -> usize {
        self.connectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.connectives.is_empty()
    }

    /// Parse the line-oriented signature format:
    ///
    /// ```text
    /// # comment
    /// conn nand 2 1110
    /// pred P 1
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut sig = Signature::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Signature {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["conn", name, arity, bits] => {
                    let arity: usize = arity
                        .parse()
                        .map_err(|_| err(format!("bad arity `{arity}`")))?;
                    let table = TruthTable::from_bits(*name, arity, bits)
                        .map_err(|e| err(e.to_string()))?;
                    sig.add(Arc::new(table)).map_err(|e| err(e.to_string()))?;
                }
                ["pred", name, arity] => {
                    let arity: usize = arity
                        .parse()
                        .map_err(|_| err(format!("bad arity `{arity}`")))?;
                    sig.declare_predicate(name, arity)
                        .map_err(|e| err(e.to_string()))?;
                }
                _ => return Err(err(format!("unrecognized line `{line}`"))),
            }
        }
        Ok(sig)
    }

    /// Render back into the line-oriented format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in self.connectives.values() {
            out.push_str(&format!(
                "conn {} {} {}\n",
                t.name(),
                t.arity(),
                t.outputs().to_bit_string()
            ));
        }
        for (name, arity) in &self.predicates {
            out.push_str(&format!("pred {name} {arity}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> TruthVector {
        s.parse().unwrap()
    }

    fn all_vectors(n: usize) -> Vec<TruthVector> {
        (0..1 << n).map(|r| TruthVector::from_row(r, n)).collect()
    }

    #[test]
    fn leq_examples() {
        assert!(v("00").leq(&v("10")).unwrap());
        assert!(!v("10").leq(&v("01")).unwrap());
        assert!(v("010").leq(&v("010")).unwrap());
        assert!(matches!(
            v("01").leq(&v("011")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(v("01").meet(&v("11")).unwrap(), v("01"));
        assert_eq!(v("11").meet(&v("11")).unwrap(), v("11"));
        assert_eq!(v("101").meet(&v("011")).unwrap(), v("001"));
        assert!(v("1").meet(&v("11")).is_err());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(v("010").invert(), v("101"));
        assert_eq!(TruthVector::zeros(0).invert(), TruthVector::zeros(0));
        for n in 0..=4 {
            for a in all_vectors(n) {
                assert_eq!(a.invert().invert(), a);
            }
        }
    }

    // Oracle: the two-clause definition, written independently.
    fn relative_invert_oracle(a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut out = Vec::new();
        for i in 0..a.len() {
            if !a[i] && b[i] {
                out.push(false);
            } else if a[i] || !b[i] {
                out.push(true);
            } else {
                unreachable!()
            }
        }
        out
    }

    #[test]
    fn relative_invert_examples() {
        assert_eq!(
            TruthVector::relative_invert(&v("00"), &v("10")).unwrap(),
            v("01")
        );
        assert_eq!(
            TruthVector::relative_invert(&v("00"), &v("00")).unwrap(),
            v("11")
        );
        assert_eq!(
            TruthVector::relative_invert(&v("11"), &v("11")).unwrap(),
            v("11")
        );
        assert!(matches!(
            TruthVector::relative_invert(&v("10"), &v("01")),
            Err(Error::NotBelow { .. })
        ));
    }

    #[test]
    fn relative_invert_matches_definition_exhaustively() {
        for n in 0..=4 {
            for a in all_vectors(n) {
                for b in all_vectors(n) {
                    if !a.leq(&b).unwrap() {
                        continue;
                    }
                    let r = TruthVector::relative_invert(&a, &b).unwrap();
                    assert_eq!(r.bits(), relative_invert_oracle(a.bits(), b.bits()));
                    assert!(a.leq(&r).unwrap());
                }
            }
        }
    }

    #[test]
    fn order_is_partial_order_and_meet_is_glb() {
        for n in 0..=4 {
            let all = all_vectors(n);
            for a in &all {
                assert!(a.leq(a).unwrap());
                for b in &all {
                    if a.leq(b).unwrap() && b.leq(a).unwrap() {
                        assert_eq!(a, b);
                    }
                    let m = a.meet(b).unwrap();
                    assert!(m.leq(a).unwrap() && m.leq(b).unwrap());
                    for c in &all {
                        if a.leq(b).unwrap() && b.leq(c).unwrap() {
                            assert!(a.leq(c).unwrap());
                        }
                        if c.leq(a).unwrap() && c.leq(b).unwrap() {
                            assert!(c.leq(&m).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn eval_table_examples() {
        let nand = standard::nand();
        assert!(!nand.eval(&v("11")).unwrap());
        assert!(nand.eval(&v("00")).unwrap());
        assert!(!standard::and().eval(&v("01")).unwrap());
        assert!(matches!(
            nand.eval(&v("1")),
            Err(Error::ConnectiveArity { .. })
        ));
    }

    #[test]
    fn witness_examples() {
        assert_eq!(standard::and().monotonicity_witness(), None);
        assert_eq!(
            standard::implies().monotonicity_witness(),
            Some((v("00"), v("10")))
        );
        assert_eq!(
            standard::xor().monotonicity_witness(),
            Some((v("01"), v("11")))
        );
    }

    #[test]
    fn witness_agrees_with_double_loop() {
        for n in 0..=3 {
            for t in TruthTable::all_of_arity(n) {
                let all = all_vectors(n);
                let mut first = None;
                'outer: for a in &all {
                    for b in &all {
                        if a.leq(b).unwrap() && t.eval(a).unwrap() && !t.eval(b).unwrap() {
                            first = Some((a.clone(), b.clone()));
                            break 'outer;
                        }
                    }
                }
                assert_eq!(t.monotonicity_witness(), first, "{t}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(standard::xor().classify_case(), Case::A);
        assert_eq!(standard::nand().classify_case(), Case::C);
        assert_eq!(standard::implies().classify_case(), Case::D);
        assert_eq!(standard::and().classify_case(), Case::B);
        assert_eq!(standard::bot().classify_case(), Case::A);
    }

    #[test]
    fn nullary_tables() {
        let top = TruthTable::from_bits("top", 0, "1").unwrap();
        assert!(top.eval(&TruthVector::zeros(0)).unwrap());
        assert!(top.is_monotonic());
        assert!(TruthTable::from_bits("x", 0, "10").is_err());
    }

    #[test]
    fn counts_of_monotone_tables() {
        // Dedekind numbers 3, 6, 20 for arities 1, 2, 3
        let count = |n| {
            TruthTable::all_of_arity(n)
                .filter(|t| t.is_monotonic())
                .count()
        };
        assert_eq!(count(1), 3);
        assert_eq!(count(2), 6);
        assert_eq!(count(3), 20);
    }

    #[test]
    fn signature_file() {
        let sig =
            Signature::parse("# demo\nconn nand 2 1110\n\nconn and 2 0001\npred P 1\n").unwrap();
        assert_eq!(sig.len(), 2);
        let names: Vec<_> = sig.connectives().map(|c| c.name().to_string()).collect();
        assert_eq!(names, ["and", "nand"]);
        assert_eq!(sig.predicate_arity("P"), Some(1));
        assert_eq!(Signature::parse(&sig.to_text()).unwrap(), sig);

        match Signature::parse("conn nand 2 111") {
            Err(Error::Signature { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(Signature::parse("conn a 2 0001\nconn a 2 0111").is_err());
        assert!(Signature::parse("conn forall 1 10").is_err());
        assert!(Signature::parse("connective x 1 10").is_err());
    }
}
