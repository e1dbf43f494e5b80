//! Recursive-descent parser for the ASCII formula and sequent syntax.
//!
//! ```text
//! F ::= ID | ID '(' X (',' X)* ')' | ID '(' F (',' F)* ')'
//!     | 'forall' X '.' F | 'exists' X '.' F
//! S ::= [F (',' F)*] '=>' [F (',' F)*]
//! ```
//!
//! An identifier is a connective when the signature names it, otherwise a
//! predicate. Predicate arities come from the signature when declared and
//! must otherwise be used consistently within one parse.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Formula, Sequent};
use crate::truthfn::Signature;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    UnknownConnective(String),
    ConnectiveArity {
        name: String,
        expected: usize,
        found: usize,
    },
    PredicateArity {
        name: String,
        expected: usize,
        found: usize,
    },
    TrailingInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UnknownConnective(name) => write!(f, "unknown connective `{name}`"),
            ParseErrorKind::ConnectiveArity {
                name,
                expected,
                found,
            } => write!(
                f,
                "connective `{name}` takes {expected} argument(s), found {found}"
            ),
            ParseErrorKind::PredicateArity {
                name,
                expected,
                found,
            } => write!(
                f,
                "predicate `{name}` has arity {expected}, found {found} argument(s)"
            ),
            ParseErrorKind::TrailingInput => f.write_str("trailing input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '.' => {
                toks.push((i, Tok::Dot));
                i += 1;
            }
            '=' if bytes.get(i + 1) == Some(&b'>') => {
                toks.push((i, Tok::Arrow));
                i += 2;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or(c);
                return Err(ParseError {
                    pos: i,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    sig: &'a Signature,
    arities: BTreeMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            idx: 0,
            end: text.len(),
            sig,
            arities: BTreeMap::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            kind,
        })
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.idx += 1;
                Ok(())
            }
            Some(_) => self.err(ParseErrorKind::Expected(what)),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn ident(&mut self, what: &'static str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) if name != "forall" && name != "exists" => {
                let name = name.clone();
                self.idx += 1;
                Ok(name)
            }
            Some(_) => self.err(ParseErrorKind::Expected(what)),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos();
        match self.peek() {
            None => self.err(ParseErrorKind::UnexpectedEnd),
            Some(Tok::Ident(kw)) if kw == "forall" || kw == "exists" => {
                let universal = kw == "forall";
                self.idx += 1;
                let var = self.ident("a variable")?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.formula()?;
                Ok(if universal {
                    Formula::Forall(var, Box::new(body))
                } else {
                    Formula::Exists(var, Box::new(body))
                })
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident("an identifier")?;
                let has_args = self.peek() == Some(&Tok::LParen);
                if let Some(conn) = self.sig.get(&name).cloned() {
                    let mut args = Vec::new();
                    if has_args {
                        self.idx += 1;
                        args.push(self.formula()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.idx += 1;
                            args.push(self.formula()?);
                        }
                        self.expect(Tok::RParen, "`,` or `)`")?;
                    }
                    if args.len() != conn.arity() {
                        return Err(ParseError {
                            pos: start,
                            kind: ParseErrorKind::ConnectiveArity {
                                name,
                                expected: conn.arity(),
                                found: args.len(),
                            },
                        });
                    }
                    return Ok(Formula::Conn { conn, args });
                }
                let mut args = Vec::new();
                if has_args {
                    self.idx += 1;
                    args.push(self.ident("a variable")?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.idx += 1;
                        args.push(self.ident("a variable")?);
                    }
                    if self.peek() == Some(&Tok::LParen) {
                        // `name(var(` only makes sense if `name` were a connective
                        return Err(ParseError {
                            pos: start,
                            kind: ParseErrorKind::UnknownConnective(name),
                        });
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                }
                let expected = self
                    .sig
                    .predicate_arity(&name)
                    .or_else(|| self.arities.get(&name).copied());
                match expected {
                    Some(n) if n != args.len() => Err(ParseError {
                        pos: start,
                        kind: ParseErrorKind::PredicateArity {
                            name,
                            expected: n,
                            found: args.len(),
                        },
                    }),
                    _ => {
                        self.arities.insert(name.clone(), args.len());
                        Ok(Formula::Atom { pred: name, args })
                    }
                }
            }
            Some(_) => self.err(ParseErrorKind::Expected("a formula")),
        }
    }

    fn formula_list(&mut self, stop_at_arrow: bool) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        let at_stop = |p: &Self| match p.peek() {
            None => true,
            Some(Tok::Arrow) => stop_at_arrow,
            _ => false,
        };
        if at_stop(self) {
            return Ok(out);
        }
        out.push(self.formula()?);
        while self.peek() == Some(&Tok::Comma) {
            self.idx += 1;
            out.push(self.formula()?);
        }
        Ok(out)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.idx < self.toks.len() {
            return self.err(ParseErrorKind::TrailingInput);
        }
        Ok(())
    }
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_sequent(text: &str, sig: &Signature) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let left = p.formula_list(true)?;
    p.expect(Tok::Arrow, "`=>`")?;
    let right = p.formula_list(false)?;
    p.finish()?;
    Ok(Sequent::new(left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truthfn::standard;
    use proptest::prelude::*;

    fn sig() -> Signature {
        Signature::from_tables([
            standard::nand(),
            standard::implies(),
            standard::and(),
            standard::not(),
            standard::bot(),
            std::sync::Arc::new(
                crate::truthfn::TruthTable::from_bits("maj", 3, "00010111").unwrap(),
            ),
        ])
        .unwrap()
    }

    #[test]
    fn parses_connective() {
        let f = parse_formula("nand(p, q)", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::conn(
                &standard::nand(),
                vec![Formula::prop("p"), Formula::prop("q")]
            )
            .unwrap()
        );
    }

    #[test]
    fn parses_quantifier() {
        let f = parse_formula("forall x. P(x)", &sig()).unwrap();
        assert_eq!(f, Formula::forall("x", Formula::atom("P", &["x"])));
        let f = parse_formula("and(forall x. P(x), exists y.Q(y, x))", &sig()).unwrap();
        assert_eq!(f.free_vars().len(), 1);
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_formula("nand(p)", &sig()).unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::ConnectiveArity {
                expected: 2,
                found: 1,
                ..
            }
        ));
        assert_eq!(e.pos, 0);
        let e = parse_formula("and(P(x), P(x, y))", &sig()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::PredicateArity { .. }));
        assert_eq!(e.pos, 10);
    }

    #[test]
    fn declared_predicate_arity() {
        let mut s = sig();
        s.declare_predicate("P", 2).unwrap();
        assert!(parse_formula("P(x)", &s).is_err());
        assert!(parse_formula("P(x, y)", &s).is_ok());
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "nand(p,",
            "forall . p",
            "p q",
            "and(p, q))",
            "p $",
            "forall x p",
            "f(g(x))",
        ] {
            assert!(parse_formula(bad, &sig()).is_err(), "{bad}");
        }
    }

    #[test]
    fn nullary_connective() {
        let f = parse_formula("implies(p, bot)", &sig()).unwrap();
        assert_eq!(f.to_string(), "implies(p, bot)");
        assert!(parse_formula("bot(p)", &sig()).is_err());
    }

    #[test]
    fn sequents() {
        let s = parse_sequent("=> implies(implies(implies(p, q), p), p)", &sig()).unwrap();
        assert!(s.antecedent.is_empty());
        assert_eq!(s.succedent.len(), 1);
        let s = parse_sequent("p, q =>", &sig()).unwrap();
        assert_eq!(s.antecedent.len(), 2);
        assert_eq!(parse_sequent("=>", &sig()).unwrap(), Sequent::default());
        let s = parse_sequent("forall x. P(x), p => exists y. P(y)", &sig()).unwrap();
        assert_eq!(s.antecedent.len(), 2);
        assert!(parse_sequent("p", &sig()).is_err());
        assert!(parse_sequent("p => q => r", &sig()).is_err());
        assert!(parse_sequent("P(x) => P(x, y)", &sig()).is_err());
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::prop),
            prop::sample::select(vec!["x", "y", "z"]).prop_map(|x| Formula::atom("P", &[x])),
            (
                prop::sample::select(vec!["x", "y"]),
                prop::sample::select(vec!["x", "z"])
            )
                .prop_map(|(a, b)| Formula::atom("R", &[a, b])),
            Just(Formula::Conn {
                conn: standard::bot(),
                args: vec![]
            }),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::conn(
                    &standard::nand(),
                    vec![a, b]
                )
                .unwrap()),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::conn(
                    &standard::implies(),
                    vec![a, b]
                )
                .unwrap()),
                inner
                    .clone()
                    .prop_map(|a| Formula::conn(&standard::not(), vec![a]).unwrap()),
                (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, c)| Formula::conn(
                    &sig().get("maj").unwrap().clone(),
                    vec![a, b, c]
                )
                .unwrap()),
                (prop::sample::select(vec!["x", "y"]), inner.clone())
                    .prop_map(|(x, a)| Formula::forall(x, a)),
                (prop::sample::select(vec!["x", "z"]), inner)
                    .prop_map(|(x, a)| Formula::exists(x, a)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            let text = f.to_string();
            let back = parse_formula(&text, &sig()).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn sequent_round_trip(l in prop::collection::vec(arb_formula(), 0..3), r in prop::collection::vec(arb_formula(), 0..3)) {
            let s = Sequent::new(l, r);
            prop_assert_eq!(parse_sequent(&s.to_string(), &sig()).unwrap(), s);
        }

        #[test]
        fn closed_substitution_keeps_free_vars(f in arb_formula()) {
            let target = Formula::prop("p");
            let replacement = Formula::conn(&standard::nand(), vec![Formula::prop("q"), Formula::prop("r")]).unwrap();
            prop_assert_eq!(f.substitute(&target, &replacement).free_vars(), f.free_vars());
        }
    }
}
