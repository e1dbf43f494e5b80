//! Per-index formula schemas. A layer builds `c(F_1, ..., F_n)` where `F_i`
//! is chosen by the pattern `(a[i], b[i])` of the witnesses.

use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::Formula;
use crate::truthfn::{Connective, TruthVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    A,
    B,
}

/// A conjunction of literals `v[i] = value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cond(pub &'static [(Var, bool)]);

impl Cond {
    /// `None` when the condition mentions a vector that is not defined.
    pub fn eval(&self, a: bool, b: Option<bool>) -> Option<bool> {
        let mut out = true;
        for &(var, want) in self.0 {
            let have = match var {
                Var::A => a,
                Var::B => b?,
            };
            out &= have == want;
        }
        Some(out)
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, x)| {
                let name = match v {
                    Var::A => "a",
                    Var::B => "b",
                };
                format!("{name}[i] = {}", *x as u8)
            })
            .collect();
        f.write_str(&parts.join(" and "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filler {
    Sym(&'static str),
    /// The formula built by the preceding layer.
    Prev,
    /// The case-specific constant formula: `τ`, or `r` once substituted.
    Tau,
}

impl fmt::Display for Filler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filler::Sym(s) => f.write_str(s),
            Filler::Prev => f.write_str("previous layer"),
            Filler::Tau => f.write_str("τ"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layer {
    pub name: &'static str,
    pub slots: &'static [(Cond, Filler)],
}

use Filler::{Prev, Sym, Tau};
use Var::{A, B};

const A0B0: Cond = Cond(&[(A, false), (B, false)]);
const A0B1: Cond = Cond(&[(A, false), (B, true)]);
const A1B1: Cond = Cond(&[(A, true), (B, true)]);
const A0: Cond = Cond(&[(A, false)]);
const A1: Cond = Cond(&[(A, true)]);

pub const SIGMA_P: Layer = Layer {
    name: "sigma_P",
    slots: &[(A0B0, Sym("q")), (A0B1, Sym("p")), (A1, Tau)],
};
pub const PSI_P: Layer = Layer {
    name: "psi_P",
    slots: &[(A0B0, Sym("p")), (A0B1, Prev), (A1, Tau)],
};
pub const PHI_P: Layer = Layer {
    name: "phi_P",
    slots: &[(A0B0, Sym("p")), (A0B1, Prev), (A1, Tau)],
};
pub const SIGMA_Q: Layer = Layer {
    name: "sigma_Q",
    slots: SIGMA_P.slots,
};
pub const PSI_Q: Layer = Layer {
    name: "psi_Q",
    slots: &[(A0B0, Prev), (A0B1, Sym("q")), (A1, Tau)],
};
pub const PHI_Q: Layer = Layer {
    name: "phi_Q",
    slots: &[(A0B0, Prev), (A0B1, Sym("p")), (A1, Tau)],
};

pub const CHI: Layer = Layer {
    name: "chi",
    slots: &[(A0, Sym("q")), (A1, Sym("p"))],
};
pub const PSI_B1: Layer = Layer {
    name: "psi",
    slots: &[(A0B0, Sym("q")), (A0B1, Sym("p")), (A1B1, Sym("r"))],
};
pub const PHI_B1: Layer = Layer {
    name: "phi",
    slots: &[(A0B0, Sym("q")), (A0B1, Prev), (A1B1, Sym("r"))],
};
pub const PSI_B2: Layer = Layer {
    name: "psi",
    slots: &[(A0, Sym("q")), (A1, Sym("r"))],
};

pub const PSI_A: Layer = Layer {
    name: "psi",
    slots: &[(A0, Sym("p")), (A1, Sym("r"))],
};
pub const PHI_A: Layer = Layer {
    name: "phi",
    slots: &[(A0, Prev), (A1, Sym("r"))],
};

/// Case (d), subcase 1 (`t(b̄^a) = 1`).
pub const CASE_D_P: &[Layer] = &[SIGMA_P, PSI_P, PHI_P];
/// Case (d), subcase 2 (`t(b̄^a) = 0`).
pub const CASE_D_Q: &[Layer] = &[SIGMA_Q, PSI_Q, PHI_Q];
/// Case (b), subcase 1 (`t(ā) = 1`); `chi` is independent of the others.
pub const CASE_B_1: &[Layer] = &[CHI, PSI_B1, PHI_B1];
pub const CASE_A: &[Layer] = &[PSI_A, PHI_A];

/// The filler a layer selects for one index, `None` if no slot applies.
pub fn select(layer: &Layer, a: bool, b: Option<bool>) -> Result<Option<Filler>> {
    let mut hits = layer
        .slots
        .iter()
        .filter(|(cond, _)| cond.eval(a, b) == Some(true))
        .map(|&(_, f)| f);
    let first = hits.next();
    if hits.next().is_some() {
        return Err(Error::Verification {
            connective: layer.name.to_string(),
            detail: "overlapping schema slots".into(),
        });
    }
    Ok(first)
}

/// Instantiate consecutive layers, returning each layer's formula.
pub fn instantiate(
    c: &Connective,
    layers: &[Layer],
    a: &TruthVector,
    b: Option<&TruthVector>,
    tau: Option<&Formula>,
) -> Result<Vec<(&'static str, Formula)>> {
    let mut out: Vec<(&'static str, Formula)> = Vec::new();
    for layer in layers {
        let mut args = Vec::with_capacity(c.arity());
        for i in 0..c.arity() {
            let filler = select(layer, a.get(i), b.map(|b| b.get(i)))?.ok_or_else(|| {
                Error::Verification {
                    connective: c.name().to_string(),
                    detail: format!("layer {} leaves index {} undefined", layer.name, i + 1),
                }
            })?;
            let missing = |what: &str| Error::Verification {
                connective: c.name().to_string(),
                detail: format!("layer {} needs {what}", layer.name),
            };
            args.push(match filler {
                Sym(s) => Formula::prop(s),
                Prev => out
                    .last()
                    .ok_or_else(|| missing("a preceding layer"))?
                    .1
                    .clone(),
                Tau => tau.ok_or_else(|| missing("τ"))?.clone(),
            });
        }
        out.push((layer.name, Formula::conn(c, args)?));
    }
    Ok(out)
}
