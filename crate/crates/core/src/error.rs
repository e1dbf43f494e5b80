use thiserror::Error;

use crate::syntax::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("relative inversion requires {a} ⊑ {b}")]
    NotBelow { a: String, b: String },

    #[error("connective `{name}` has arity {expected}, applied to {found} argument(s)")]
    ConnectiveArity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid truth table `{name}`: {reason}")]
    BadTable { name: String, reason: String },

    #[error("signature line {line}: {message}")]
    Signature { line: usize, message: String },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("variable `{var}` is mapped to an individual outside the domain of world `{world}`")]
    OutsideDomain { var: String, world: String },

    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("predicate `{pred}` is interpreted with arity {model} but used with arity {formula}")]
    PredicateArity {
        pred: String,
        model: usize,
        formula: usize,
    },

    #[error("sequent is not propositional")]
    NotPropositional,

    #[error("model is not constant-domain")]
    NotConstantDomain,

    #[error("connective `{name}` is not monotonic: witness ({a}, {b})")]
    NonMonotone { name: String, a: String, b: String },

    #[error("connective `{name}` falls in case ({found}), expected case ({expected})")]
    WrongCase {
        name: String,
        expected: char,
        found: char,
    },

    #[error("connective `{0}` has arity 0")]
    NullaryConnective(String),

    #[error("bound must be at least 1")]
    InvalidBound,

    #[error(
        "bound infeasible: {required} candidate interpretations exceed the ceiling of {ceiling}"
    )]
    BoundInfeasible { required: u128, ceiling: u128 },

    #[error("model limit exceeded: {0}")]
    ModelTooLarge(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("construction failed verification for `{connective}`: {detail}")]
    Verification { connective: String, detail: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
