use num_rational::BigRational;
use thiserror::Error;

use crate::presenter::Origin;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("collection exceeded the fuel limit of {0} rewrite steps")]
    NonTerminatingCollection(usize),

    #[error("element lies in layer {actual}, not in layer {layer}")]
    NotInLayer { layer: usize, actual: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("word contains module generators where only group generators are allowed")]
    NotGroupWord,

    #[error("direction is the zero vector")]
    ZeroDirection,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("annihilator is zero")]
    ZeroAnnihilator,

    #[error("generator {0} has no self-expression")]
    MissingGenerator(String),

    #[error("family does not cover the sphere; uncovered direction {}", fmt_vector(.witness))]
    NotCovered { witness: Vec<BigRational> },

    #[error("box subdivision reached depth {0} without certifying a positive margin")]
    NeedSmallerBoxes(usize),

    #[error("module is not certified tame")]
    NotTame,

    #[error("collection tails are not linear in the exponents; exponent reduction is not a quotient")]
    NonLinearTails,

    #[error("invalid finite model: {0}")]
    InvalidModel(String),

    #[error("relator {relator} ({origin}) does not hold; residue {residue}")]
    RelatorFails { origin: Origin, relator: String, residue: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("spec file and presentation disagree: {0}")]
    Inconsistent(String),
}

pub(crate) fn fmt_vector(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(|q| q.to_string()).collect();
    format!("({})", parts.join(", "))
}
