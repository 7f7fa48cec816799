use crate::structure::Violation;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("point count mismatch: {left} vs {right}")]
    PointCountMismatch { left: usize, right: usize },
    #[error("element {element} out of range for universe of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("invalid structure: {0}")]
    InvalidStructure(Violation),
    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` has arity {expected}, used with {found} arguments")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("structure of size {size} exceeds the isomorphism search limit {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("expected exactly the free variables {expected:?}, found {found:?}")]
    FreeVariables { expected: Vec<String>, found: Vec<String> },
    #[error("element {element} lies at distance {distance} > {radius} from the point")]
    RadiusInconsistent {
        element: usize,
        distance: String,
        radius: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("game search exceeded its budget of {budget} positions")]
    BudgetExhausted { budget: u64 },
    #[error("no qualifying split pair; oriented neighbourhood words: {words}")]
    NoSplitPair { words: String },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("malformed structure file: {0}")]
    Format(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}
