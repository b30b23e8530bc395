use thiserror::Error;

use crate::element::Elem;
use crate::language::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("instance has {n} elements, brute-force limit is {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("precedence function of element {element} is not monotone (fails at chosen-set {set:#b})")]
    NotMonotone { element: usize, set: u64 },

    #[error("language violates axioms: {0}")]
    Axiom(Violation),

    #[error("heap usage error: {0}")]
    HeapUsage(String),

    #[error("extract from empty heap")]
    EmptyHeap,

    #[error("operation log disabled")]
    LogDisabled,

    #[error("candidate structure stalled after prefix {prefix:?} ({output} of {n} elements output)")]
    Stall { prefix: Vec<Elem>, output: usize, n: usize },

    #[error("candidate contract violated: {0}")]
    Contract(String),

    #[error("oracle and candidate structure disagree: {0}")]
    Mismatch(String),

    #[error("no layer sequence: antimatroid is not full (covered {covered} of {n} elements)")]
    NotFull { covered: usize, n: usize },

    #[error("graph is not chordal: {0}")]
    NotChordal(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, column, message: message.into() }
    }
}
