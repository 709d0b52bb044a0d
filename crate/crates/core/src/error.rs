use thiserror::Error;

use crate::model::VarId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable {0} is not bound in the assignment")]
    UnboundVariable(VarId),

    #[error("variable {0} is not registered in the system")]
    UnregisteredVariable(VarId),

    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),

    #[error("invalid provenance: {0}")]
    InvalidProvenance(String),

    #[error("unit equation constant {0} is outside {{-1, 0, 1}}")]
    ConstantOutOfRange(i64),

    #[error("variable {0} appears more than once in an equation")]
    DuplicateTerm(VarId),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("assignment covers {actual} variables, the system has {expected}")]
    AssignmentSize { expected: usize, actual: usize },

    /// The subset-sum instance has no values, so no system is emitted.
    #[error("degenerate instance with no values (directly {})", if *.feasible { "feasible" } else { "infeasible" })]
    DegenerateInstance { feasible: bool },

    #[error("assignment does not satisfy the system: {0}")]
    LiftRefused(String),

    #[error("instance too large for brute force: {0}")]
    SizeGuard(String),

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("DIMACS line {line}: {msg}")]
    Dimacs { line: usize, msg: String },

    #[error("clause {clause} has {found} literals, expected 3")]
    Arity { clause: usize, found: usize },

    #[error("literal {literal} in clause {clause} is outside 1..={num_vars}")]
    LiteralRange {
        clause: usize,
        literal: i64,
        num_vars: usize,
    },

    #[error("format error: {0}")]
    Format(String),
}
