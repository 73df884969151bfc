use thiserror::Error;

use crate::logic::Predicate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: predicate {name} used with arity {found}, previously {expected}")]
    ArityClash {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: fact {atom} is not ground")]
    NonGroundFact { line: usize, col: usize, atom: String },
    #[error("{line}:{col}: rule {clause} is not range-restricted")]
    NotRangeRestricted { line: usize, col: usize, clause: String },
    #[error("{line}:{col}: expected pos(...) or neg(...), found {found}")]
    BadExampleWrapper { line: usize, col: usize, found: String },
    #[error("{line}:{col}: example {atom} is not ground")]
    NonGroundExample { line: usize, col: usize, atom: String },
    #[error("example {atom} is labelled both positive and negative")]
    ContradictoryExample { atom: String },
    #[error("{line}:{col}: example predicate {found} differs from target {expected}")]
    MixedTarget {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: rules are not allowed here")]
    UnexpectedRule { line: usize, col: usize },
    #[error("invalid bias: {0}")]
    Bias(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("derived-atom limit of {limit} exceeded")]
    ResourceLimit { limit: usize },
    #[error("predicate {0} is not declared")]
    UndeclaredPredicate(Predicate),
    #[error("atom {0} is not ground")]
    NonGroundAtom(String),
    #[error("example set is empty")]
    EmptyExamples,
    #[error("bias admits no candidate hypotheses")]
    NoCandidates,
    #[error("no candidate was evaluated before the timeout")]
    EmptyPool,
    #[error("timeout must be positive")]
    ZeroTimeout,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bag {bag}: {source}")]
    Bag {
        bag: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed pool record on line {line}: {msg}")]
    PoolFormat { line: usize, msg: String },
}
