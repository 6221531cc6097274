use std::collections::BTreeSet;

use thiserror::Error;

/// Source location inside a `.msl` file, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Loc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate sort `{0}`")]
    DuplicateSort(String),
    #[error("duplicate operation `{0}`")]
    DuplicateOperation(String),
    #[error("operation `{op}` mentions unknown sort `{sort}`")]
    UnknownSortInArity { op: String, sort: String },
    #[error("operation `{op}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    /// 1-based argument position (0 when the mismatch is not positional).
    #[error("sort mismatch at argument {0}")]
    SortMismatch(usize),
    #[error("variables {0:?} occur in the expression but are not declared")]
    MissingVariables(BTreeSet<String>),
    #[error("declared type disagrees with the type of the expression")]
    TypeDisagrees,
    #[error("operation `{0}` is not part of the signature")]
    UnknownOperation(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("sort `{0}` is not inhabited, cannot fill a missing variable")]
    UninhabitedFill(String),
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("middle terms of transitivity do not agree")]
    MiddleTermMismatch,
    #[error("unknown hypothesis {0}")]
    UnknownHypothesis(usize),
    #[error("factorization interfaces do not match: {0}")]
    InterfaceMismatch(String),
    #[error("model space too large: {0}")]
    CarrierTooLarge(String),
    #[error("{loc}: syntax error: {msg}")]
    SyntaxError { loc: Loc, msg: String },
    #[error("{loc}: {msg}")]
    NameResolutionError { loc: Loc, msg: String },
    #[error("{loc}: ill-typed: {msg}")]
    IllTyped { loc: Loc, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
