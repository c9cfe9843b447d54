use thiserror::Error;

use crate::diagram::{Kind, Label};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("token {index} ({token:?}): {message}")]
    Token {
        index: usize,
        token: String,
        message: String,
    },
    #[error("crossing {label}: {message}")]
    Label { label: Label, message: String },
    #[error("{0}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown crossing {0}")]
    UnknownLabel(Label),
    #[error("crossings must be distinct (got {0} twice)")]
    SameLabel(Label),
    #[error("expected a {expected:?} diagram, got {found:?}")]
    KindMismatch { expected: Kind, found: Kind },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("pair ({0}, {1}) is interleaved, not parallel")]
    NotParallel(Label, Label),
    #[error("component index {index} out of range (diagram has {count})")]
    ComponentOutOfRange { index: usize, count: usize },
    #[error("invalid component list: {0}")]
    ComponentSpec(String),
    #[error("inapplicable move: {0}")]
    InapplicableMove(String),
}

/// Errors from the Gauss-diagram-formula layer: pattern text and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("pattern has {pattern} components, diagram has {diagram}")]
    ComponentCount { pattern: usize, diagram: usize },
    #[error("patterns are evaluated on knotted diagrams; apply iota to flat input first")]
    FlatDiagram,
    #[error("unknown pattern {0:?}")]
    UnknownPattern(String),
    #[error("invalid permutation {0:?}")]
    Permutation(String),
    #[error("pattern {0:?} needs a permutation")]
    MissingPermutation(String),
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Diagram(DiagramError::Parse(e))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
