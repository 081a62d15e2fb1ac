use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Byte range into a source text, `begin <= end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(begin: usize, end: usize) -> Self {
        debug_assert!(begin <= end);
        SourceSpan { begin, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.begin, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: BTreeSet<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exp: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        write!(f, "at {}: found {}, expected one of: {}", self.span, self.found, exp.join(" "))
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error {0}")]
    Syntax(#[from] ParseError),
    #[error("unknown player {player} (agents are 1..={agents})")]
    UnknownPlayer { player: u32, agents: u32 },
    #[error("substituting for `{var}` would be captured by binder `{binder}`")]
    Capture { binder: String, var: String },
    #[error("preference operand is not PLTL in {0}")]
    NonPltlOperand(String),
    #[error("not a future formula: {0}")]
    NotFuture(String),
    #[error("atom `{0}` is outside the guard vocabulary")]
    OutsideVocabulary(String),
    #[error("vocabulary of {size} propositions exceeds the limit of {limit}")]
    VocabularyTooLarge { size: usize, limit: usize },
    #[error("closure exceeded {limit} formulas")]
    ClosureLimit { limit: usize },
    #[error("quantifier domain of {count} elements exceeds the limit of {limit}")]
    DomainTooLarge { count: usize, limit: usize },
    #[error("node budget exceeded: {needed} > {budget}")]
    Budget { needed: usize, budget: usize },
    #[error("name clash: `{0}` is used both as a proposition and an action or overlay name")]
    NameClash(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("{file}:{line}: {msg}")]
    Load { file: String, line: usize, msg: String },
    #[error("objective system: {0}")]
    Objectives(String),
    #[error("play is not classified by any objective of player {player}: {play}")]
    Unclassified { player: u32, play: String },
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("axiom {axiom}: {msg}")]
    AxiomShape { axiom: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
