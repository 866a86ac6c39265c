use thiserror::Error;

/// Errors surfaced by construction routines across the pipeline.
///
/// Verification suites never return these for lemma violations; those are
/// collected into reports instead.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("metric violation: {0}")]
    Metric(#[from] MetricViolation),

    #[error("trivial space: {0}")]
    TrivialSpace(String),

    #[error("invalid scale parameters: {0}")]
    Scale(String),

    #[error("invalid graph query: {0}")]
    Graph(String),

    #[error("covering validation failed: {0}")]
    Covering(String),

    #[error("tree construction failed: {0}")]
    Tree(String),

    #[error("embedding failed: {0}")]
    Embedding(String),

    #[error("diary error: {0}")]
    Diary(#[from] DiaryError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<Error> },
}

impl Error {
    /// Tags the error with the pipeline stage that raised it.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// The error without stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

/// First violation found by the metric validator, naming the offending points.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricViolation {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    Shape { row: usize, len: usize, expected: usize },
    #[error("nonzero diagonal at point {0}")]
    Diagonal(usize),
    #[error("negative distance between {0} and {1}")]
    Negative(usize, usize),
    #[error("zero distance between distinct points {0} and {1}")]
    Coincident(usize, usize),
    #[error("asymmetric distance between {0} and {1}")]
    Asymmetric(usize, usize),
    #[error("triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})")]
    Triangle { a: usize, b: usize, c: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiaryError {
    #[error("sentence must be empty or end with a stop sign")]
    Unterminated,
    #[error("diary constant must be at least 1")]
    ZeroKappa,
    #[error("page {page} has an invalid shape for kappa {kappa}")]
    PageShape { page: usize, kappa: usize },
    #[error("page {page} contradicts the pages before it")]
    Inconsistent { page: usize },
    #[error("slotted sentence has {expected} slots but {given} fillings were given")]
    Arity { expected: usize, given: usize },
    #[error("cannot parse token {0:?}")]
    Token(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
