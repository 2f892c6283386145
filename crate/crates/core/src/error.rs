use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Enrich(#[from] EnrichError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("configuration rejected: {0}")]
    Invalid(String),
    #[error("cannot read configuration: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: frontmatter has no `name` key")]
    MissingFrontmatterName { path: PathBuf },
    #[error("{path}: malformed frontmatter: {reason}")]
    MalformedFrontmatter { path: PathBuf, reason: String },
    #[error("{path}: cannot read document: {source}")]
    UnreadableDocument {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("snippet budget {0} is below the minimum of 64 characters")]
    BudgetTooSmall(usize),
}

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error("provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("provider response violates schema: {0}")]
    SchemaViolation(String),
    #[error("query is empty")]
    EmptyQuery,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("duplicate skill id `{0}`")]
    DuplicateSkillId(String),
    #[error("edge {from} -> {to} references an unknown node")]
    DanglingEdge { from: String, to: String },
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("edge {from} -> {to} has non-positive weight {weight}")]
    NonPositiveWeight {
        from: String,
        to: String,
        weight: f64,
    },
    #[error("duplicate {relation} edge {from} -> {to}")]
    DuplicateEdge {
        from: String,
        to: String,
        relation: String,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("index is empty")]
    EmptyIndex,
    #[error("embedding dimension mismatch: index has {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("workspace format `{found}` does not match `{expected}`")]
    VersionMismatch { found: String, expected: String },
    #[error("corrupt workspace: {0}")]
    CorruptManifest(String),
    #[error("workspace I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Error, PartialEq)]
pub enum RetrievalError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("index is empty")]
    EmptyIndex,
    #[error("no seed candidate has a positive score")]
    NoCandidates,
    #[error("diffusion did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("unknown skill id `{0}`")]
    UnknownId(String),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid synthetic spec: {0}")]
    SpecInvalid(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
}
