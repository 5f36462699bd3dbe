use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index must be at least 1, got {0}")]
    ZeroIndex(u64),

    #[error("the root node has no parent")]
    RootHasNoParent,

    #[error("node index overflow below node {0}")]
    IndexOverflow(u64),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("a dataset must contain at least one tree")]
    EmptyDataset,

    #[error("invalid tree-line: {0}")]
    InvalidTreeLine(String),

    #[error("tree-lines must share a common starting tree")]
    CommonStartRequired,

    #[error("starting tree is not contained in the support tree (node {0} missing)")]
    StartNotInSupport(u64),

    #[error("node {0} is not part of the support tree")]
    NotInSupport(u64),

    #[error("support tree has {nodes} nodes, exhaustive oracle accepts at most {limit}")]
    OracleCapacity { nodes: usize, limit: usize },

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("node `{id}` has {children} children, only binary trees are supported")]
    NonBinary { id: String, children: usize },

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("covariate has zero variance")]
    NoVariance,

    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("no tree carries covariate `{0}`")]
    MissingCovariate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid dataset file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag, used for the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroIndex(_) | Error::IndexOverflow(_) => "invalid-index",
            Error::RootHasNoParent => "root-has-no-parent",
            Error::InvalidTree(_) => "invalid-tree",
            Error::EmptyDataset => "empty-dataset",
            Error::InvalidTreeLine(_) => "invalid-tree-line",
            Error::CommonStartRequired => "common-start-required",
            Error::StartNotInSupport(_) | Error::NotInSupport(_) => "containment",
            Error::OracleCapacity { .. } => "oracle-capacity",
            Error::UnknownNode(_) => "unknown-node",
            Error::NonBinary { .. } => "non-binary-input",
            Error::MalformedTree(_) => "malformed-tree",
            Error::NoVariance => "no-variance",
            Error::InsufficientData { .. } => "insufficient-data",
            Error::MissingCovariate(_) => "missing-covariate",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Format(_) => "invalid-format",
            Error::Io(_) => "io",
            Error::Json(_) => "invalid-json",
            Error::Csv(_) => "csv",
        }
    }
}
