use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What went wrong on a line of an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseProblem {
    SelfLoop,
    Malformed,
}

impl fmt::Display for ParseProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseProblem::SelfLoop => f.write_str("self-loop"),
            ParseProblem::Malformed => f.write_str("malformed line (expected two node ids)"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{problem} at line {line}")]
    Parse { line: usize, problem: ParseProblem },

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The observed graph cannot support the requested fit or statistic.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),

    /// A closed-form cutoff is undefined for the given parameters.
    #[error("cutoff undefined: {0}")]
    CutoffUndefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
