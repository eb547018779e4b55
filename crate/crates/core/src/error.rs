use std::path::PathBuf;

use crate::complexity::ComplexityProfile;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("graph is not a DAG: cycle through {0:?}")]
    Cycle(Vec<String>),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph is malformed: {0}")]
    InvalidGraph(String),

    #[error("{nodes} nodes exceeds the enumeration cap of {cap}")]
    EnumerationCap { nodes: usize, cap: usize },

    #[error("{nodes} nodes exceeds the coherency search limit of {limit}")]
    CoherencyLimit { nodes: usize, limit: usize },

    #[error("application `{0}` is not in the category registry")]
    UnregisteredApplication(String),

    #[error("no application recorded for node `{0}`")]
    MissingApplication(String),

    #[error("invalid subtask `{id}`: {reason}")]
    InvalidSubtask { id: String, reason: String },

    #[error("duplicate subtask id `{0}`")]
    DuplicateSubtask(String),

    #[error("unknown subtask `{0}`")]
    UnknownSubtask(String),

    #[error("unsatisfied input: subtask `{subtask}` needs `{category}` and nothing provides it")]
    UnsatisfiedInput { subtask: String, category: String },

    #[error("resource wiring creates a cycle: {0:?}")]
    WiringCycle(Vec<String>),

    #[error("infeasible constraint after {candidates} candidates")]
    Infeasible {
        candidates: usize,
        closest: Option<Box<ComplexityProfile>>,
    },

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("missing parameter `{placeholder}` for node `{node}`")]
    MissingParameter { node: String, placeholder: String },

    #[error("unparseable instruction at byte {offset}: {reason}")]
    UnparseableInstruction { offset: usize, reason: String },

    #[error("unknown check api `{0}`")]
    UnknownApi(String),

    #[error("malformed check `{api}`: {reason}")]
    MalformedCheck { api: String, reason: String },

    #[error("malformed action: {0}")]
    MalformedAction(String),

    #[error("evaluation run already terminated")]
    RunTerminated,

    #[error("node `{0}` has no evaluation function binding")]
    MissingBinding(String),

    #[error("node `{0}` has no action script")]
    MissingScript(String),

    #[error("sequence violates the task graph: {0}")]
    SequenceViolation(String),

    #[error("score list is empty")]
    EmptyScores,

    #[error("discrimination needs at least 3 foreign trajectories, got {0}")]
    TooFewForeignLogs(usize),

    #[error("synthesizer produced a malformed artifact: {0}")]
    Synthesis(String),

    #[error("unknown capability `{0}`")]
    UnknownCapability(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{file}: {message}")]
    Schema { file: PathBuf, message: String },

    #[error("dangling reference: {from} refers to missing {to}")]
    DanglingReference { from: String, to: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
