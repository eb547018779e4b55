//! Bottom-up task composition from a subtask pool.

mod compose;
mod instruction;
mod pool;
mod wiring;

pub use compose::{Composer, CompositionConstraint, DEFAULT_BUDGET};
pub use instruction::{
    infer_dependencies, node_texts, normalize_text, render_instruction, render_linearized,
    validate_consistency, validate_consistency_with, ConnectiveGrammar, ConsistencyReport,
    DependencyInferrer, InferredStructure, InstructionSummarizer, NodeTexts,
};
pub use pool::{
    EnvironmentManifest, IntentExtractor, IntentGroup, ResourceChainGrouping, SubtaskPool,
};
pub use wiring::{wire_edges, EdgeSet};
