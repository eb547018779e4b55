//! Graph-based evaluation: the node state machine and task-level metrics.

mod metrics;
mod run;

pub use metrics::{
    action_match_score, coherency_score, coverage_rate, logical_consistency, max_coherency,
    sensitivity, sensitivity_with, Deviation, COHERENCY_LIMIT,
};
pub(crate) use run::ratio_f64;
pub use run::{
    EvaluationRun, MetricsReport, NodeState, RunStatus, BUDGET_EXHAUSTED, DEFAULT_MAX_STEPS,
};
