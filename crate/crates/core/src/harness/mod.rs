//! Scripted agents, batch runs, and trajectory/evaluation cross-verification.

mod agent;
mod batch;
mod scripts;
mod verify;

pub use agent::{run_task, Policy, ScriptedAgent, TaskOutcome, WRONG_CONTROL};
pub use batch::{run_batch, BatchConfig, BatchContext, PolicyKind, ResultRow};
pub use scripts::{minimal_script, reference_eval};
pub use verify::{
    cross_verify, discriminative_check, EvalSynthesizer, ReferenceEvalSynthesizer,
    ReferenceTrajectorySynthesizer, TrajectorySynthesizer, VerificationOutcome, VerificationStatus,
};
