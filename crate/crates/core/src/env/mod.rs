//! Simulated execution environment: event log, check APIs, evaluation functions.

mod action;
pub mod checks;
mod eval;
mod log;

pub use action::{Action, ActionKind, Effect};
pub use checks::CheckApi;
pub use eval::{run_eval_function, Check, EvalFunction, EvalResult, Progress, SUCCESS_MESSAGE};
pub use log::{EnvFacts, EventLog};
