use serde::{Deserialize, Serialize};

use super::scripts::{minimal_script, reference_eval};
use crate::env::{run_eval_function, Action, EvalFunction, EventLog};
use crate::error::{Error, Result};
use crate::model::Subtask;
use crate::template::Parameters;

/// Proposes a trajectory for a subtask given the failure messages so far.
pub trait TrajectorySynthesizer {
    fn synthesize(
        &mut self,
        subtask: &Subtask,
        params: &Parameters,
        feedback: &[String],
    ) -> Result<Vec<Action>>;
}

/// Proposes an evaluation function for a subtask given the failure messages so far.
pub trait EvalSynthesizer {
    fn synthesize(
        &mut self,
        subtask: &Subtask,
        params: &Parameters,
        feedback: &[String],
    ) -> Result<EvalFunction>;
}

/// Always returns [`reference_eval`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceEvalSynthesizer;

impl EvalSynthesizer for ReferenceEvalSynthesizer {
    fn synthesize(
        &mut self,
        subtask: &Subtask,
        params: &Parameters,
        _: &[String],
    ) -> Result<EvalFunction> {
        reference_eval(subtask, params)
    }
}

/// Always returns the minimal script for [`reference_eval`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceTrajectorySynthesizer;

impl TrajectorySynthesizer for ReferenceTrajectorySynthesizer {
    fn synthesize(
        &mut self,
        subtask: &Subtask,
        params: &Parameters,
        _: &[String],
    ) -> Result<Vec<Action>> {
        minimal_script(&reference_eval(subtask, params)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationStatus {
    Verified,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub iterations: usize,
    pub status: VerificationStatus,
    /// Failure message of each unsuccessful iteration, in order.
    pub transcript: Vec<String>,
    pub trajectory: Vec<Action>,
    pub eval_function: EvalFunction,
}

/// Alternates trajectory and evaluation-function synthesis until the
/// candidate trajectory passes the candidate function, feeding each failure
/// message back to both synthesizers.
pub fn cross_verify(
    trajectories: &mut dyn TrajectorySynthesizer,
    evals: &mut dyn EvalSynthesizer,
    subtask: &Subtask,
    params: &Parameters,
    max_iters: usize,
) -> Result<VerificationOutcome> {
    if max_iters == 0 {
        return Err(Error::InvalidConstraint(
            "max_iters must be positive".into(),
        ));
    }
    let mut transcript = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let trajectory = trajectories.synthesize(subtask, params, &transcript)?;
        let function = evals.synthesize(subtask, params, &transcript)?;
        function
            .validate()
            .map_err(|e| Error::Synthesis(format!("evaluation function: {e}")))?;
        let log = EventLog::from_actions(trajectory.iter().cloned())
            .map_err(|e| Error::Synthesis(format!("trajectory: {e}")))?;
        let result = run_eval_function(&function, &log)?;
        let status = if result.success {
            VerificationStatus::Verified
        } else {
            transcript.push(result.message);
            if iterations < max_iters {
                continue;
            }
            VerificationStatus::Exhausted
        };
        return Ok(VerificationOutcome {
            iterations,
            status,
            transcript,
            trajectory,
            eval_function: function,
        });
    }
}

/// True iff `function` fails on every foreign log.
pub fn discriminative_check(function: &EvalFunction, foreign: &[EventLog]) -> Result<bool> {
    if foreign.len() < 3 {
        return Err(Error::TooFewForeignLogs(foreign.len()));
    }
    for log in foreign {
        if run_eval_function(function, log)?.success {
            return Ok(false);
        }
    }
    Ok(true)
}
