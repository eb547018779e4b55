use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde_json::{json, Value};

use super::metrics::{action_match_score, coverage_of, logical_consistency};
use crate::complexity::Applications;
use crate::env::{run_eval_function, Action, EvalFunction, EventLog};
use crate::error::{Error, Result};
use crate::model::{NodeId, TaskGraph, Topology};

/// Actions allowed without any completion before the run fails.
pub const DEFAULT_MAX_STEPS: usize = 15;

pub const BUDGET_EXHAUSTED: &str = "step budget exhausted";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeState {
    Waiting,
    Evaluating,
    Completed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Running,
    Succeeded,
    Failed(String),
}

/// Graph-based evaluator for one task.
///
/// Roots start Evaluating. After every action each Evaluating node runs its
/// evaluation function against the log; passing nodes complete and any
/// successor whose predecessors are all complete starts Evaluating, and is
/// itself evaluated against the same log. Simultaneous completions are
/// recorded in id order.
#[derive(Clone, Debug)]
pub struct EvaluationRun {
    graph: TaskGraph,
    topo: Topology,
    states: Vec<NodeState>,
    bindings: Vec<EvalFunction>,
    max_steps: usize,
    steps_since_completion: usize,
    steps_used: usize,
    completion_order: Vec<usize>,
    status: RunStatus,
}

impl EvaluationRun {
    pub fn new(
        graph: &TaskGraph,
        bindings: &BTreeMap<NodeId, EvalFunction>,
        max_steps: usize,
    ) -> Result<Self> {
        let topo = graph.topology()?;
        if max_steps == 0 {
            return Err(Error::InvalidConstraint(
                "max_steps must be positive".into(),
            ));
        }
        let bindings = topo
            .ids()
            .iter()
            .map(|id| {
                let f = bindings
                    .get(id)
                    .ok_or_else(|| Error::MissingBinding(id.clone()))?;
                f.validate()?;
                Ok(f.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let states = (0..topo.len())
            .map(|v| {
                if topo.preds(v).is_empty() {
                    NodeState::Evaluating
                } else {
                    NodeState::Waiting
                }
            })
            .collect();
        let status = if topo.is_empty() {
            RunStatus::Succeeded
        } else {
            RunStatus::Running
        };
        Ok(Self {
            graph: graph.clone(),
            topo,
            states,
            bindings,
            max_steps,
            steps_since_completion: 0,
            steps_used: 0,
            completion_order: Vec::new(),
            status,
        })
    }

    /// Applies one agent action and returns the ids completed by it.
    pub fn step(&mut self, action: Action, log: &mut EventLog) -> Result<Vec<NodeId>> {
        if self.status != RunStatus::Running {
            return Err(Error::RunTerminated);
        }
        log.append(action)?;
        self.steps_used += 1;

        let mut completed_now = Vec::new();
        loop {
            let mut round = Vec::new();
            for v in 0..self.states.len() {
                if self.states[v] == NodeState::Evaluating
                    && run_eval_function(&self.bindings[v], log)?.success
                {
                    round.push(v);
                }
            }
            if round.is_empty() {
                break;
            }
            for &v in &round {
                self.states[v] = NodeState::Completed;
                self.completion_order.push(v);
            }
            for &v in &round {
                for &s in self.topo.succs(v) {
                    if self.states[s] == NodeState::Waiting
                        && self
                            .topo
                            .preds(s)
                            .iter()
                            .all(|&p| self.states[p] == NodeState::Completed)
                    {
                        self.states[s] = NodeState::Evaluating;
                    }
                }
            }
            completed_now.extend(round);
        }

        if completed_now.is_empty() {
            self.steps_since_completion += 1;
            if self.steps_since_completion >= self.max_steps {
                self.status = RunStatus::Failed(BUDGET_EXHAUSTED.to_string());
            }
        } else {
            self.steps_since_completion = 0;
            if self.completion_order.len() == self.topo.len() {
                self.status = RunStatus::Succeeded;
            }
        }
        Ok(self.topo.ids_of(&completed_now))
    }

    /// Ends a still-running run as failed, e.g. when the agent stops acting.
    pub fn abort(&mut self, reason: impl Into<String>) {
        if self.status == RunStatus::Running {
            self.status = RunStatus::Failed(reason.into());
        }
    }

    pub fn status(&self) -> &RunStatus {
        &self.status
    }

    pub fn is_terminated(&self) -> bool {
        self.status != RunStatus::Running
    }

    pub fn state(&self, id: &str) -> Result<NodeState> {
        Ok(self.states[self.topo.index_of(id)?])
    }

    pub fn nodes_in(&self, state: NodeState) -> Vec<NodeId> {
        (0..self.states.len())
            .filter(|&v| self.states[v] == state)
            .map(|v| self.topo.id(v).to_string())
            .collect()
    }

    pub fn completion_order(&self) -> Vec<NodeId> {
        self.topo.ids_of(&self.completion_order)
    }

    pub fn steps_used(&self) -> usize {
        self.steps_used
    }

    pub fn steps_since_completion(&self) -> usize {
        self.steps_since_completion
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn graph(&self) -> &TaskGraph {
        &self.graph
    }

    pub fn coverage_rate(&self) -> Ratio<u64> {
        coverage_of(
            &self.topo,
            &self
                .completion_order
                .iter()
                .copied()
                .collect::<BTreeSet<_>>(),
        )
    }

    /// Metrics for the run so far. `reference` enables the action match score.
    pub fn report(
        &self,
        apps: &Applications,
        log: &EventLog,
        reference: Option<&[Action]>,
    ) -> Result<MetricsReport> {
        let order = self.completion_order();
        Ok(MetricsReport {
            cr: self.coverage_rate(),
            lc: logical_consistency(&self.graph, &order, apps)?,
            sr: self.status == RunStatus::Succeeded,
            ams: reference.map(|r| action_match_score(log.actions(), r)),
            steps_used: self.steps_used,
            failure_reason: match &self.status {
                RunStatus::Failed(reason) => Some(reason.clone()),
                _ => None,
            },
            completion_order: order,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricsReport {
    pub cr: Ratio<u64>,
    pub lc: Ratio<u64>,
    pub sr: bool,
    /// Present when a reference trajectory was supplied.
    pub ams: Option<Ratio<u64>>,
    pub steps_used: usize,
    pub failure_reason: Option<String>,
    pub completion_order: Vec<NodeId>,
}

pub(crate) fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl MetricsReport {
    /// JSON form: each metric as a float plus its exact fraction string.
    pub fn to_json(&self) -> Value {
        json!({
            "cr": ratio_f64(&self.cr),
            "cr_fraction": self.cr.to_string(),
            "lc": ratio_f64(&self.lc),
            "lc_fraction": self.lc.to_string(),
            "sr": self.sr,
            "ams": self.ams.as_ref().map(ratio_f64),
            "ams_fraction": self.ams.as_ref().map(ToString::to_string),
            "steps_used": self.steps_used,
            "failure_reason": self.failure_reason,
            "completion_order": self.completion_order,
        })
    }
}
