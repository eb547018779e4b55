use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scripts::minimal_script;
use crate::complexity::Applications;
use crate::env::{Action, EvalFunction, EventLog};
use crate::error::{Error, Result};
use crate::evaluator::{EvaluationRun, MetricsReport, NodeState};
use crate::model::{NodeId, TaskGraph};

/// Control text emitted by a noisy agent in place of the intended one.
pub const WRONG_CONTROL: &str = "<wrong control>";

/// How a scripted agent orders and perturbs its per-subtask scripts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum Policy {
    /// Runs scripts in the given order, which must be a known-good order.
    Perfect { order: Vec<NodeId> },
    /// Follows the first known-good order; each action is, with probability
    /// `p_fail`, sent to the wrong control. Unfinished subtasks are retried.
    Noisy { p_fail: f64, seed: u64 },
    /// Picks a uniformly random ready subtask each time.
    Shuffled { seed: u64 },
    /// Never does anything useful.
    Stall,
}

impl Policy {
    /// `Perfect` over the graph's first known-good order (or canonical order).
    pub fn perfect_for(graph: &TaskGraph) -> Result<Self> {
        Ok(Policy::Perfect {
            order: default_order(graph)?,
        })
    }
}

fn default_order(graph: &TaskGraph) -> Result<Vec<NodeId>> {
    match graph.successful_topo.first() {
        Some(order) => Ok(order.clone()),
        None => {
            let topo = graph.topology()?;
            Ok(topo.ids_of(&topo.canonical_order()))
        }
    }
}

/// A rule-based stand-in for a GUI agent.
#[derive(Clone, Debug)]
pub struct ScriptedAgent {
    policy: Policy,
    scripts: BTreeMap<NodeId, Vec<Action>>,
    rng: ChaCha8Rng,
    order: Vec<NodeId>,
    queue: VecDeque<Action>,
}

impl ScriptedAgent {
    pub fn new(policy: Policy, scripts: BTreeMap<NodeId, Vec<Action>>) -> Result<Self> {
        let seed = match &policy {
            Policy::Noisy { p_fail, seed } => {
                if !(0.0..=1.0).contains(p_fail) {
                    return Err(Error::InvalidConstraint(format!(
                        "p_fail {p_fail} is not in [0, 1]"
                    )));
                }
                *seed
            }
            Policy::Shuffled { seed } => *seed,
            Policy::Perfect { .. } | Policy::Stall => 0,
        };
        Ok(Self {
            policy,
            scripts,
            rng: ChaCha8Rng::seed_from_u64(seed),
            order: Vec::new(),
            queue: VecDeque::new(),
        })
    }

    /// Scripts derived from each binding with [`minimal_script`].
    pub fn from_bindings(
        policy: Policy,
        bindings: &BTreeMap<NodeId, EvalFunction>,
    ) -> Result<Self> {
        let scripts = bindings
            .iter()
            .map(|(id, f)| Ok((id.clone(), minimal_script(f)?)))
            .collect::<Result<_>>()?;
        Self::new(policy, scripts)
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    fn script(&self, id: &str) -> Result<&[Action]> {
        self.scripts
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingScript(id.to_string()))
    }

    /// Resolves the execution order for `graph` and loads the first actions.
    pub fn start(&mut self, graph: &TaskGraph) -> Result<()> {
        for id in &graph.nodes {
            self.script(id)?;
        }
        self.queue.clear();
        self.order = match &self.policy {
            Policy::Perfect { order } => {
                let known = if graph.successful_topo.is_empty() {
                    graph.topology()?.check_order(order, true).is_ok()
                } else {
                    graph.successful_topo.contains(order)
                };
                if !known {
                    return Err(Error::SequenceViolation(format!(
                        "{order:?} is not a known-good order of the task"
                    )));
                }
                order.clone()
            }
            Policy::Noisy { .. } => default_order(graph)?,
            Policy::Shuffled { .. } => self.random_linear_extension(graph)?,
            Policy::Stall => Vec::new(),
        };
        self.enqueue(self.order.clone())
    }

    fn random_linear_extension(&mut self, graph: &TaskGraph) -> Result<Vec<NodeId>> {
        let topo = graph.topology()?;
        let mut indegree: Vec<usize> = (0..topo.len()).map(|v| topo.preds(v).len()).collect();
        let mut ready: Vec<usize> = (0..topo.len()).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(topo.len());
        while !ready.is_empty() {
            let v = ready.swap_remove(self.rng.random_range(0..ready.len()));
            order.push(v);
            for &s in topo.succs(v) {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push(s);
                }
            }
            ready.sort_unstable();
        }
        Ok(topo.ids_of(&order))
    }

    fn enqueue(&mut self, ids: Vec<NodeId>) -> Result<()> {
        for id in ids {
            let script = self.script(&id)?.to_vec();
            for action in script {
                let action = match self.policy {
                    Policy::Noisy { p_fail, .. } if self.rng.random_bool(p_fail) => {
                        let mut wrong = action;
                        wrong.control_text = Some(WRONG_CONTROL.to_string());
                        wrong.effects.clear();
                        wrong
                    }
                    _ => action,
                };
                self.queue.push_back(action);
            }
        }
        Ok(())
    }

    /// The next action, or `None` when the agent has nothing left to try.
    pub fn next_action(&mut self, run: &EvaluationRun) -> Result<Option<Action>> {
        if let Policy::Stall = self.policy {
            return Ok(Some(Action::click_with("left", false)));
        }
        if self.queue.is_empty() {
            if let Policy::Noisy { .. } = self.policy {
                let mut retry = Vec::new();
                for id in &self.order {
                    if run.state(id)? != NodeState::Completed {
                        retry.push(id.clone());
                    }
                }
                self.enqueue(retry)?;
            }
        }
        Ok(self.queue.pop_front())
    }
}

/// Everything produced by one driven run.
#[derive(Clone, Debug)]
pub struct TaskOutcome {
    pub report: MetricsReport,
    pub log: EventLog,
}

/// Drives `agent` against a fresh evaluation run until it succeeds, fails,
/// or the agent gives up. The action match score compares against the
/// perfect-agent trajectory over the graph's first known-good order.
pub fn run_task(
    agent: &mut ScriptedAgent,
    graph: &TaskGraph,
    bindings: &BTreeMap<NodeId, EvalFunction>,
    apps: &Applications,
    max_steps: usize,
) -> Result<TaskOutcome> {
    let mut run = EvaluationRun::new(graph, bindings, max_steps)?;
    agent.start(graph)?;
    let mut reference = Vec::new();
    for id in default_order(graph)? {
        reference.extend_from_slice(agent.script(&id)?);
    }

    let mut log = EventLog::new();
    while !run.is_terminated() {
        match agent.next_action(&run)? {
            Some(action) => {
                run.step(action, &mut log)?;
            }
            None => run.abort("agent stopped acting"),
        }
    }
    let report = run.report(apps, &log, Some(&reference))?;
    Ok(TaskOutcome { report, log })
}
