//! On-disk record shapes. Key names follow the released dataset exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env::{Action, EvalFunction};
use crate::model::{NodeId, TaskGraph};

pub const SUBTASK_KEYS: &[&str] = &[
    "id",
    "instruction_template",
    "application",
    "available_parameters",
    "OS",
    "input_resources",
    "output_resources",
];

pub const TASK_KEYS: &[&str] = &["task_instruction", "dag", "task_intent", "successful_topo"];

pub const SUBTASK_TRAJECTORY_KEYS: &[&str] = &[
    "trajectory_id",
    "instruction",
    "observations",
    "actions",
    "subtask_id",
];

pub const TASK_TRAJECTORY_KEYS: &[&str] = &[
    "trajectory_id",
    "task_id",
    "topological_order",
    "instruction",
    "intent",
    "observations",
    "actions",
];

pub const EVAL_KEYS: &[&str] = &["subtask_id", "checks"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagRecord {
    pub nodes: Vec<NodeId>,
    pub edges: BTreeMap<NodeId, Vec<NodeId>>,
}

/// Task metadata file. The task id is the file stem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_instruction: String,
    pub dag: DagRecord,
    pub task_intent: String,
    pub successful_topo: Vec<Vec<NodeId>>,
}

impl From<&TaskGraph> for TaskRecord {
    fn from(g: &TaskGraph) -> Self {
        Self {
            task_instruction: g.instruction.clone(),
            dag: DagRecord {
                nodes: g.nodes.clone(),
                edges: g.edges.clone(),
            },
            task_intent: g.intent.clone(),
            successful_topo: g.successful_topo.clone(),
        }
    }
}

impl From<TaskRecord> for TaskGraph {
    fn from(r: TaskRecord) -> Self {
        let mut g = TaskGraph::new(r.dag.nodes, r.dag.edges);
        g.instruction = r.task_instruction;
        g.intent = r.task_intent;
        g.successful_topo = r.successful_topo;
        g
    }
}

/// Recorded execution of one subtask. Observations are opaque screenshot names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtaskTrajectory {
    pub trajectory_id: String,
    pub instruction: String,
    pub observations: Vec<String>,
    pub actions: Vec<Action>,
    pub subtask_id: String,
}

/// Recorded execution of a whole task along one topological order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskTrajectory {
    pub trajectory_id: String,
    pub task_id: String,
    pub topological_order: Vec<NodeId>,
    pub instruction: String,
    pub intent: String,
    pub observations: Vec<String>,
    pub actions: Vec<Action>,
}

/// Declarative evaluation function bound to a subtask. Check arguments and
/// messages may contain `{placeholder}`s filled from the subtask's parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub subtask_id: String,
    pub checks: EvalFunction,
}
