use std::collections::BTreeMap;
use std::thread;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::agent::{run_task, Policy, ScriptedAgent};
use crate::complexity::{classify_with, matches_capability, Applications, ComplexityConfig};
use crate::env::EvalFunction;
use crate::error::Result;
use crate::model::{NodeId, TaskGraph};
use crate::registry::AppCategoryRegistry;

/// Agent policy shared by every task in a batch; seeds are derived per task.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Perfect,
    Noisy,
    Shuffled,
    Stall,
}

#[derive(Clone, Debug)]
pub struct BatchConfig {
    pub policy: PolicyKind,
    pub p_fail: f64,
    pub seed: u64,
    pub max_steps: usize,
    pub threads: usize,
}

impl BatchConfig {
    /// Task `index` runs with seed `seed + index`.
    pub fn policy_for(&self, graph: &TaskGraph, index: usize) -> Result<Policy> {
        let seed = self.seed.wrapping_add(index as u64);
        Ok(match self.policy {
            PolicyKind::Perfect => Policy::perfect_for(graph)?,
            PolicyKind::Noisy => Policy::Noisy {
                p_fail: self.p_fail,
                seed,
            },
            PolicyKind::Shuffled => Policy::Shuffled { seed },
            PolicyKind::Stall => Policy::Stall,
        })
    }
}

/// One line of the results table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultRow {
    pub task_id: String,
    /// Slugs of every capability suite the task belongs to.
    pub capabilities: Vec<String>,
    pub cr: Ratio<u64>,
    pub lc: Ratio<u64>,
    pub sr: bool,
    pub ams: Option<Ratio<u64>>,
    pub steps: usize,
}

/// Shared read-only inputs of a batch.
pub struct BatchContext<'a> {
    pub bindings: &'a BTreeMap<NodeId, EvalFunction>,
    pub apps: &'a Applications,
    pub registry: &'a AppCategoryRegistry,
    pub complexity: &'a ComplexityConfig,
}

fn run_one(
    ctx: &BatchContext<'_>,
    config: &BatchConfig,
    index: usize,
    id: &str,
    graph: &TaskGraph,
) -> Result<ResultRow> {
    let profile = classify_with(graph, ctx.apps, ctx.registry, &ctx.complexity.thresholds)?;
    let capabilities = ctx
        .complexity
        .capabilities
        .iter()
        .filter(|spec| matches_capability(&profile, spec))
        .map(|spec| spec.slug())
        .collect();
    let bindings: BTreeMap<NodeId, EvalFunction> = graph
        .nodes
        .iter()
        .filter_map(|n| ctx.bindings.get(n).map(|f| (n.clone(), f.clone())))
        .collect();
    let mut agent = ScriptedAgent::from_bindings(config.policy_for(graph, index)?, &bindings)?;
    let report = run_task(&mut agent, graph, &bindings, ctx.apps, config.max_steps)?.report;
    Ok(ResultRow {
        task_id: id.to_string(),
        capabilities,
        cr: report.cr,
        lc: report.lc,
        sr: report.sr,
        ams: report.ams,
        steps: report.steps_used,
    })
}

/// Runs every task on its own evaluation run, spread over `config.threads`
/// workers. Rows come back in input order.
pub fn run_batch(
    ctx: &BatchContext<'_>,
    config: &BatchConfig,
    tasks: &[(String, TaskGraph)],
) -> Result<Vec<ResultRow>> {
    let threads = config.threads.clamp(1, tasks.len().max(1));
    let chunk = tasks.len().div_ceil(threads).max(1);
    let results: Vec<Vec<Result<ResultRow>>> = thread::scope(|scope| {
        let handles: Vec<_> = tasks
            .chunks(chunk)
            .enumerate()
            .map(|(c, slice)| {
                scope.spawn(move || {
                    slice
                        .iter()
                        .enumerate()
                        .map(|(i, (id, graph))| run_one(ctx, config, c * chunk + i, id, graph))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("batch worker panicked"))
            .collect()
    });
    results.into_iter().flatten().collect()
}
