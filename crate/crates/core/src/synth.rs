//! Seeded synthetic workloads: random DAGs and subtask pools.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexity::Applications;
use crate::composer::{EnvironmentManifest, IntentGroup, SubtaskPool};
use crate::error::Result;
use crate::model::{Subtask, TaskGraph};
use crate::registry::AppCategoryRegistry;

/// A random DAG on `n` nodes: each forward pair (in a hidden random order) is
/// an edge with probability `edge_prob`. Node ids are `n00`, `n01`, ...
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, edge_prob: f64) -> TaskGraph {
    let mut labels: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
    labels.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    let mut nodes = labels;
    nodes.sort();
    TaskGraph::from_edges(nodes, edges)
}

/// Assigns each node an application drawn from `apps`.
pub fn random_apps<R: Rng>(rng: &mut R, graph: &TaskGraph, apps: &[&str]) -> Applications {
    graph
        .nodes
        .iter()
        .map(|id| {
            (
                id.clone(),
                apps.choose(rng).expect("non-empty app list").to_string(),
            )
        })
        .collect()
}

/// A subtask pool of independent intent groups with resource-driven structure.
#[derive(Clone, Debug)]
pub struct SyntheticPool {
    pub pool: SubtaskPool,
    pub groups: Vec<IntentGroup>,
    pub environment: EnvironmentManifest,
    pub registry: AppCategoryRegistry,
}

/// Builds `groups` groups of `group_size` subtasks each. Within a group,
/// subtask `i` outputs `g<g>_r<i>` and consumes the outputs of a random set of
/// earlier subtasks, so resource matching over the whole group recreates a
/// random DAG. Every subtask has one parameter and a unique instruction.
pub fn synthetic_pool(
    seed: u64,
    groups: usize,
    group_size: usize,
    edge_prob: f64,
) -> Result<SyntheticPool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = AppCategoryRegistry::default();
    let all_apps: Vec<&str> = registry.applications().map(|(app, _)| app).collect();
    let mut subtasks = Vec::new();
    let mut intent_groups = Vec::new();
    for g in 0..groups {
        let apps: Vec<&str> = all_apps.choose_multiple(&mut rng, 3).copied().collect();
        let mut members = Vec::new();
        for i in 0..group_size {
            let inputs = (0..i)
                .filter(|_| rng.random_bool(edge_prob))
                .map(|p| format!("g{g}_r{p}"))
                .collect();
            let id = format!("g{g:02}s{i:02}");
            subtasks.push(Subtask {
                id: id.clone(),
                instruction_template: format!("Process item {i} of batch {g} using '{{file}}'"),
                application: apps.choose(&mut rng).expect("three apps").to_string(),
                available_parameters: vec![[(
                    "file".to_string(),
                    format!("C:\\data\\b{g}_{i}.txt"),
                )]
                .into()],
                os: "Windows".into(),
                input_resources: inputs,
                output_resources: vec![format!("g{g}_r{i}")],
            });
            members.push(id);
        }
        intent_groups.push(IntentGroup::new(format!("batch {g} workflow"), members));
    }
    Ok(SyntheticPool {
        pool: SubtaskPool::new(subtasks)?,
        groups: intent_groups,
        environment: EnvironmentManifest::default(),
        registry,
    })
}
