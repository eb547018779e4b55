//! Seeded workloads shared by the benchmarks.

use std::collections::BTreeMap;

use dagbench::env::{Check, EvalFunction};
use dagbench::synth::{random_apps, random_dag, synthetic_pool, SyntheticPool};
use dagbench::{Applications, NodeId, TaskGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 7;

/// A random DAG of `n` nodes with applications drawn from four apps.
pub fn workload(n: usize, edge_prob: f64) -> (TaskGraph, Applications) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + n as u64);
    let graph = random_dag(&mut rng, n, edge_prob);
    let apps = random_apps(&mut rng, &graph, &["Excel", "Word", "Paint", "Spotify"]);
    (graph, apps)
}

/// One click check per node, keyed by node id.
pub fn click_bindings(graph: &TaskGraph) -> BTreeMap<NodeId, EvalFunction> {
    graph
        .nodes
        .iter()
        .map(|v| {
            (
                v.clone(),
                EvalFunction::new(vec![Check::mouse_clicks(v.clone())]),
            )
        })
        .collect()
}

pub fn pool(groups: usize, group_size: usize) -> SyntheticPool {
    synthetic_pool(SEED, groups, group_size, 0.35).expect("synthetic pool")
}
