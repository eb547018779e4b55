use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::instruction::{node_texts, ConnectiveGrammar, InstructionSummarizer};
use super::pool::{EnvironmentManifest, IntentGroup, SubtaskPool};
use super::wiring::wire_edges;
use crate::complexity::{classify_with, ComplexityProfile, Dimension, Level, Thresholds};
use crate::error::{Error, Result};
use crate::model::{Subtask, TaskGraph, ENUMERATION_CAP};
use crate::registry::AppCategoryRegistry;

pub const DEFAULT_BUDGET: usize = 10_000;

/// Required levels and size bounds for a composed task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionConstraint {
    pub levels: BTreeMap<Dimension, Level>,
    pub min_nodes: usize,
    pub max_nodes: Option<usize>,
    pub seed: u64,
    /// Maximum member subsets examined.
    pub budget: usize,
}

impl Default for CompositionConstraint {
    fn default() -> Self {
        Self {
            levels: BTreeMap::new(),
            min_nodes: 1,
            max_nodes: None,
            seed: 0,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl CompositionConstraint {
    pub fn require(mut self, dim: Dimension, level: Level) -> Self {
        self.levels.insert(dim, level);
        self
    }

    pub fn nodes(mut self, min: usize, max: Option<usize>) -> Self {
        self.min_nodes = min;
        self.max_nodes = max;
        self
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_nodes == 0 {
            return Err(Error::InvalidConstraint(
                "min_nodes must be at least 1".into(),
            ));
        }
        if let Some(max) = self.max_nodes {
            if max < self.min_nodes {
                return Err(Error::InvalidConstraint(format!(
                    "min_nodes {} exceeds max_nodes {max}",
                    self.min_nodes
                )));
            }
        }
        Ok(())
    }
}

/// Total number of level steps between `profile` and the required levels.
fn level_gap(profile: &ComplexityProfile, required: &BTreeMap<Dimension, Level>) -> usize {
    required
        .iter()
        .map(|(dim, level)| {
            (profile.get(*dim).level as i32 - *level as i32).unsigned_abs() as usize
        })
        .sum()
}

/// Bottom-up task synthesis over a subtask pool.
pub struct Composer<'a> {
    pub pool: &'a SubtaskPool,
    pub registry: &'a AppCategoryRegistry,
    pub environment: &'a EnvironmentManifest,
    pub thresholds: Thresholds,
    pub enumeration_cap: usize,
    pub summarizer: &'a dyn InstructionSummarizer,
}

impl<'a> Composer<'a> {
    pub fn new(
        pool: &'a SubtaskPool,
        registry: &'a AppCategoryRegistry,
        environment: &'a EnvironmentManifest,
    ) -> Self {
        Self {
            pool,
            registry,
            environment,
            thresholds: Thresholds::default(),
            enumeration_cap: ENUMERATION_CAP,
            summarizer: &ConnectiveGrammar,
        }
    }

    /// Finds a member subset whose wiring satisfies `constraint`.
    ///
    /// Subsets are tried from largest to smallest; within a size, in
    /// lexicographic order over a seed-shuffled member list. The first match wins.
    pub fn compose(
        &self,
        group: &IntentGroup,
        constraint: &CompositionConstraint,
    ) -> Result<TaskGraph> {
        constraint.validate()?;
        group.validate(self.pool)?;
        let mut members: Vec<&Subtask> = group
            .members
            .iter()
            .map(|id| self.pool.get(id))
            .collect::<Result<_>>()?;
        members.sort_by(|a, b| a.id.cmp(&b.id));
        members.shuffle(&mut ChaCha8Rng::seed_from_u64(constraint.seed));

        let apps = self.pool.applications();
        let largest = constraint
            .max_nodes
            .unwrap_or(members.len())
            .min(members.len());
        let mut candidates = 0;
        let mut closest: Option<((usize, usize), ComplexityProfile)> = None;
        'sizes: for size in (constraint.min_nodes..=largest).rev() {
            for subset in members.iter().copied().combinations(size) {
                if candidates == constraint.budget {
                    break 'sizes;
                }
                candidates += 1;
                let Ok(edges) = wire_edges(&subset, self.environment) else {
                    continue;
                };
                let mut ids: Vec<&str> = subset.iter().map(|s| s.id.as_str()).collect();
                ids.sort_unstable();
                let graph =
                    TaskGraph::from_edges(ids, edges.iter().map(|(a, b)| (a.as_str(), b.as_str())));
                let profile = classify_with(&graph, &apps, self.registry, &self.thresholds)?;
                let misses = profile.violations(&constraint.levels);
                if misses == 0 {
                    return self.finish(graph, group);
                }
                let distance = (misses, level_gap(&profile, &constraint.levels));
                if closest.as_ref().is_none_or(|(best, _)| distance < *best) {
                    closest = Some((distance, profile));
                }
            }
        }
        Err(Error::Infeasible {
            candidates,
            closest: closest.map(|(_, p)| Box::new(p)),
        })
    }

    fn finish(&self, mut graph: TaskGraph, group: &IntentGroup) -> Result<TaskGraph> {
        let topo = graph.topology()?;
        graph.successful_topo = if topo.len() <= self.enumeration_cap {
            graph.all_topological_orders(self.enumeration_cap)?
        } else {
            vec![topo.ids_of(&topo.canonical_order())]
        };
        let texts = node_texts(&graph, self.pool, &BTreeMap::new())?;
        graph.instruction = self.summarizer.summarize(&graph, &texts)?;
        graph.intent = group.intent.clone();
        Ok(graph)
    }
}
