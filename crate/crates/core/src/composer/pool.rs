use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complexity::Applications;
use crate::error::{Error, Result};
use crate::model::Subtask;

/// Validated subtasks indexed by id, plus who produces each resource category.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubtaskPool {
    subtasks: BTreeMap<String, Subtask>,
    producers: BTreeMap<String, BTreeSet<String>>,
}

impl SubtaskPool {
    pub fn new(subtasks: impl IntoIterator<Item = Subtask>) -> Result<Self> {
        let mut pool = Self::default();
        for subtask in subtasks {
            pool.insert(subtask)?;
        }
        Ok(pool)
    }

    pub fn insert(&mut self, subtask: Subtask) -> Result<()> {
        subtask.validate()?;
        if self.subtasks.contains_key(&subtask.id) {
            return Err(Error::DuplicateSubtask(subtask.id));
        }
        for category in &subtask.output_resources {
            self.producers
                .entry(category.clone())
                .or_default()
                .insert(subtask.id.clone());
        }
        self.subtasks.insert(subtask.id.clone(), subtask);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&Subtask> {
        self.subtasks
            .get(id)
            .ok_or_else(|| Error::UnknownSubtask(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.subtasks.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subtask> {
        self.subtasks.values()
    }

    pub fn len(&self) -> usize {
        self.subtasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subtasks.is_empty()
    }

    /// Ids of every subtask whose outputs include `category`.
    pub fn producers_of(&self, category: &str) -> impl Iterator<Item = &str> {
        self.producers
            .get(category)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn applications(&self) -> Applications {
        self.subtasks
            .values()
            .map(|s| (s.id.clone(), s.application.clone()))
            .collect()
    }
}

/// Resource categories that exist before any subtask runs (e.g. a user's file).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentManifest {
    pub environment_resources: BTreeSet<String>,
}

impl EnvironmentManifest {
    pub fn new(categories: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            environment_resources: categories.into_iter().map(Into::into).collect(),
        }
    }

    pub fn provides(&self, category: &str) -> bool {
        self.environment_resources.contains(category)
    }
}

/// Subtasks sharing one high-level goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentGroup {
    pub intent: String,
    pub members: Vec<String>,
}

impl IntentGroup {
    pub fn new(
        intent: impl Into<String>,
        members: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        Self {
            intent: intent.into(),
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn validate(&self, pool: &SubtaskPool) -> Result<()> {
        let mut seen = BTreeSet::new();
        for id in &self.members {
            if !seen.insert(id) {
                return Err(Error::DuplicateSubtask(id.clone()));
            }
            pool.get(id)?;
        }
        Ok(())
    }
}

/// Partitions a pool into intent groups.
pub trait IntentExtractor {
    fn extract(&self, pool: &SubtaskPool, env: &EnvironmentManifest) -> Vec<IntentGroup>;
}

/// Groups subtasks connected through produced resources (environment-provided
/// categories do not link). Each connected component is one group.
#[derive(Clone, Copy, Debug, Default)]
pub struct ResourceChainGrouping;

impl IntentExtractor for ResourceChainGrouping {
    fn extract(&self, pool: &SubtaskPool, env: &EnvironmentManifest) -> Vec<IntentGroup> {
        let ids: Vec<&str> = pool.iter().map(|s| s.id.as_str()).collect();
        let index = |id: &str| ids.binary_search(&id).expect("pool id");
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn root(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for consumer in pool.iter() {
            for category in &consumer.input_resources {
                if env.provides(category) {
                    continue;
                }
                for producer in pool.producers_of(category) {
                    let (a, b) = (
                        root(&mut parent, index(producer)),
                        root(&mut parent, index(&consumer.id)),
                    );
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut components: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            components
                .entry(root(&mut parent, i))
                .or_default()
                .push(id.to_string());
        }
        components
            .into_values()
            .map(|members| {
                let apps: BTreeSet<&str> = members
                    .iter()
                    .map(|id| pool.get(id).expect("pool id").application.as_str())
                    .collect();
                let apps: Vec<&str> = apps.into_iter().collect();
                IntentGroup::new(format!("{} workflow", apps.join(" and ")), members)
            })
            .collect()
    }
}
