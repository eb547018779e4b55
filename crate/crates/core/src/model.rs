//! Task-graph data model: resources, subtasks, task graphs and their topology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::template::{self, Parameters};

pub type NodeId = String;

/// Default node-count cap for exhaustive linear-extension enumeration.
pub const ENUMERATION_CAP: usize = 12;

/// An environmental resource: a category plus an optional concrete parameter.
///
/// Matching is by category only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Resource {
    category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parameter: Option<String>,
}

impl Resource {
    pub fn new(category: impl Into<String>) -> Result<Self> {
        let category = category.into();
        check_category(&category).map_err(Error::InvalidGraph)?;
        Ok(Self {
            category,
            parameter: None,
        })
    }

    pub fn with_parameter(mut self, parameter: impl Into<String>) -> Self {
        self.parameter = Some(parameter.into());
        self
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    pub fn parameter(&self) -> Option<&str> {
        self.parameter.as_deref()
    }

    pub fn matches(&self, other: &Resource) -> bool {
        self.category == other.category
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.parameter {
            Some(p) => write!(f, "{}={}", self.category, p),
            None => f.write_str(&self.category),
        }
    }
}

fn check_category(category: &str) -> std::result::Result<(), String> {
    if category.is_empty() {
        Err("resource category is empty".into())
    } else if category.chars().any(char::is_whitespace) {
        Err(format!(
            "resource category `{category}` contains whitespace"
        ))
    } else {
        Ok(())
    }
}

/// Subtask metadata. Field names follow the released data format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subtask {
    pub id: String,
    pub instruction_template: String,
    pub application: String,
    pub available_parameters: Vec<Parameters>,
    #[serde(rename = "OS")]
    pub os: String,
    pub input_resources: Vec<String>,
    pub output_resources: Vec<String>,
}

impl Subtask {
    /// Every invariant violation, as readable strings. Empty iff valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.id.is_empty() {
            out.push("id is empty".to_string());
        }
        for (label, list) in [
            ("input_resources", &self.input_resources),
            ("output_resources", &self.output_resources),
        ] {
            let mut seen = BTreeSet::new();
            for category in list {
                if let Err(e) = check_category(category) {
                    out.push(format!("{label}: {e}"));
                }
                if !seen.insert(category) {
                    out.push(format!("{label}: duplicate category `{category}`"));
                }
            }
        }
        let slots = template::placeholders(&self.instruction_template);
        for (i, params) in self.available_parameters.iter().enumerate() {
            for slot in &slots {
                if !params.contains_key(slot) {
                    out.push(format!(
                        "available_parameters[{i}] lacks placeholder `{slot}`"
                    ));
                }
            }
        }
        if self.available_parameters.is_empty() && !slots.is_empty() {
            out.push("template has placeholders but no available_parameters".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.problems().into_iter().next() {
            None => Ok(()),
            Some(reason) => Err(Error::InvalidSubtask {
                id: self.id.clone(),
                reason,
            }),
        }
    }

    /// The parameter set at `index`, or an empty set for parameterless subtasks.
    pub fn parameters(&self, index: usize) -> Parameters {
        self.available_parameters
            .get(index)
            .cloned()
            .unwrap_or_default()
    }

    /// Instantiated instruction text for a parameter set.
    pub fn instruction(&self, params: &Parameters) -> Result<String> {
        template::instantiate(&self.instruction_template, params).map_err(|placeholder| {
            Error::MissingParameter {
                node: self.id.clone(),
                placeholder,
            }
        })
    }

    pub fn inputs(&self) -> impl Iterator<Item = Resource> + '_ {
        self.input_resources.iter().map(|c| Resource {
            category: c.clone(),
            parameter: None,
        })
    }

    pub fn outputs(&self) -> impl Iterator<Item = Resource> + '_ {
        self.output_resources.iter().map(|c| Resource {
            category: c.clone(),
            parameter: None,
        })
    }
}

/// A task: a DAG of subtask ids plus its intent, instruction and known-good orders.
///
/// Construction normalises edges (sorted, duplicates collapsed, one key per node)
/// but does not validate; use [`TaskGraph::validate`] or [`Topology::new`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaskGraph {
    pub nodes: Vec<NodeId>,
    pub edges: BTreeMap<NodeId, Vec<NodeId>>,
    pub intent: String,
    pub instruction: String,
    pub successful_topo: Vec<Vec<NodeId>>,
}

impl TaskGraph {
    pub fn new(nodes: Vec<NodeId>, edges: BTreeMap<NodeId, Vec<NodeId>>) -> Self {
        let mut graph = Self {
            nodes,
            edges,
            ..Self::default()
        };
        graph.normalize();
        graph
    }

    pub fn from_edges<N, E, S>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (a, b) in edges {
            adjacency.entry(a.into()).or_default().push(b.into());
        }
        Self::new(nodes.into_iter().map(Into::into).collect(), adjacency)
    }

    fn normalize(&mut self) {
        for node in &self.nodes {
            self.edges.entry(node.clone()).or_default();
        }
        for succs in self.edges.values_mut() {
            succs.sort();
            succs.dedup();
        }
    }

    pub fn with_intent(mut self, intent: impl Into<String>) -> Self {
        self.intent = intent.into();
        self
    }

    pub fn edge_set(&self) -> BTreeSet<(NodeId, NodeId)> {
        self.edges
            .iter()
            .flat_map(|(a, succs)| succs.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.iter().any(|n| n == id)
    }

    /// Lists every violated invariant; never fails.
    pub fn validate(&self) -> ValidationReport {
        let mut problems = Vec::new();
        let mut known = BTreeSet::new();
        for node in &self.nodes {
            if !known.insert(node.as_str()) {
                problems.push(format!("duplicate node `{node}`"));
            }
        }
        for (from, succs) in &self.edges {
            if !known.contains(from.as_str()) {
                problems.push(format!("edge source is an unknown node `{from}`"));
            }
            for to in succs {
                if !known.contains(to.as_str()) {
                    problems.push(format!("edge {from}->{to} targets an unknown node `{to}`"));
                }
                if from == to {
                    problems.push(format!("self-loop on `{from}` forms a cycle"));
                }
            }
        }
        if problems.is_empty() {
            match Topology::new(self) {
                Ok(topo) => {
                    for (i, order) in self.successful_topo.iter().enumerate() {
                        if let Err(e) = topo.check_order(order, true) {
                            problems.push(format!(
                                "successful_topo[{i}] is not a topological order: {e}"
                            ));
                        }
                    }
                }
                Err(Error::Cycle(path)) => {
                    problems.push(format!("cycle through {}", path.join(" -> ")));
                }
                Err(e) => problems.push(e.to_string()),
            }
        }
        ValidationReport { problems }
    }

    pub fn topology(&self) -> Result<Topology> {
        Topology::new(self)
    }

    /// 1 + the length of the longest predecessor path. Roots have depth 1.
    pub fn node_depth(&self, node: &str) -> Result<usize> {
        let topo = self.topology()?;
        let idx = topo.index_of(node)?;
        Ok(topo.depths()[idx])
    }

    /// Maximum number of nodes sharing one depth value.
    pub fn width(&self) -> Result<usize> {
        self.topology()?.width()
    }

    /// Every linear extension, lexicographic by id. Fails above `cap` nodes.
    pub fn all_topological_orders(&self, cap: usize) -> Result<Vec<Vec<NodeId>>> {
        let topo = self.topology()?;
        topo.all_orders(cap)
            .map(|orders| orders.into_iter().map(|o| topo.ids_of(&o)).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.problems.iter().any(|p| p.contains(needle))
    }
}

/// Index-based view of a validated DAG. Indices follow ascending id order.
#[derive(Clone, Debug)]
pub struct Topology {
    ids: Vec<NodeId>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    depths: Vec<usize>,
}

impl Topology {
    pub fn new(graph: &TaskGraph) -> Result<Self> {
        let mut ids = graph.nodes.clone();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate node `{}`", w[0])));
        }
        let n = ids.len();
        let lookup = |id: &str| {
            ids.binary_search_by(|probe| probe.as_str().cmp(id))
                .map_err(|_| Error::UnknownNode(id.to_string()))
        };
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for (from, targets) in &graph.edges {
            let a = lookup(from)?;
            for to in targets {
                let b = lookup(to)?;
                if !succs[a].contains(&b) {
                    succs[a].push(b);
                    preds[b].push(a);
                }
            }
        }
        for list in preds.iter_mut().chain(succs.iter_mut()) {
            list.sort_unstable();
        }
        let order = kahn(&preds, &succs).ok_or_else(|| {
            Error::Cycle(
                find_cycle(&succs)
                    .into_iter()
                    .map(|i| ids[i].clone())
                    .collect(),
            )
        })?;
        let mut depths = vec![1; n];
        for &v in &order {
            for &p in &preds[v] {
                depths[v] = depths[v].max(depths[p] + 1);
            }
        }
        Ok(Self {
            ids,
            preds,
            succs,
            depths,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.ids[idx]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .map_err(|_| Error::UnknownNode(id.to_string()))
    }

    pub fn ids_of(&self, indices: &[usize]) -> Vec<NodeId> {
        indices.iter().map(|&i| self.ids[i].clone()).collect()
    }

    pub fn preds(&self, idx: usize) -> &[usize] {
        &self.preds[idx]
    }

    pub fn succs(&self, idx: usize) -> &[usize] {
        &self.succs[idx]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn max_depth(&self) -> usize {
        self.depths.iter().copied().max().unwrap_or(0)
    }

    pub fn width(&self) -> Result<usize> {
        self.levels()
            .iter()
            .map(Vec::len)
            .max()
            .ok_or(Error::EmptyGraph)
    }

    /// Nodes grouped by depth; `levels()[k]` holds the depth-`k+1` nodes in id order.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut levels = vec![Vec::new(); self.max_depth()];
        for (idx, &d) in self.depths.iter().enumerate() {
            levels[d - 1].push(idx);
        }
        levels
    }

    /// Levels flattened: a canonical topological order.
    pub fn canonical_order(&self) -> Vec<usize> {
        self.levels().into_iter().flatten().collect()
    }

    /// Checks that `order` lists distinct known nodes with every edge respected.
    /// With `complete`, every node must appear.
    pub fn check_order(&self, order: &[NodeId], complete: bool) -> Result<Vec<usize>> {
        let mut position = vec![None; self.len()];
        let mut indices = Vec::with_capacity(order.len());
        for (pos, id) in order.iter().enumerate() {
            let idx = self.index_of(id)?;
            if position[idx].is_some() {
                return Err(Error::SequenceViolation(format!("`{id}` appears twice")));
            }
            position[idx] = Some(pos);
            indices.push(idx);
        }
        for &v in &indices {
            for &p in &self.preds[v] {
                match position[p] {
                    Some(pp) if pp < position[v].unwrap() => {}
                    _ => {
                        return Err(Error::SequenceViolation(format!(
                            "`{}` must come before `{}`",
                            self.ids[p], self.ids[v]
                        )))
                    }
                }
            }
        }
        if complete && indices.len() != self.len() {
            return Err(Error::SequenceViolation(format!(
                "covers {} of {} nodes",
                indices.len(),
                self.len()
            )));
        }
        Ok(indices)
    }

    /// All linear extensions as index sequences, lexicographic by id.
    pub fn all_orders(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        let n = self.len();
        if n > cap {
            return Err(Error::EnumerationCap { nodes: n, cap });
        }
        let mut remaining: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut placed = vec![false; n];
        let mut prefix = Vec::with_capacity(n);
        let mut out = Vec::new();
        self.extend_orders(&mut remaining, &mut placed, &mut prefix, &mut out);
        Ok(out)
    }

    fn extend_orders(
        &self,
        remaining: &mut [usize],
        placed: &mut [bool],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == self.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..self.len() {
            if placed[v] || remaining[v] != 0 {
                continue;
            }
            placed[v] = true;
            prefix.push(v);
            for &s in &self.succs[v] {
                remaining[s] -= 1;
            }
            self.extend_orders(remaining, placed, prefix, out);
            for &s in &self.succs[v] {
                remaining[s] += 1;
            }
            prefix.pop();
            placed[v] = false;
        }
    }
}

fn kahn(preds: &[Vec<usize>], succs: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: BTreeSet<usize> = (0..preds.len()).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(preds.len());
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &s in &succs[v] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                ready.insert(s);
            }
        }
    }
    (order.len() == preds.len()).then_some(order)
}

/// One directed cycle (closed: first node repeated at the end), if any.
pub(crate) fn find_cycle(succs: &[Vec<usize>]) -> Vec<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        v: usize,
        succs: &[Vec<usize>],
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        marks[v] = Mark::Active;
        stack.push(v);
        for &s in &succs[v] {
            match marks[s] {
                Mark::Active => {
                    let start = stack.iter().position(|&x| x == s).unwrap();
                    let mut cycle = stack[start..].to_vec();
                    cycle.push(s);
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = visit(s, succs, marks, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks[v] = Mark::Done;
        None
    }
    let mut marks = vec![Mark::New; succs.len()];
    for v in 0..succs.len() {
        if marks[v] == Mark::New {
            if let Some(c) = visit(v, succs, &mut marks, &mut Vec::new()) {
                return c;
            }
        }
    }
    Vec::new()
}
