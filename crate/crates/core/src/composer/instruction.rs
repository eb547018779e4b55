//! Task instruction rendering and dependency inference.
//!
//! The reference grammar serializes the task graph level by level in its
//! canonical order (depth, then id):
//!
//! ```text
//! instruction := level (", then " level)* "."
//! level       := clause ("; meanwhile, " clause)*
//! clause      := text [" (after step " N ")" | " (after steps " N (", " N)* ")"]
//! ```
//!
//! A clause without an annotation depends on every clause of the previous
//! level; otherwise it depends exactly on the 1-based step numbers listed.
//! Root clauses never carry annotations. The grammar is a bijection between
//! DAGs and instructions over a fixed set of node texts.

use std::collections::{BTreeMap, BTreeSet};

use super::pool::SubtaskPool;
use super::wiring::EdgeSet;
use crate::error::{Error, Result};
use crate::model::{NodeId, TaskGraph};

pub type NodeTexts = BTreeMap<NodeId, String>;

const THEN: &str = ", then ";
const MEANWHILE: &str = "; meanwhile, ";

/// Turns a task graph into an instruction.
pub trait InstructionSummarizer {
    fn summarize(&self, graph: &TaskGraph, texts: &NodeTexts) -> Result<String>;
}

/// Recovers the dependency structure from an instruction alone.
pub trait DependencyInferrer {
    fn infer(&self, instruction: &str, texts: &NodeTexts) -> Result<InferredStructure>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InferredStructure {
    /// Nodes in the order they are mentioned.
    pub nodes: Vec<NodeId>,
    pub edges: EdgeSet,
}

/// The fixed connective grammar described in the module docs.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConnectiveGrammar;

/// Clause text for a subtask: trimmed, without trailing full stops.
pub fn normalize_text(text: &str) -> String {
    text.trim().trim_end_matches('.').trim_end().to_string()
}

/// Instantiated, normalized text per node. `choice` picks a parameter set per
/// node (index into `available_parameters`); unlisted nodes use the first.
pub fn node_texts(
    graph: &TaskGraph,
    pool: &SubtaskPool,
    choice: &BTreeMap<NodeId, usize>,
) -> Result<NodeTexts> {
    graph
        .nodes
        .iter()
        .map(|id| {
            let subtask = pool.get(id)?;
            let params = subtask.parameters(choice.get(id).copied().unwrap_or(0));
            Ok((id.clone(), normalize_text(&subtask.instruction(&params)?)))
        })
        .collect()
}

fn text_of<'a>(texts: &'a NodeTexts, id: &str) -> Result<&'a str> {
    texts
        .get(id)
        .map(String::as_str)
        .ok_or_else(|| Error::MissingParameter {
            node: id.to_string(),
            placeholder: "<instruction text>".into(),
        })
}

impl InstructionSummarizer for ConnectiveGrammar {
    fn summarize(&self, graph: &TaskGraph, texts: &NodeTexts) -> Result<String> {
        let topo = graph.topology()?;
        if topo.is_empty() {
            return Ok(String::new());
        }
        let levels = topo.levels();
        let mut step = vec![0; topo.len()];
        for (i, v) in levels.iter().flatten().enumerate() {
            step[*v] = i + 1;
        }
        let mut rendered_levels = Vec::with_capacity(levels.len());
        for (k, level) in levels.iter().enumerate() {
            let mut clauses = Vec::with_capacity(level.len());
            for &v in level {
                let mut clause = text_of(texts, topo.id(v))?.to_string();
                if k > 0 && topo.preds(v) != levels[k - 1].as_slice() {
                    let mut refs: Vec<usize> = topo.preds(v).iter().map(|&p| step[p]).collect();
                    refs.sort_unstable();
                    let refs: Vec<String> = refs.iter().map(ToString::to_string).collect();
                    let noun = if refs.len() == 1 { "step" } else { "steps" };
                    clause.push_str(&format!(" (after {noun} {})", refs.join(", ")));
                }
                clauses.push(clause);
            }
            rendered_levels.push(clauses.join(MEANWHILE));
        }
        Ok(format!("{}.", rendered_levels.join(THEN)))
    }
}

struct Clause {
    node: usize,
    after: Option<Vec<usize>>,
}

struct Parser<'a> {
    input: &'a str,
    /// (text, node ids carrying it in id order), longest text first.
    candidates: Vec<(&'a str, Vec<usize>)>,
    ids: Vec<&'a str>,
    used: Vec<bool>,
    furthest: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str, texts: &'a NodeTexts) -> Self {
        let ids: Vec<&str> = texts.keys().map(String::as_str).collect();
        let mut by_text: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, text) in texts.values().enumerate() {
            by_text.entry(text.as_str()).or_default().push(i);
        }
        let mut candidates: Vec<(&str, Vec<usize>)> = by_text.into_iter().collect();
        candidates.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        Self {
            input,
            candidates,
            used: vec![false; ids.len()],
            ids,
            furthest: 0,
        }
    }

    /// Parses clauses from `pos` to the end; backtracks over ambiguous texts.
    fn levels(&mut self, pos: usize, levels: &mut Vec<Vec<Clause>>) -> bool {
        self.furthest = self.furthest.max(pos);
        let rest = &self.input[pos..];
        for c in 0..self.candidates.len() {
            let (text, owners) = (self.candidates[c].0, &self.candidates[c].1);
            if text.is_empty() || !rest.starts_with(text) {
                continue;
            }
            let Some(&node) = owners.iter().find(|&&o| !self.used[o]) else {
                continue;
            };
            let mut at = pos + text.len();
            let after = parse_annotation(&self.input[at..]).map(|(refs, len)| {
                at += len;
                refs
            });
            let tail = &self.input[at..];
            let next = if tail.is_empty() {
                None
            } else if tail.starts_with(MEANWHILE) {
                Some((at + MEANWHILE.len(), false))
            } else if tail.starts_with(THEN) {
                Some((at + THEN.len(), true))
            } else {
                self.furthest = self.furthest.max(at);
                continue;
            };
            self.used[node] = true;
            levels
                .last_mut()
                .expect("open level")
                .push(Clause { node, after });
            let accepted = match next {
                None => true,
                Some((next_pos, new_level)) => {
                    if new_level {
                        levels.push(Vec::new());
                    }
                    let ok = self.levels(next_pos, levels);
                    if !ok && new_level {
                        levels.pop();
                    }
                    ok
                }
            };
            if accepted {
                return true;
            }
            levels.last_mut().expect("open level").pop();
            self.used[node] = false;
        }
        false
    }
}

/// `" (after step 3)"` or `" (after steps 1, 4)"` → (step numbers, byte length).
fn parse_annotation(s: &str) -> Option<(Vec<usize>, usize)> {
    let body = s
        .strip_prefix(" (after steps ")
        .or_else(|| s.strip_prefix(" (after step "))?;
    let close = body.find(')')?;
    let refs = body[..close]
        .split(", ")
        .map(|n| n.parse::<usize>().ok().filter(|&n| n > 0))
        .collect::<Option<Vec<_>>>()?;
    Some((refs, s.len() - body.len() + close + 1))
}

impl DependencyInferrer for ConnectiveGrammar {
    fn infer(&self, instruction: &str, texts: &NodeTexts) -> Result<InferredStructure> {
        let trimmed = instruction.trim();
        if trimmed.is_empty() {
            return Ok(InferredStructure::default());
        }
        let body = trimmed
            .strip_suffix('.')
            .ok_or(Error::UnparseableInstruction {
                offset: trimmed.len(),
                reason: "instruction must end with '.'".into(),
            })?;
        let mut parser = Parser::new(body, texts);
        let mut levels = vec![Vec::new()];
        if !parser.levels(0, &mut levels) {
            return Err(Error::UnparseableInstruction {
                offset: parser.furthest,
                reason: "expected a known subtask text followed by a connective".into(),
            });
        }

        let order: Vec<usize> = levels.iter().flatten().map(|c| c.node).collect();
        let level_of: Vec<usize> = levels
            .iter()
            .enumerate()
            .flat_map(|(k, l)| std::iter::repeat_n(k, l.len()))
            .collect();
        let mut edges = EdgeSet::new();
        let mut step = 0;
        for (k, level) in levels.iter().enumerate() {
            for clause in level {
                step += 1;
                let to = parser.ids[clause.node].to_string();
                let preds: Vec<usize> = match (&clause.after, k) {
                    (Some(_), 0) => {
                        return Err(Error::UnparseableInstruction {
                            offset: 0,
                            reason: format!("step {step} is a root but names prerequisites"),
                        })
                    }
                    (Some(refs), _) => {
                        let mut nodes = Vec::with_capacity(refs.len());
                        for &r in refs {
                            if r > order.len() || level_of[r - 1] >= k {
                                return Err(Error::UnparseableInstruction {
                                    offset: 0,
                                    reason: format!("step {step} cannot follow step {r}"),
                                });
                            }
                            nodes.push(order[r - 1]);
                        }
                        nodes
                    }
                    (None, 0) => Vec::new(),
                    (None, _) => levels[k - 1].iter().map(|c| c.node).collect(),
                };
                for p in preds {
                    edges.insert((parser.ids[p].to_string(), to.clone()));
                }
            }
        }
        Ok(InferredStructure {
            nodes: order.iter().map(|&i| parser.ids[i].to_string()).collect(),
            edges,
        })
    }
}

pub fn render_instruction(graph: &TaskGraph, texts: &NodeTexts) -> Result<String> {
    ConnectiveGrammar.summarize(graph, texts)
}

/// Renders the nodes as a plain sequence ("A, then B, then C."), discarding
/// any parallel structure. Used to produce deliberately inconsistent instructions.
pub fn render_linearized(order: &[NodeId], texts: &NodeTexts) -> Result<String> {
    if order.is_empty() {
        return Ok(String::new());
    }
    let parts = order
        .iter()
        .map(|id| text_of(texts, id))
        .collect::<Result<Vec<_>>>()?;
    Ok(format!("{}.", parts.join(THEN)))
}

pub fn infer_dependencies(instruction: &str, texts: &NodeTexts) -> Result<EdgeSet> {
    Ok(ConnectiveGrammar.infer(instruction, texts)?.edges)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    /// Edges of the graph the instruction does not convey.
    pub missing_edges: Vec<(NodeId, NodeId)>,
    /// Edges the instruction implies that the graph lacks.
    pub extra_edges: Vec<(NodeId, NodeId)>,
    pub missing_nodes: Vec<NodeId>,
    pub extra_nodes: Vec<NodeId>,
}

pub fn validate_consistency(
    graph: &TaskGraph,
    instruction: &str,
    texts: &NodeTexts,
) -> Result<ConsistencyReport> {
    validate_consistency_with(&ConnectiveGrammar, graph, instruction, texts)
}

/// Compares the graph with what `inferrer` recovers from `instruction`.
pub fn validate_consistency_with(
    inferrer: &dyn DependencyInferrer,
    graph: &TaskGraph,
    instruction: &str,
    texts: &NodeTexts,
) -> Result<ConsistencyReport> {
    let inferred = inferrer.infer(instruction, texts)?;
    let expected = graph.edge_set();
    let graph_nodes: BTreeSet<&NodeId> = graph.nodes.iter().collect();
    let said_nodes: BTreeSet<&NodeId> = inferred.nodes.iter().collect();
    let report = ConsistencyReport {
        missing_edges: expected.difference(&inferred.edges).cloned().collect(),
        extra_edges: inferred.edges.difference(&expected).cloned().collect(),
        missing_nodes: graph_nodes
            .difference(&said_nodes)
            .map(|s| s.to_string())
            .collect(),
        extra_nodes: said_nodes
            .difference(&graph_nodes)
            .map(|s| s.to_string())
            .collect(),
        consistent: false,
    };
    Ok(ConsistencyReport {
        consistent: report.missing_edges.is_empty()
            && report.extra_edges.is_empty()
            && report.missing_nodes.is_empty()
            && report.extra_nodes.is_empty(),
        ..report
    })
}
