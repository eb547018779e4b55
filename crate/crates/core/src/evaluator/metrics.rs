//! Coverage Rate, coherency / Logical Consistency, action match, sensitivity.

use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::complexity::Applications;
use crate::env::Action;
use crate::error::{Error, Result};
use crate::model::{NodeId, TaskGraph, Topology};

/// Largest graph `max_coherency` accepts.
pub const COHERENCY_LIMIT: usize = 20;

/// Depth-weighted completion: Σ depth(completed) / Σ depth(all).
///
/// Normalising each weight by Σ depth cancels against the denominator, so the
/// ratio of raw depth sums is exact.
pub fn coverage_rate<'a>(
    graph: &TaskGraph,
    completed: impl IntoIterator<Item = &'a NodeId>,
) -> Result<Ratio<u64>> {
    let topo = graph.topology()?;
    let mut indices = BTreeSet::new();
    for id in completed {
        indices.insert(topo.index_of(id)?);
    }
    Ok(coverage_of(&topo, &indices))
}

pub(crate) fn coverage_of(topo: &Topology, completed: &BTreeSet<usize>) -> Ratio<u64> {
    let depths = topo.depths();
    let total: u64 = depths.iter().map(|&d| d as u64).sum();
    if total == 0 {
        return Ratio::from_integer(1);
    }
    let done: u64 = completed.iter().map(|&i| depths[i] as u64).sum();
    Ratio::new(done, total)
}

/// Adjacent pairs sharing an application. Nodes without a recorded application never match.
pub fn coherency_score(sequence: &[NodeId], apps: &Applications) -> usize {
    sequence
        .windows(2)
        .filter(|pair| match (apps.get(&pair[0]), apps.get(&pair[1])) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        })
        .count()
}

/// Application class per topology index; equal classes mean equal applications.
fn app_classes(topo: &Topology, apps: &Applications) -> Result<Vec<usize>> {
    let mut names: Vec<&str> = Vec::new();
    topo.ids()
        .iter()
        .map(|id| {
            let app = apps
                .get(id)
                .ok_or_else(|| Error::MissingApplication(id.clone()))?;
            Ok(match names.iter().position(|n| n == app) {
                Some(i) => i,
                None => {
                    names.push(app);
                    names.len() - 1
                }
            })
        })
        .collect()
}

/// Maximum coherency score over all linear extensions.
///
/// Dynamic programme over (placed subset, last node); exact for up to
/// [`COHERENCY_LIMIT`] nodes.
pub fn max_coherency(graph: &TaskGraph, apps: &Applications) -> Result<usize> {
    let topo = graph.topology()?;
    max_coherency_of(&topo, apps)
}

pub(crate) fn max_coherency_of(topo: &Topology, apps: &Applications) -> Result<usize> {
    let n = topo.len();
    if n > COHERENCY_LIMIT {
        return Err(Error::CoherencyLimit {
            nodes: n,
            limit: COHERENCY_LIMIT,
        });
    }
    if n <= 1 {
        return Ok(0);
    }
    let class = app_classes(topo, apps)?;
    let pred_mask: Vec<u32> = (0..n)
        .map(|v| topo.preds(v).iter().fold(0u32, |m, &p| m | (1 << p)))
        .collect();

    const UNREACHED: i8 = -1;
    let full = 1usize << n;
    let mut best = vec![UNREACHED; full * n];
    for v in 0..n {
        if pred_mask[v] == 0 {
            best[(1 << v) * n + v] = 0;
        }
    }
    for mask in 1..full {
        let row = mask * n;
        for last in 0..n {
            let score = best[row + last];
            if score == UNREACHED {
                continue;
            }
            for next in 0..n {
                let bit = 1usize << next;
                if mask & bit != 0 || (pred_mask[next] as usize) & !mask != 0 {
                    continue;
                }
                let gained = score + i8::from(class[last] == class[next]);
                let slot = &mut best[(mask | bit) * n + next];
                if gained > *slot {
                    *slot = gained;
                }
            }
        }
    }
    let top = best[(full - 1) * n..].iter().copied().max().unwrap_or(0);
    Ok(top.max(0) as usize)
}

/// Agent coherency over the best achievable; 1 when no order can score.
///
/// `agent_sequence` may be a prefix (e.g. the nodes completed so far) but must
/// respect every dependency among the nodes it lists.
pub fn logical_consistency(
    graph: &TaskGraph,
    agent_sequence: &[NodeId],
    apps: &Applications,
) -> Result<Ratio<u64>> {
    let topo = graph.topology()?;
    topo.check_order(agent_sequence, false)?;
    let best = max_coherency_of(&topo, apps)?;
    if best == 0 {
        return Ok(Ratio::from_integer(1));
    }
    let achieved = coherency_score(agent_sequence, apps);
    Ok(Ratio::new(achieved as u64, best as u64))
}

fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(x != y);
            cur[j + 1] = substitute.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// 1 − (token edit distance / longer length). Two empty sequences score 1.
pub fn action_match_score(predicted: &[Action], reference: &[Action]) -> Ratio<u64> {
    let longest = predicted.len().max(reference.len());
    if longest == 0 {
        return Ratio::from_integer(1);
    }
    let p: Vec<String> = predicted.iter().map(Action::token).collect();
    let r: Vec<String> = reference.iter().map(Action::token).collect();
    let distance = edit_distance(&p, &r) as u64;
    Ratio::new(longest as u64 - distance, longest as u64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Deviation {
    #[default]
    Population,
    Sample,
}

/// Standard deviation of scores for reorderings of one task's instruction.
pub fn sensitivity(scores: &[f64]) -> Result<f64> {
    sensitivity_with(scores, Deviation::Population)
}

pub fn sensitivity_with(scores: &[f64], mode: Deviation) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let squares: f64 = scores.iter().map(|s| (s - mean).powi(2)).sum();
    let divisor = match mode {
        Deviation::Population => n,
        Deviation::Sample if scores.len() > 1 => n - 1.0,
        Deviation::Sample => return Ok(0.0),
    };
    Ok((squares / divisor).sqrt())
}
