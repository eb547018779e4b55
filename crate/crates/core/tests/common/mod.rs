//! Brute-force reference implementations. Deliberately naive and written
//! without the library's algorithms so they can serve as oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use dagbench::{Applications, TaskGraph};
use proptest::prelude::*;

pub fn edge_list(g: &TaskGraph) -> Vec<(String, String)> {
    g.edges
        .iter()
        .flat_map(|(a, bs)| bs.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

pub fn preds_of(g: &TaskGraph, v: &str) -> Vec<String> {
    edge_list(g)
        .into_iter()
        .filter(|(_, b)| b == v)
        .map(|(a, _)| a)
        .collect()
}

/// Longest-path depth by plain recursion (roots are 1).
pub fn depth(g: &TaskGraph, v: &str) -> usize {
    1 + preds_of(g, v)
        .iter()
        .map(|p| depth(g, p))
        .max()
        .unwrap_or(0)
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Every permutation of the nodes that respects every edge.
pub fn brute_orders(g: &TaskGraph) -> Vec<Vec<String>> {
    let edges = edge_list(g);
    let mut nodes = g.nodes.clone();
    nodes.sort();
    permutations(&nodes)
        .into_iter()
        .filter(|p| {
            let pos: HashMap<&String, usize> = p.iter().enumerate().map(|(i, v)| (v, i)).collect();
            edges.iter().all(|(a, b)| pos[a] < pos[b])
        })
        .collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Depth-weighted coverage as a reduced (numerator, denominator).
pub fn coverage(g: &TaskGraph, completed: &BTreeSet<String>) -> (u64, u64) {
    let total: u64 = g.nodes.iter().map(|v| depth(g, v) as u64).sum();
    let done: u64 = g
        .nodes
        .iter()
        .filter(|v| completed.contains(*v))
        .map(|v| depth(g, v) as u64)
        .sum();
    let d = gcd(done, total).max(1);
    (done / d, total / d)
}

pub fn adjacent_same(seq: &[String], apps: &Applications) -> usize {
    seq.windows(2)
        .filter(|w| apps[&w[0]] == apps[&w[1]])
        .count()
}

pub fn brute_max_coherency(g: &TaskGraph, apps: &Applications) -> usize {
    brute_orders(g)
        .iter()
        .map(|o| adjacent_same(o, apps))
        .max()
        .unwrap_or(0)
}

/// Edit distance by memoized recursion over suffixes.
pub fn edit_distance(a: &[String], b: &[String]) -> usize {
    fn go(
        a: &[String],
        b: &[String],
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), usize>,
    ) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            go(a, b, i + 1, j + 1, memo)
        } else {
            1 + go(a, b, i + 1, j, memo)
                .min(go(a, b, i, j + 1, memo))
                .min(go(a, b, i + 1, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

/// Nodes that should be Evaluating given the completed set.
pub fn evaluating(g: &TaskGraph, completed: &BTreeSet<String>) -> BTreeSet<String> {
    g.nodes
        .iter()
        .filter(|v| !completed.contains(*v) && preds_of(g, v).iter().all(|p| completed.contains(p)))
        .cloned()
        .collect()
}

pub fn population_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// DAG from a node count and a bit per forward pair, with labels permuted by `perm`.
pub fn dag_from_bits(n: usize, bits: &[bool], perm: &[usize]) -> TaskGraph {
    let labels = ids(n);
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits.get(k).copied().unwrap_or(false) {
                edges.push((labels[perm[i]].clone(), labels[perm[j]].clone()));
            }
            k += 1;
        }
    }
    TaskGraph::from_edges(labels, edges)
}

/// Random DAGs with 1..=max_n nodes and arbitrary labelling.
pub fn arb_dag(max_n: usize) -> impl Strategy<Value = TaskGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(any::<bool>(), pairs),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(|(n, bits, perm)| dag_from_bits(n, &bits, &perm))
    })
}

/// A DAG together with an application per node drawn from `k` apps.
pub fn arb_dag_with_apps(
    max_n: usize,
    k: usize,
) -> impl Strategy<Value = (TaskGraph, Applications)> {
    arb_dag(max_n).prop_flat_map(move |g| {
        let n = g.nodes.len();
        (Just(g), proptest::collection::vec(0..k, n)).prop_map(|(g, choice)| {
            let apps: Applications = g
                .nodes
                .iter()
                .zip(choice)
                .map(|(v, c)| {
                    (
                        v.clone(),
                        ["Excel", "Word", "Paint", "Spotify"][c % 4].to_string(),
                    )
                })
                .collect();
            (g, apps)
        })
    })
}

pub fn graph(nodes: &[&str], edges: &[(&str, &str)]) -> TaskGraph {
    TaskGraph::from_edges(nodes.iter().copied(), edges.iter().copied())
}

pub fn diamond() -> TaskGraph {
    graph(
        &["A", "B", "C", "D"],
        &[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")],
    )
}

pub fn apps_of(pairs: &[(&str, &str)]) -> Applications {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect::<BTreeMap<_, _>>()
}

pub fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}
