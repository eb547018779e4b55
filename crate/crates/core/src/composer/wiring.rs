use std::collections::BTreeSet;

use super::pool::EnvironmentManifest;
use crate::error::{Error, Result};
use crate::model::{NodeId, Subtask, TaskGraph};

pub type EdgeSet = BTreeSet<(NodeId, NodeId)>;

/// Dependency edges among `members` by resource matching.
///
/// For each input category of a consumer, the lowest-id other member that
/// outputs it becomes its provider (one edge per category). Inputs nobody
/// produces must be environment-provided.
pub fn wire_edges(members: &[&Subtask], env: &EnvironmentManifest) -> Result<EdgeSet> {
    let mut ids: Vec<&str> = members.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateSubtask(w[0].to_string()));
    }

    let mut edges = EdgeSet::new();
    for consumer in members {
        for category in &consumer.input_resources {
            let provider = members
                .iter()
                .filter(|p| p.id != consumer.id && p.output_resources.contains(category))
                .map(|p| p.id.as_str())
                .min();
            match provider {
                Some(p) => {
                    edges.insert((p.to_string(), consumer.id.clone()));
                }
                None if env.provides(category) => {}
                None => {
                    return Err(Error::UnsatisfiedInput {
                        subtask: consumer.id.clone(),
                        category: category.clone(),
                    })
                }
            }
        }
    }

    let graph = TaskGraph::from_edges(
        ids.iter().copied(),
        edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    );
    match graph.topology() {
        Ok(_) => Ok(edges),
        Err(Error::Cycle(path)) => Err(Error::WiringCycle(path)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subtask(id: &str, inputs: &[&str], outputs: &[&str]) -> Subtask {
        Subtask {
            id: id.into(),
            instruction_template: format!("do {id}"),
            application: "Excel".into(),
            available_parameters: vec![],
            os: "Windows".into(),
            input_resources: inputs.iter().map(|s| s.to_string()).collect(),
            output_resources: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn edge(a: &str, b: &str) -> (NodeId, NodeId) {
        (a.into(), b.into())
    }

    #[test]
    fn matching_output_to_input() {
        let a = subtask("a", &[], &["xlsx_in_processing"]);
        let b = subtask("b", &["xlsx_in_processing"], &[]);
        let edges = wire_edges(&[&a, &b], &EnvironmentManifest::default()).unwrap();
        assert_eq!(edges, EdgeSet::from([edge("a", "b")]));
    }

    #[test]
    fn disjoint_resources() {
        let a = subtask("a", &[], &["r1"]);
        let b = subtask("b", &[], &["r2"]);
        assert!(wire_edges(&[&a, &b], &EnvironmentManifest::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn lowest_id_provider_wins() {
        let a = subtask("a", &[], &["r"]);
        let b = subtask("b", &[], &["r"]);
        let c = subtask("c", &["r"], &[]);
        let edges = wire_edges(&[&c, &b, &a], &EnvironmentManifest::default()).unwrap();
        assert_eq!(edges, EdgeSet::from([edge("a", "c")]));
    }

    #[test]
    fn unsatisfied_unless_environment() {
        let b = subtask("b", &["xlsx_path"], &[]);
        let err = wire_edges(&[&b], &EnvironmentManifest::default()).unwrap_err();
        assert!(err.to_string().starts_with("unsatisfied input"));
        assert!(wire_edges(&[&b], &EnvironmentManifest::new(["xlsx_path"])).is_ok());
    }

    #[test]
    fn cycles_are_errors() {
        let a = subtask("a", &["q"], &["p"]);
        let b = subtask("b", &["p"], &["q"]);
        match wire_edges(&[&a, &b], &EnvironmentManifest::default()) {
            Err(Error::WiringCycle(path)) => assert_eq!(path.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn self_production_is_not_a_dependency() {
        let a = subtask("a", &["doc"], &["doc"]);
        assert!(wire_edges(&[&a], &EnvironmentManifest::new(["doc"]))
            .unwrap()
            .is_empty());
    }
}
