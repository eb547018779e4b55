use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use super::records::{
    EvalRecord, SubtaskTrajectory, TaskRecord, TaskTrajectory, EVAL_KEYS, SUBTASK_KEYS,
    SUBTASK_TRAJECTORY_KEYS, TASK_KEYS, TASK_TRAJECTORY_KEYS,
};
use crate::complexity::Applications;
use crate::composer::{EnvironmentManifest, SubtaskPool};
use crate::env::EvalFunction;
use crate::error::{Error, Result};
use crate::harness::reference_eval;
use crate::model::{NodeId, Subtask, TaskGraph};
use crate::registry::AppCategoryRegistry;

pub const SUBTASK_DIR: &str = "subtasks";
pub const TASK_DIR: &str = "tasks";
pub const SUBTASK_TRAJECTORY_DIR: &str = "trajectories/subtasks";
pub const TASK_TRAJECTORY_DIR: &str = "trajectories/tasks";
pub const EVAL_DIR: &str = "evals";
pub const REGISTRY_FILE: &str = "registry.json";
pub const ENVIRONMENT_FILE: &str = "environment.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Every artifact of a dataset, keyed by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetBundle {
    pub subtasks: BTreeMap<String, Subtask>,
    /// Keyed by task id (the task file's stem).
    pub tasks: BTreeMap<String, TaskGraph>,
    pub subtask_trajectories: BTreeMap<String, SubtaskTrajectory>,
    pub task_trajectories: BTreeMap<String, TaskTrajectory>,
    /// Uninstantiated evaluation functions keyed by subtask id.
    pub evals: BTreeMap<String, EvalFunction>,
    pub registry: Option<AppCategoryRegistry>,
    pub environment: Option<EnvironmentManifest>,
}

#[derive(Clone, Debug)]
pub struct LoadReport {
    pub bundle: DatasetBundle,
    /// Unknown fields, as `file: key`.
    pub warnings: Vec<String>,
}

impl DatasetBundle {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn pool(&self) -> Result<SubtaskPool> {
        SubtaskPool::new(self.subtasks.values().cloned())
    }

    pub fn applications(&self) -> Applications {
        self.subtasks
            .values()
            .map(|s| (s.id.clone(), s.application.clone()))
            .collect()
    }

    /// The bundle's registry, or the built-in one.
    pub fn registry_or_default(&self) -> AppCategoryRegistry {
        self.registry.clone().unwrap_or_default()
    }

    /// Instantiated evaluation functions for every subtask, using parameter
    /// set 0. Subtasks without an eval file get [`reference_eval`].
    pub fn bindings(&self) -> Result<BTreeMap<NodeId, EvalFunction>> {
        self.subtasks
            .values()
            .map(|s| {
                let params = s.parameters(0);
                let f = match self.evals.get(&s.id) {
                    Some(f) => f.instantiate(&params).map_err(|e| match e {
                        Error::MissingParameter { placeholder, .. } => Error::MissingParameter {
                            node: s.id.clone(),
                            placeholder,
                        },
                        other => other,
                    })?,
                    None => reference_eval(s, &params)?,
                };
                Ok((s.id.clone(), f))
            })
            .collect()
    }

    /// Cross-file references resolve and every graph is well-formed.
    pub fn validate(&self) -> Result<()> {
        for subtask in self.subtasks.values() {
            subtask.validate()?;
        }
        for (id, graph) in &self.tasks {
            let report = graph.validate();
            if let Some(problem) = report.problems.first() {
                return Err(Error::InvalidGraph(format!("task `{id}`: {problem}")));
            }
            for node in &graph.nodes {
                if !self.subtasks.contains_key(node) {
                    return Err(dangling(
                        format!("task `{id}`"),
                        format!("subtask `{node}`"),
                    ));
                }
            }
        }
        for (id, t) in &self.subtask_trajectories {
            if !self.subtasks.contains_key(&t.subtask_id) {
                return Err(dangling(
                    format!("trajectory `{id}`"),
                    format!("subtask `{}`", t.subtask_id),
                ));
            }
        }
        for (id, t) in &self.task_trajectories {
            let Some(task) = self.tasks.get(&t.task_id) else {
                return Err(dangling(
                    format!("trajectory `{id}`"),
                    format!("task `{}`", t.task_id),
                ));
            };
            task.topology()?
                .check_order(&t.topological_order, true)
                .map_err(|e| Error::InvalidGraph(format!("trajectory `{id}`: {e}")))?;
        }
        for id in self.evals.keys() {
            if !self.subtasks.contains_key(id) {
                return Err(dangling(
                    format!("evaluation function for `{id}`"),
                    format!("subtask `{id}`"),
                ));
            }
        }
        for f in self.evals.values() {
            f.validate()?;
        }
        Ok(())
    }
}

fn dangling(from: String, to: String) -> Error {
    Error::DanglingReference { from, to }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn schema(path: &Path, message: impl Into<String>) -> Error {
    Error::Schema {
        file: path.to_path_buf(),
        message: message.into(),
    }
}

/// Parses a record, warning about top-level keys outside `known`.
fn read_record<T: DeserializeOwned>(
    path: &Path,
    known: &[&str],
    warnings: &mut Vec<String>,
) -> Result<T> {
    let value: Value =
        serde_json::from_str(&read_text(path)?).map_err(|e| schema(path, e.to_string()))?;
    let Value::Object(map) = &value else {
        return Err(schema(path, "expected a JSON object"));
    };
    for key in map.keys().filter(|k| !known.contains(&k.as_str())) {
        let message = format!("{}: unknown field `{key}`", path.display());
        warn!("{message}");
        warnings.push(message);
    }
    serde_json::from_value(value).map_err(|e| schema(path, e.to_string()))
}

/// `*.json` files directly inside `dir`, sorted; none if `dir` is absent.
fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn insert_unique<T>(
    map: &mut BTreeMap<String, T>,
    id: String,
    value: T,
    path: &Path,
) -> Result<()> {
    if map.contains_key(&id) {
        return Err(schema(path, format!("duplicate id `{id}`")));
    }
    map.insert(id, value);
    Ok(())
}

/// A task file on its own: (task id from the file stem, graph).
pub fn read_task_file(path: &Path) -> Result<(String, TaskGraph)> {
    read_task(path, &mut Vec::new())
}

fn read_task(path: &Path, warnings: &mut Vec<String>) -> Result<(String, TaskGraph)> {
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| schema(path, "task file name is not valid UTF-8"))?
        .to_string();
    let record: TaskRecord = read_record(path, TASK_KEYS, warnings)?;
    Ok((id, record.into()))
}

pub fn load_bundle(dir: &Path) -> Result<DatasetBundle> {
    Ok(load_bundle_report(dir)?.bundle)
}

/// Loads and links every artifact under `dir`. Missing subdirectories are empty.
pub fn load_bundle_report(dir: &Path) -> Result<LoadReport> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "bundle directory not found"),
        ));
    }
    let mut warnings = Vec::new();
    let mut bundle = DatasetBundle::default();

    for path in json_files(&dir.join(SUBTASK_DIR))? {
        let s: Subtask = read_record(&path, SUBTASK_KEYS, &mut warnings)?;
        s.validate().map_err(|e| schema(&path, e.to_string()))?;
        insert_unique(&mut bundle.subtasks, s.id.clone(), s, &path)?;
    }
    for path in json_files(&dir.join(TASK_DIR))? {
        let (id, graph) = read_task(&path, &mut warnings)?;
        insert_unique(&mut bundle.tasks, id, graph, &path)?;
    }
    for path in json_files(&dir.join(SUBTASK_TRAJECTORY_DIR))? {
        let t: SubtaskTrajectory = read_record(&path, SUBTASK_TRAJECTORY_KEYS, &mut warnings)?;
        insert_unique(
            &mut bundle.subtask_trajectories,
            t.trajectory_id.clone(),
            t,
            &path,
        )?;
    }
    for path in json_files(&dir.join(TASK_TRAJECTORY_DIR))? {
        let t: TaskTrajectory = read_record(&path, TASK_TRAJECTORY_KEYS, &mut warnings)?;
        insert_unique(
            &mut bundle.task_trajectories,
            t.trajectory_id.clone(),
            t,
            &path,
        )?;
    }
    for path in json_files(&dir.join(EVAL_DIR))? {
        let e: EvalRecord = read_record(&path, EVAL_KEYS, &mut warnings)?;
        insert_unique(&mut bundle.evals, e.subtask_id, e.checks, &path)?;
    }
    let registry = dir.join(REGISTRY_FILE);
    if registry.is_file() {
        bundle.registry = Some(
            AppCategoryRegistry::from_json(&read_text(&registry)?)
                .map_err(|e| schema(&registry, e.to_string()))?,
        );
    }
    let environment = dir.join(ENVIRONMENT_FILE);
    if environment.is_file() {
        let env: EnvironmentManifest =
            read_record(&environment, &["environment_resources"], &mut warnings)?;
        bundle.environment = Some(env);
    }

    bundle.validate()?;
    Ok(LoadReport { bundle, warnings })
}

/// File-name form of an id: characters outside `[A-Za-z0-9._()-]` become `_`.
pub fn file_stem_for(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._()-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

struct Writer<'a> {
    root: &'a Path,
    files: BTreeSet<String>,
}

impl Writer<'_> {
    fn write<T: Serialize>(&mut self, subdir: &str, id: &str, value: &T) -> Result<()> {
        let stem = file_stem_for(id);
        if stem.is_empty() || stem.starts_with('.') {
            return Err(Error::InvalidGraph(format!(
                "id `{id}` cannot be used as a file name"
            )));
        }
        let rel = if subdir.is_empty() {
            format!("{stem}.json")
        } else {
            format!("{subdir}/{stem}.json")
        };
        if !self.files.insert(rel.clone()) {
            return Err(Error::InvalidGraph(format!("ids collide on file `{rel}`")));
        }
        self.put(&rel, &to_canonical_json(value)?)
    }

    fn put(&self, rel: &str, text: &str) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

/// Writes `bundle` under `dir` in canonical JSON plus a `manifest.json`
/// listing every written file. Returns the relative paths written.
pub fn save_bundle(bundle: &DatasetBundle, dir: &Path) -> Result<Vec<String>> {
    bundle.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut w = Writer {
        root: dir,
        files: BTreeSet::new(),
    };
    for s in bundle.subtasks.values() {
        w.write(SUBTASK_DIR, &s.id, s)?;
    }
    for (id, graph) in &bundle.tasks {
        if file_stem_for(id) != *id {
            return Err(Error::InvalidGraph(format!(
                "task id `{id}` is not a valid file stem"
            )));
        }
        w.write(TASK_DIR, id, &TaskRecord::from(graph))?;
    }
    for t in bundle.subtask_trajectories.values() {
        w.write(SUBTASK_TRAJECTORY_DIR, &t.trajectory_id, t)?;
    }
    for t in bundle.task_trajectories.values() {
        w.write(TASK_TRAJECTORY_DIR, &t.trajectory_id, t)?;
    }
    for (id, f) in &bundle.evals {
        let record = EvalRecord {
            subtask_id: id.clone(),
            checks: f.clone(),
        };
        w.write(EVAL_DIR, id, &record)?;
    }
    if let Some(registry) = &bundle.registry {
        w.write("", "registry", &registry.to_json_value())?;
    }
    if let Some(env) = &bundle.environment {
        w.write("", "environment", env)?;
    }
    let files: Vec<String> = w.files.iter().cloned().collect();
    w.put(
        MANIFEST_FILE,
        &to_canonical_json(&serde_json::json!({ "files": files }))?,
    )?;
    Ok(files)
}

/// Writes one task file (`<dir>/<id>.json`).
pub fn write_task_file(dir: &Path, id: &str, graph: &TaskGraph) -> Result<PathBuf> {
    if file_stem_for(id) != id || id.is_empty() {
        return Err(Error::InvalidGraph(format!(
            "task id `{id}` is not a valid file stem"
        )));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{id}.json"));
    fs::write(&path, to_canonical_json(&TaskRecord::from(graph))?)
        .map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
