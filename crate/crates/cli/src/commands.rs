use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use dagbench::complexity::{classify_with, matches_capability, ComplexityConfig, Dimension, Level};
use dagbench::composer::{
    Composer, CompositionConstraint, IntentExtractor, IntentGroup, ResourceChainGrouping,
};
use dagbench::env::{Action, EvalFunction, EventLog};
use dagbench::evaluator::{EvaluationRun, DEFAULT_MAX_STEPS};
use dagbench::harness::{
    cross_verify, minimal_script, run_batch, BatchContext, EvalSynthesizer,
    ReferenceEvalSynthesizer, ReferenceTrajectorySynthesizer, TrajectorySynthesizer,
    VerificationStatus,
};
use dagbench::io::{
    self as dio, load_bundle, write_results, BatchManifest, DatasetBundle, TaskTrajectory,
};
use dagbench::template::Parameters;
use dagbench::{Error, Subtask, TaskGraph};
use log::info;

/// Verification ran out of iterations.
#[derive(Debug)]
pub struct Unverified(pub usize);

impl fmt::Display for Unverified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trajectory and evaluation function still disagree after {} iterations",
            self.0
        )
    }
}

impl std::error::Error for Unverified {}

fn complexity_config(path: Option<&Path>) -> Result<ComplexityConfig> {
    match path {
        None => Ok(ComplexityConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(ComplexityConfig::from_toml(&text)?)
        }
    }
}

fn parse_requirement(s: &str) -> std::result::Result<(Dimension, Level), String> {
    let (dim, level) = s
        .split_once('=')
        .ok_or_else(|| format!("expected DIMENSION=LEVEL, got `{s}`"))?;
    Ok((
        dim.trim().parse().map_err(|e: Error| e.to_string())?,
        level.trim().parse().map_err(|e: Error| e.to_string())?,
    ))
}

#[derive(Args, Debug)]
pub struct ComposeArgs {
    /// Bundle whose subtask pool is composed.
    #[arg(long)]
    bundle: PathBuf,
    /// Required level, e.g. `dependency=hard`. Repeatable.
    #[arg(long = "require", value_parser = parse_requirement)]
    requirements: Vec<(Dimension, Level)>,
    /// Require the levels of a capability suite (name or slug).
    #[arg(long)]
    capability: Option<String>,
    /// Compose from these subtask ids instead of the extracted intent groups.
    #[arg(long, value_delimiter = ',')]
    members: Vec<String>,
    /// Intent recorded for `--members`.
    #[arg(long, default_value = "composed workflow")]
    intent: String,
    #[arg(long, default_value_t = 1)]
    min_nodes: usize,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum member subsets examined per group.
    #[arg(long, default_value_t = dagbench::composer::DEFAULT_BUDGET)]
    budget: usize,
    /// Complexity table (TOML); defaults to the built-in one.
    #[arg(long)]
    complexity: Option<PathBuf>,
    /// Directory receiving `<prefix>-<n>.json` task files.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "composed")]
    prefix: String,
}

pub fn compose(args: ComposeArgs) -> Result<()> {
    let bundle = load_bundle(&args.bundle)?;
    let config = complexity_config(args.complexity.as_deref())?;
    let pool = bundle.pool()?;
    let registry = bundle.registry_or_default();
    let environment = bundle.environment.clone().unwrap_or_default();
    let mut composer = Composer::new(&pool, &registry, &environment);
    composer.thresholds = config.thresholds.clone();

    let mut constraint = CompositionConstraint::default()
        .nodes(args.min_nodes, args.max_nodes)
        .seeded(args.seed);
    constraint.budget = args.budget;
    if let Some(name) = &args.capability {
        constraint
            .levels
            .extend(config.capability(name)?.constraints.clone());
    }
    constraint.levels.extend(args.requirements.iter().copied());

    let groups = if args.members.is_empty() {
        ResourceChainGrouping.extract(&pool, &environment)
    } else {
        vec![IntentGroup::new(args.intent.clone(), args.members.clone())]
    };
    let mut written = 0;
    let mut last_failure = None;
    for group in &groups {
        match composer.compose(group, &constraint) {
            Ok(graph) => {
                let id = format!("{}-{written}", args.prefix);
                let path = dio::write_task_file(&args.out, &id, &graph)?;
                println!("{}", path.display());
                written += 1;
            }
            Err(e @ Error::Infeasible { .. }) => {
                info!("group `{}`: {e}", group.intent);
                last_failure = Some(e);
            }
            Err(e) => return Err(e.into()),
        }
    }
    match last_failure {
        Some(e) if written == 0 => {
            if let Error::Infeasible {
                closest: Some(p), ..
            } = &e
            {
                let parts: Vec<String> = Dimension::ALL
                    .iter()
                    .map(|&d| format!("{} {} ({})", d.as_str(), p.get(d).count, p.get(d).level))
                    .collect();
                eprintln!("closest profile: {}", parts.join(", "));
            }
            Err(e.into())
        }
        _ => Ok(()),
    }
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Only these task ids (default: all).
    tasks: Vec<String>,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    complexity: Option<PathBuf>,
}

fn select_tasks<'a>(
    bundle: &'a DatasetBundle,
    ids: &[String],
) -> Result<Vec<(&'a String, &'a TaskGraph)>> {
    if ids.is_empty() {
        return Ok(bundle.tasks.iter().collect());
    }
    ids.iter()
        .map(|id| {
            bundle
                .tasks
                .get_key_value(id)
                .ok_or_else(|| Error::UnknownNode(format!("task {id}")).into())
        })
        .collect()
}

pub fn classify(args: ClassifyArgs) -> Result<()> {
    let bundle = load_bundle(&args.bundle)?;
    let config = complexity_config(args.complexity.as_deref())?;
    let apps = bundle.applications();
    let registry = bundle.registry_or_default();
    let mut out = io::stdout().lock();
    let mut rows = Vec::new();
    if !args.json {
        write!(out, "{:<24}", "task")?;
        for dim in Dimension::ALL {
            write!(out, " {:<13}", dim.as_str())?;
        }
        writeln!(out, " capabilities")?;
    }
    for (id, graph) in select_tasks(&bundle, &args.tasks)? {
        let profile = classify_with(graph, &apps, &registry, &config.thresholds)?;
        let caps: Vec<String> = config
            .capabilities
            .iter()
            .filter(|c| matches_capability(&profile, c))
            .map(|c| c.slug())
            .collect();
        if args.json {
            rows.push(
                serde_json::json!({ "task_id": id, "profile": profile, "capabilities": caps }),
            );
        } else {
            write!(out, "{id:<24}")?;
            for dim in Dimension::ALL {
                let score = profile.get(dim);
                write!(out, " {:<13}", format!("{} ({})", score.count, score.level))?;
            }
            writeln!(out, " {}", caps.join(","))?;
        }
    }
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Capability name or slug, e.g. `long-range-planning`.
    #[arg(long)]
    capability: String,
    #[arg(long)]
    complexity: Option<PathBuf>,
}

pub fn suite(args: SuiteArgs) -> Result<()> {
    let bundle = load_bundle(&args.bundle)?;
    let config = complexity_config(args.complexity.as_deref())?;
    let spec = config.capability(&args.capability)?;
    let apps = bundle.applications();
    let registry = bundle.registry_or_default();
    for (id, graph) in &bundle.tasks {
        if matches_capability(
            &classify_with(graph, &apps, &registry, &config.thresholds)?,
            spec,
        ) {
            println!(
                "{}",
                args.bundle
                    .join(dio::TASK_DIR)
                    .join(format!("{id}.json"))
                    .display()
            );
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Task id within the bundle.
    #[arg(long)]
    task: String,
    /// Task trajectory id within the bundle, or a path to a trajectory file.
    #[arg(long)]
    trajectory: String,
    /// Reference trajectory (id or path) for the action match score.
    #[arg(long)]
    reference: Option<String>,
    /// Actions allowed without a completion before the run fails.
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
}

fn trajectory(bundle: &DatasetBundle, key: &str) -> Result<TaskTrajectory> {
    if let Some(t) = bundle.task_trajectories.get(key) {
        return Ok(t.clone());
    }
    let path = Path::new(key);
    if !path.is_file() {
        bail!(Error::DanglingReference {
            from: "--trajectory".into(),
            to: format!("trajectory `{key}`"),
        });
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {key}"))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Schema {
            file: path.to_path_buf(),
            message: e.to_string(),
        }
        .into()
    })
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let bundle = load_bundle(&args.bundle)?;
    let graph = bundle
        .tasks
        .get(&args.task)
        .ok_or_else(|| Error::DanglingReference {
            from: "--task".into(),
            to: format!("task `{}`", args.task),
        })?;
    let bindings = bundle.bindings()?;
    let traj = trajectory(&bundle, &args.trajectory)?;
    let reference = args
        .reference
        .as_deref()
        .map(|r| trajectory(&bundle, r))
        .transpose()?;

    let mut run = EvaluationRun::new(graph, &bindings, args.max_steps)?;
    let mut log = EventLog::new();
    for action in traj.actions {
        if run.is_terminated() {
            break;
        }
        run.step(action, &mut log)?;
    }
    run.abort("trajectory ended");
    let report = run.report(
        &bundle.applications(),
        &log,
        reference.as_ref().map(|r| r.actions.as_slice()),
    )?;
    println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    Ok(())
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Batch manifest (JSON).
    manifest: PathBuf,
    /// Results CSV path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let manifest = BatchManifest::read(&args.manifest)?;
    let bundle = load_bundle(&manifest.bundle)?;
    let mut tasks = Vec::with_capacity(manifest.tasks.len());
    for path in &manifest.tasks {
        let (id, graph) = dio::read_task_file(path)?;
        for node in &graph.nodes {
            if !bundle.subtasks.contains_key(node) {
                bail!(Error::DanglingReference {
                    from: path.display().to_string(),
                    to: format!("subtask `{node}`"),
                });
            }
        }
        tasks.push((id, graph));
    }
    let bindings = bundle.bindings()?;
    let apps = bundle.applications();
    let registry = bundle.registry_or_default();
    let complexity = ComplexityConfig::default();
    let ctx = BatchContext {
        bindings: &bindings,
        apps: &apps,
        registry: &registry,
        complexity: &complexity,
    };
    let rows = run_batch(&ctx, &manifest.config(), &tasks)?;
    match &args.out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_results(&rows, file)?;
        }
        None => write_results(&rows, io::stdout().lock())?,
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    subtask: String,
    #[arg(long, default_value_t = 5)]
    max_iters: usize,
    /// Index into the subtask's available parameter sets.
    #[arg(long, default_value_t = 0)]
    param_index: usize,
}

struct FixedTrajectory(Vec<Action>);

impl TrajectorySynthesizer for FixedTrajectory {
    fn synthesize(
        &mut self,
        _: &Subtask,
        _: &Parameters,
        _: &[String],
    ) -> dagbench::Result<Vec<Action>> {
        Ok(self.0.clone())
    }
}

struct FixedEval(EvalFunction);

impl EvalSynthesizer for FixedEval {
    fn synthesize(
        &mut self,
        _: &Subtask,
        params: &Parameters,
        _: &[String],
    ) -> dagbench::Result<EvalFunction> {
        self.0.instantiate(params)
    }
}

/// Recorded artifacts stand in for synthesizers; the reference ones fill gaps.
pub fn verify(args: VerifyArgs) -> Result<()> {
    let bundle = load_bundle(&args.bundle)?;
    let subtask = bundle
        .subtasks
        .get(&args.subtask)
        .ok_or_else(|| Error::UnknownSubtask(args.subtask.clone()))?;
    if args.param_index > 0 && args.param_index >= subtask.available_parameters.len() {
        bail!(Error::InvalidConstraint(format!(
            "subtask `{}` has {} parameter sets",
            subtask.id,
            subtask.available_parameters.len()
        )));
    }
    let params = subtask.parameters(args.param_index);
    let recorded = bundle
        .subtask_trajectories
        .values()
        .find(|t| t.subtask_id == subtask.id)
        .map(|t| t.actions.clone());
    let mut trajectories: Box<dyn TrajectorySynthesizer> =
        match (recorded, bundle.evals.get(&subtask.id)) {
            (Some(actions), _) => Box::new(FixedTrajectory(actions)),
            (None, Some(f)) => Box::new(FixedTrajectory(minimal_script(&f.instantiate(&params)?)?)),
            (None, None) => Box::new(ReferenceTrajectorySynthesizer),
        };
    let mut evals: Box<dyn EvalSynthesizer> = match bundle.evals.get(&subtask.id) {
        Some(f) => Box::new(FixedEval(f.clone())),
        None => Box::new(ReferenceEvalSynthesizer),
    };
    let outcome = cross_verify(
        trajectories.as_mut(),
        evals.as_mut(),
        subtask,
        &params,
        args.max_iters,
    )?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "subtask_id": subtask.id,
            "status": outcome.status,
            "iterations": outcome.iterations,
            "transcript": outcome.transcript,
        }))?
    );
    match outcome.status {
        VerificationStatus::Verified => Ok(()),
        VerificationStatus::Exhausted => Err(Unverified(outcome.iterations).into()),
    }
}

pub fn stats(dir: &Path) -> Result<()> {
    let bundle = load_bundle(dir)?;
    let registry = bundle.registry_or_default();
    let apps = bundle.applications();
    let tasks = bundle.tasks.len();
    let words: usize = bundle
        .tasks
        .values()
        .map(|g| g.instruction.split_whitespace().count())
        .sum();
    let nodes: usize = bundle.tasks.values().map(TaskGraph::node_count).sum();
    let edges: usize = bundle.tasks.values().map(TaskGraph::edge_count).sum();
    let avg = |total: usize| {
        if tasks == 0 {
            0.0
        } else {
            total as f64 / tasks as f64
        }
    };

    let mut scenarios: BTreeMap<&str, usize> = BTreeMap::new();
    let mut used_apps = BTreeSet::new();
    for graph in bundle.tasks.values() {
        let mut categories = BTreeSet::new();
        for node in &graph.nodes {
            let app = apps
                .get(node)
                .ok_or_else(|| Error::MissingApplication(node.clone()))?;
            used_apps.insert(app.as_str());
            categories.insert(registry.category_of(app)?);
        }
        for c in categories {
            *scenarios.entry(c).or_default() += 1;
        }
    }

    let mut out = io::stdout().lock();
    writeln!(out, "Total Tasks: {tasks}")?;
    writeln!(out, "Total Subtasks: {}", bundle.subtasks.len())?;
    writeln!(out, "Applications Used: {}", used_apps.len())?;
    writeln!(out, "Avg. Instruction Words: {:.2}", avg(words))?;
    writeln!(out, "Avg. Subtasks per Task: {:.2}", avg(nodes))?;
    writeln!(out, "Avg. Edges per Task: {:.2}", avg(edges))?;
    writeln!(out, "Task Trajectories: {}", bundle.task_trajectories.len())?;
    writeln!(
        out,
        "Subtask Trajectories: {}",
        bundle.subtask_trajectories.len()
    )?;
    writeln!(out, "Evaluation Functions: {}", bundle.evals.len())?;
    writeln!(out, "Scenario Counts:")?;
    for (category, count) in scenarios {
        writeln!(out, "  {category}: {count}")?;
    }
    Ok(())
}
