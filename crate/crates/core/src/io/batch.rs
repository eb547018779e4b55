use std::io::Write;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{ratio_f64, DEFAULT_MAX_STEPS};
use crate::harness::{BatchConfig, PolicyKind, ResultRow};

/// Column order of the results table.
pub const RESULT_COLUMNS: [&str; 7] = ["task_id", "capabilities", "cr", "lc", "sr", "ams", "steps"];

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

fn default_threads() -> usize {
    1
}

/// A batch simulation request. Relative paths resolve against the manifest's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchManifest {
    /// Bundle supplying subtasks, evaluation functions and the registry.
    pub bundle: PathBuf,
    /// Task files to run.
    pub tasks: Vec<PathBuf>,
    pub policy: PolicyKind,
    #[serde(default)]
    pub p_fail: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

impl BatchManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: Self = serde_json::from_str(&text).map_err(|e| Error::Schema {
            file: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        manifest.bundle = base.join(&manifest.bundle);
        for task in &mut manifest.tasks {
            *task = base.join(&*task);
        }
        Ok(manifest)
    }

    pub fn config(&self) -> BatchConfig {
        BatchConfig {
            policy: self.policy,
            p_fail: self.p_fail,
            seed: self.seed,
            max_steps: self.max_steps,
            threads: self.threads,
        }
    }
}

fn fixed(r: &Ratio<u64>) -> String {
    format!("{:.6}", ratio_f64(r))
}

/// Writes the results table: one header row, then one row per task.
/// Capabilities are `;`-separated slugs; metrics have six decimals; a missing
/// action match score is an empty field.
pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for row in rows {
        w.write_record([
            row.task_id.clone(),
            row.capabilities.join(";"),
            fixed(&row.cr),
            fixed(&row.lc),
            row.sr.to_string(),
            row.ams.as_ref().map(fixed).unwrap_or_default(),
            row.steps.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<results>", e))?;
    Ok(())
}
