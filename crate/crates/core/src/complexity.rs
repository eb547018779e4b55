//! Five-dimensional task complexity and capability test-set selection.
//!
//! Thresholds and capability constraints are data: the built-in table is
//! `data/complexity.toml`, and [`ComplexityConfig::from_toml`] loads a
//! replacement in the same format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NodeId, TaskGraph};
use crate::registry::AppCategoryRegistry;

const BUILTIN: &str = include_str!("../data/complexity.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Dependency,
    Instruction,
    Knowledge,
    Hierarchy,
    Branch,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Dependency,
        Dimension::Instruction,
        Dimension::Knowledge,
        Dimension::Hierarchy,
        Dimension::Branch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Dependency => "dependency",
            Dimension::Instruction => "instruction",
            Dimension::Knowledge => "knowledge",
            Dimension::Hierarchy => "hierarchy",
            Dimension::Branch => "branch",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown dimension `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Easy,
    Medium,
    Hard,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Easy => "easy",
            Level::Medium => "medium",
            Level::Hard => "hard",
        }
    }

    fn from_stars(stars: u8) -> Result<Option<Level>> {
        match stars {
            0 => Ok(None),
            1 => Ok(Some(Level::Easy)),
            2 => Ok(Some(Level::Medium)),
            3 => Ok(Some(Level::Hard)),
            n => Err(Error::Config(format!("star count {n} is not in 0..=3"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Easy => "Easy",
            Level::Medium => "Medium",
            Level::Hard => "Hard",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(Level::Easy),
            "medium" => Ok(Level::Medium),
            "hard" => Ok(Level::Hard),
            _ => Err(Error::Config(format!("unknown level `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub easy_max: usize,
    pub medium_max: usize,
}

impl Band {
    pub fn level(&self, count: usize) -> Level {
        if count <= self.easy_max {
            Level::Easy
        } else if count <= self.medium_max {
            Level::Medium
        } else {
            Level::Hard
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub dependency: Band,
    pub instruction: Band,
    pub knowledge: Band,
    pub hierarchy: Band,
    pub branch: Band,
}

impl Thresholds {
    pub fn band(&self, dim: Dimension) -> &Band {
        match dim {
            Dimension::Dependency => &self.dependency,
            Dimension::Instruction => &self.instruction,
            Dimension::Knowledge => &self.knowledge,
            Dimension::Hierarchy => &self.hierarchy,
            Dimension::Branch => &self.branch,
        }
    }

    pub fn level(&self, dim: Dimension, count: usize) -> Level {
        self.band(dim).level(count)
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        ComplexityConfig::default().thresholds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub count: usize,
    pub level: Level,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub dependency: DimensionScore,
    pub instruction: DimensionScore,
    pub knowledge: DimensionScore,
    pub hierarchy: DimensionScore,
    pub branch: DimensionScore,
}

impl ComplexityProfile {
    pub fn from_counts(counts: [usize; 5], thresholds: &Thresholds) -> Self {
        let score = |dim: Dimension, count| DimensionScore {
            count,
            level: thresholds.level(dim, count),
        };
        Self {
            dependency: score(Dimension::Dependency, counts[0]),
            instruction: score(Dimension::Instruction, counts[1]),
            knowledge: score(Dimension::Knowledge, counts[2]),
            hierarchy: score(Dimension::Hierarchy, counts[3]),
            branch: score(Dimension::Branch, counts[4]),
        }
    }

    pub fn get(&self, dim: Dimension) -> DimensionScore {
        match dim {
            Dimension::Dependency => self.dependency,
            Dimension::Instruction => self.instruction,
            Dimension::Knowledge => self.knowledge,
            Dimension::Hierarchy => self.hierarchy,
            Dimension::Branch => self.branch,
        }
    }

    /// Number of `required` levels this profile misses.
    pub fn violations(&self, required: &BTreeMap<Dimension, Level>) -> usize {
        required
            .iter()
            .filter(|(dim, level)| self.get(**dim).level != **level)
            .count()
    }
}

/// A capability test set: exact levels for the constrained dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapabilitySpec {
    pub name: String,
    pub constraints: BTreeMap<Dimension, Level>,
}

impl CapabilitySpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            constraints: BTreeMap::new(),
        }
    }

    pub fn require(mut self, dim: Dimension, level: Level) -> Self {
        self.constraints.insert(dim, level);
        self
    }

    /// Lowercase, hyphen-separated name, e.g. `long-range-planning`.
    pub fn slug(&self) -> String {
        slugify(&self.name)
    }
}

fn slugify(name: &str) -> String {
    name.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .collect::<Vec<_>>()
        .join("-")
}

#[derive(Deserialize)]
struct ConfigFile {
    thresholds: Thresholds,
    #[serde(default, rename = "capability")]
    capabilities: Vec<CapabilityEntry>,
}

#[derive(Deserialize)]
struct CapabilityEntry {
    name: String,
    #[serde(default)]
    stars: BTreeMap<String, u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityConfig {
    pub thresholds: Thresholds,
    pub capabilities: Vec<CapabilitySpec>,
}

impl ComplexityConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for dim in Dimension::ALL {
            let band = file.thresholds.band(dim);
            if band.easy_max >= band.medium_max {
                return Err(Error::Config(format!(
                    "{dim}: easy_max {} must be below medium_max {}",
                    band.easy_max, band.medium_max
                )));
            }
        }
        let mut capabilities = Vec::with_capacity(file.capabilities.len());
        for entry in file.capabilities {
            let mut spec = CapabilitySpec::new(entry.name);
            for (dim, stars) in entry.stars {
                if let Some(level) = Level::from_stars(stars)? {
                    spec.constraints.insert(dim.parse()?, level);
                }
            }
            capabilities.push(spec);
        }
        Ok(Self {
            thresholds: file.thresholds,
            capabilities,
        })
    }

    /// Looks a capability up by display name or slug, case-insensitively.
    pub fn capability(&self, name: &str) -> Result<&CapabilitySpec> {
        let wanted = slugify(name);
        self.capabilities
            .iter()
            .find(|c| c.slug() == wanted)
            .ok_or_else(|| Error::UnknownCapability(name.to_string()))
    }
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        Self::from_toml(BUILTIN).expect("built-in complexity table parses")
    }
}

/// Application of every node, as recorded in the subtask pool.
pub type Applications = BTreeMap<NodeId, String>;

pub fn classify(
    graph: &TaskGraph,
    apps: &Applications,
    registry: &AppCategoryRegistry,
) -> Result<ComplexityProfile> {
    classify_with(graph, apps, registry, &Thresholds::default())
}

pub fn classify_with(
    graph: &TaskGraph,
    apps: &Applications,
    registry: &AppCategoryRegistry,
    thresholds: &Thresholds,
) -> Result<ComplexityProfile> {
    let topo = graph.topology()?;
    let width = topo.width()?;
    let mut categories = BTreeSet::new();
    for id in topo.ids() {
        let app = apps
            .get(id)
            .ok_or_else(|| Error::MissingApplication(id.clone()))?;
        categories.insert(registry.category_of(app)?);
    }
    Ok(ComplexityProfile::from_counts(
        [
            graph.edge_count(),
            topo.len(),
            categories.len(),
            topo.max_depth(),
            width,
        ],
        thresholds,
    ))
}

/// Exact-level match on every constrained dimension.
pub fn matches_capability(profile: &ComplexityProfile, spec: &CapabilitySpec) -> bool {
    profile.violations(&spec.constraints) == 0
}

/// The tasks whose profiles match `spec`, in input order.
pub fn build_capability_suite<'a>(
    tasks: &'a [TaskGraph],
    apps: &Applications,
    spec: &CapabilitySpec,
    registry: &AppCategoryRegistry,
    thresholds: &Thresholds,
) -> Result<Vec<&'a TaskGraph>> {
    let mut suite = Vec::new();
    for task in tasks {
        if matches_capability(&classify_with(task, apps, registry, thresholds)?, spec) {
            suite.push(task);
        }
    }
    Ok(suite)
}
