//! Graph-structured GUI-agent tasks: bottom-up composition with controllable
//! complexity, and graph-based evaluation over a simulated event log.

pub mod complexity;
pub mod composer;
pub mod env;
pub mod error;
pub mod evaluator;
pub mod harness;
pub mod io;
pub mod model;
pub mod registry;
pub mod synth;
pub mod template;

pub use complexity::{
    build_capability_suite, classify, classify_with, matches_capability, Applications,
    CapabilitySpec, ComplexityConfig, ComplexityProfile, Dimension, Level, Thresholds,
};
pub use composer::{
    Composer, CompositionConstraint, EnvironmentManifest, IntentGroup, SubtaskPool,
};
pub use env::{Action, Check, EvalFunction, EvalResult, EventLog, Progress};
pub use error::{Error, Result};
pub use evaluator::{EvaluationRun, MetricsReport};
pub use io::DatasetBundle;
pub use model::{
    NodeId, Resource, Subtask, TaskGraph, Topology, ValidationReport, ENUMERATION_CAP,
};
pub use registry::AppCategoryRegistry;
