//! Reading and writing the dataset formats, batch manifests and result tables.

mod batch;
mod bundle;
mod records;

pub use batch::{write_results, BatchManifest, RESULT_COLUMNS};
pub use bundle::{
    file_stem_for, load_bundle, load_bundle_report, read_task_file, save_bundle, to_canonical_json,
    write_task_file, DatasetBundle, LoadReport, ENVIRONMENT_FILE, EVAL_DIR, MANIFEST_FILE,
    REGISTRY_FILE, SUBTASK_DIR, SUBTASK_TRAJECTORY_DIR, TASK_DIR, TASK_TRAJECTORY_DIR,
};
pub use records::{
    DagRecord, EvalRecord, SubtaskTrajectory, TaskRecord, TaskTrajectory, EVAL_KEYS, SUBTASK_KEYS,
    SUBTASK_TRAJECTORY_KEYS, TASK_KEYS, TASK_TRAJECTORY_KEYS,
};
