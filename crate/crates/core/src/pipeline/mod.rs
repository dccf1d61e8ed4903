//! Experiment orchestration and file output.

mod config;
mod run;

pub use config::{ExperimentConfig, OutputSpec};
pub use run::{
    compute_experiment, run_experiment, ExperimentProducts, RunManifest, StageTiming, KERNEL_FILE, MANIFEST_FILE,
    MAP_CSV_FILE, MAP_PGM_FILE, MATRIX_BIN_FILE, MATRIX_CSV_FILE,
};
