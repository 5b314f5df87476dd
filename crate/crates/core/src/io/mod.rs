//! Configuration files, snapshots, experiment presets and CSV output.

mod config;
mod experiment;
mod snapshot;

pub use config::{parse_config, read_config, ConfigEntries, InitSpec, RunSpec, DEFAULT_SEED, KEYS};
pub use experiment::{
    execute_run, format_row, run_experiment, run_header, spectrum_checks, Check, ExperimentReport, Preset,
    RunArtifacts, RUN_COLUMNS,
};
pub use snapshot::Snapshot;
