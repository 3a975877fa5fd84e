//! Experiment configuration, sequence runs over the winding scale n and
//! the run-directory layout.

mod config;
mod run;

pub use config::{parse_config, ExperimentConfig, OutputParams, Preset, ReflectParams, RestartParams};
pub use run::{
    analyze_run_dir, emit_analysis, emit_outputs, export_boundaries, n_dir, read_run_config, run_sequence,
    thread_cap, BlowupSummary, NResult, NSummary, RestartCheck, RunOutcome, RunStatus, RunSummary, SampleGrowth, SolveInfo,
    THREADS_VAR,
};

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 4;
