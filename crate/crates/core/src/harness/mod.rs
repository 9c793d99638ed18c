//! Synthetic tasks, experiment configuration and the seeded runner.

pub mod config;
pub mod experiment;
pub mod probe;
pub mod task;

pub use config::{stream_rng, ExperimentConfig, Stream, Trainer};
pub use experiment::{
    run_all, run_dir, run_experiment, run_single, Model, RunResult, METRICS_HEADER,
};
pub use probe::{gradcheck, task_csv, task_samples, vanish_probe};
pub use task::{gen_task, sequence_correct, TaskKind, TaskSample, TaskSpec};
