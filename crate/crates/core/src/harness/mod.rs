//! Configuration, experiment orchestration and output for the command-line tool.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{
    load_config, resolve_config, Experiment, ExperimentConfig, OutputFormat, Override,
};
pub use experiments::{
    run, run_evolution, run_info_decomposition, run_mi_sweep, run_sbs_sweep, Scenario, Summary,
};
