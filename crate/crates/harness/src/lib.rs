//! Experiment harness: complete pipeline runs, (N, k, seed) sweeps, output
//! tables, plots, and the `catperc` command-line interface.

pub mod cli;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod plot;
pub mod sweep;

pub use config::{KvConfig, RunConfig, Scenario, StimulusConfig, SweepConfig};
pub use error::{HarnessError, Result, Stage};
pub use pipeline::{run_pipeline, RunRecord};
pub use sweep::{run_sweep, SweepOutput};
