//! Batch pipeline behind the command-line front end: configs, seeded
//! sweeps written to disk, and the report tables.

pub mod analyze;
pub mod bench;
pub mod config;
mod fsutil;
pub mod manifest;
pub mod results;
pub mod run;
pub mod shape;

pub use analyze::{analyze, cmd_analyze, AnalyzeOptions};
pub use bench::{bench_config, cmd_bench, experiment_arms, BenchOptions};
pub use config::{load_config, ExperimentConfig, LoadedConfig};
pub use manifest::{CellStatus, RunManifest};
pub use results::{load_results, RunResults};
pub use run::{cmd_run, run_experiment, RunOptions, RunSummary};
pub use shape::{cmd_shape, ShapeOptions, ShapeRow};
