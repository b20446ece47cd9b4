//! Monte Carlo experiments: configuration, per-trial simulation, metric
//! aggregation and CSV/plot-script output.

mod config;
mod metrics;
mod output;
mod selftest;
mod trial;

pub use config::{parse_config, DetectorChoice, EstimatorChoice, ExperimentConfig, MissPolicy, NoiseMode};
pub use metrics::{sweep, sweep_with_threads, timing_error_event, MetricsRow, MetricsTable};
pub use output::{emit_config, emit_outputs, format_csv, OutputPaths, CSV_HEADER};
pub use selftest::{run_selftest, CheckResult};
pub use trial::{run_trial, FlmOutcome, McdOutcome, ScenarioPoint, TrialOutcome, TrialScene, UserOutcome};
