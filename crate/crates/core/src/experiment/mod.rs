//! Config-driven experiment runs, sweeps and result files.

mod config;
mod emit;
mod run;

pub use config::{ExperimentConfig, LosSpec, OutputFormat, PerUser, SelectionSpec};
pub use emit::{emit, format_float, read_csv, to_csv_string, to_json_string, write_csv, CSV_HEADER};
pub use run::{run_experiment, sub_seed, sweep, sweep_point, ResultRow, SweepAxis, SUM_ROW};
