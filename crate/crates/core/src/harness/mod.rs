//! Scenario files, Monte Carlo runs, sweeps, result files, calibration, and
//! the command-line front end.

pub mod calibrate;
pub mod cli;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod sweep;

pub use report::{write_csv, write_json, write_report, Format};
pub use runner::run_scenario;
pub use scenario::{parse_scenario, read_scenario, Scenario, TaskSpec};
pub use sweep::{run_sweep, SweepReport, SweepSpec};
