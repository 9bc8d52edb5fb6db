//! Command-line front end: model files, scenario files and reports.

pub mod commands;
pub mod error;
pub mod model;
pub mod report;
pub mod scenario_file;

pub use commands::{cmd_check, cmd_simulate, cmd_sweep, parse_sweep, sweep_csv, SimulateOptions};
pub use error::{CliError, Result};
pub use model::{parse_model, Model, ModelFile};
pub use report::{parse_report, Report};
pub use scenario_file::{parse_scenario, ScenarioFile};
