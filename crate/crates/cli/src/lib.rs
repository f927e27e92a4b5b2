//! Experiment harness: TOML run configs, subcommand dispatch, reports and their verification.

pub mod cache;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use report::{verify_report, RunReport, Verification};
pub use run::{execute, run, RunOutput};
