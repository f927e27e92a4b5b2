use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] apxgrp_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("report error: {0}")]
    Report(String),
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use apxgrp_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Report(_) => EXIT_CONFIG,
            CliError::Core(e) if e.is_budget() => EXIT_BUDGET,
            CliError::Core(E::Invariant(_)) => EXIT_INVARIANT,
            // Bad literals, parameters or files are input mistakes.
            CliError::Core(_) | CliError::Io(_) => EXIT_CONFIG,
        }
    }
}
