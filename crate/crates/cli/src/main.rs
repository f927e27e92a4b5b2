use std::path::PathBuf;
use std::process::ExitCode;

use apxgrp_cli::config::Format;
use apxgrp_cli::error::{CliError, EXIT_OK, EXIT_VERIFY_FAILED};
use apxgrp_cli::{execute, verify_report, RunConfig, Verification};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "apxgrp",
    version,
    about = "Approximate-group experiments over finite and finitely generated groups"
)]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment a TOML config describes.
    Run {
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output formats, overriding the config's list.
        #[arg(long, value_delimiter = ',')]
        format: Vec<FormatArg>,
        /// Output directory, overriding the config's.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the set cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Re-run the config embedded in a report and compare checksums.
    VerifyReport { report: PathBuf },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(CliError::Config(format!("--threads: {e}")));
        }
    }
    match cli.cmd {
        Cmd::Run {
            config,
            seed,
            format,
            out,
            no_cache,
        } => {
            let mut cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if !format.is_empty() {
                cfg.output.formats = format
                    .iter()
                    .map(|f| match f {
                        FormatArg::Csv => Format::Csv,
                        FormatArg::Json => Format::Json,
                    })
                    .collect();
            }
            if let Some(o) = out {
                cfg.output.dir = o;
            }
            if no_cache {
                cfg.output.cache = false;
            }
            match execute(&cfg) {
                Ok(r) => {
                    println!(
                        "{} -> {} (checksum {})",
                        r.report.command,
                        cfg.output.dir.display(),
                        r.report.checksum
                    );
                    ExitCode::from(EXIT_OK as u8)
                }
                Err(e) => fail(e),
            }
        }
        Cmd::VerifyReport { report } => match verify_report(&report) {
            Ok(Verification::Pass) => {
                println!("pass");
                ExitCode::from(EXIT_OK as u8)
            }
            Ok(Verification::Tampered { stored, recomputed }) => {
                println!("fail: stored checksum {stored} does not match report contents ({recomputed})");
                ExitCode::from(EXIT_VERIFY_FAILED as u8)
            }
            Ok(Verification::Drifted { stored, rerun }) => {
                println!("fail: re-run gives checksum {rerun}, report has {stored}");
                ExitCode::from(EXIT_VERIFY_FAILED as u8)
            }
            Err(e) => fail(e),
        },
    }
}
