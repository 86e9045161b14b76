//! Command-line front end for `cohstat-core`.
//!
//! Every command produces a [`output::Report`] that renders as JSON (with the
//! effective configuration echoed) or as a fixed-column CSV table.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cohstat_core::HalfInt;

use crate::commands::{cmd_family, cmd_infer, cmd_verify, CheckName, FamilyKind, InferKind, VerifyParams};
use crate::config::{load_config, FlagOverrides, Format};
use crate::error::{CliError, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILED};

#[derive(Debug, Parser)]
#[command(name = "cohstat", version, about = "Coherent-state probability families and inferred distributions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Fock truncation K
    #[arg(long, global = true, value_name = "K")]
    pub trunc: Option<usize>,
    /// Matrix-exponential tolerance
    #[arg(long, global = true, value_name = "T")]
    pub tol: Option<f64>,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for sampled verification points
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    /// TOML file with run settings
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability tables of a coherent-state family
    Family {
        #[command(subcommand)]
        kind: FamilyCommand,
    },
    /// Inferred density of the family parameter after one observation
    Infer {
        #[command(subcommand)]
        kind: InferCommand,
    },
    /// Residual checks of the operator identities
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    Poisson {
        #[arg(long, value_name = "L")]
        lambda: f64,
    },
    Binomial {
        #[arg(long, value_name = "N")]
        n: u32,
        #[arg(long, value_name = "P")]
        p: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum InferCommand {
    Poisson {
        #[arg(long, value_name = "N")]
        observed: u64,
    },
    Binomial {
        #[arg(long, value_name = "N")]
        n: u32,
        #[arg(long, value_name = "K")]
        k: u32,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub check: CheckName,
    /// Real displacement for the bch check
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Single spin for the gauss and identity checks, e.g. 5/2
    #[arg(long, value_name = "J")]
    pub spin: Option<HalfInt>,
    /// Sample count for the gauss and translation checks
    #[arg(long)]
    pub points: Option<usize>,
}

impl From<&CommonArgs> for FlagOverrides {
    fn from(a: &CommonArgs) -> Self {
        FlagOverrides {
            trunc: a.trunc,
            tol: a.tol,
            out: a.out.clone(),
            format: a.format,
            seed: a.seed,
            config: a.config.clone(),
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let config = load_config(&FlagOverrides::from(&cli.common))?;
    let report = match &cli.command {
        Command::Family { kind } => {
            let kind = match *kind {
                FamilyCommand::Poisson { lambda } => FamilyKind::Poisson { lambda },
                FamilyCommand::Binomial { n, p } => FamilyKind::Binomial { n, p },
            };
            cmd_family(kind, &config)?
        }
        Command::Infer { kind } => {
            let kind = match *kind {
                InferCommand::Poisson { observed } => InferKind::Poisson { observed },
                InferCommand::Binomial { n, k } => InferKind::Binomial { n, k },
            };
            cmd_infer(kind, &config)?
        }
        Command::Verify(args) => cmd_verify(
            args.check,
            VerifyParams {
                alpha: args.alpha,
                spin: args.spin,
                points: args.points,
            },
            &config,
        )?,
    };
    output::emit(&report, &config, stdout)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFICATION_FAILED })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "cohstat: {e}");
            e.exit_code()
        }
    }
}
