//! `heegaard`: exact classification of symplectic Heegaard splittings.
//!
//! See [`crate::error`] for the exit-code contract and
//! [`crate::input`] for the input file format.

mod commands;
mod error;
mod input;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heegaard::DEFAULT_SEARCH_LIMIT;

use crate::commands::Ctx;
use crate::error::CliError;

/// Exact classification of symplectic Heegaard splittings: invariant
/// reports, equivalence verdicts, and the supporting normal forms.
#[derive(Parser)]
#[command(name = "heegaard", version, about)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full invariant report for one input file.
    Analyze { file: PathBuf },
    /// Decide whether two inputs are equivalent (exit 0 yes, 1 no).
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Compare up to adding trivial handles on both sides.
        #[arg(long)]
        stable: bool,
        /// Compare at minimal genus; includes the determinant invariant.
        #[arg(long)]
        minimal: bool,
    },
    /// Smith normal form of the presentation block of a gluing.
    Snf { file: PathBuf },
    /// Partial normal form of a gluing, with handlebody witnesses.
    Normalize { file: PathBuf },
    /// Phase vector of the 2-primary linking.
    Phase { file: PathBuf },
    /// Splitting of the 2-primary linking into basic forms.
    Wall { file: PathBuf },
    /// Gauss sum of the 2-primary linking at doubling index k.
    Gauss {
        file: PathBuf,
        /// Doubling index: the sum runs over E(2^k λ(x,x)).
        #[arg(long)]
        k: u32,
    },
    /// Number of minimal classes inside the stable class.
    CountClasses { file: PathBuf },
    /// Randomized self-checks; the transcript is a function of the seed.
    Selftest {
        /// Size bound for random instances; 0 runs nothing.
        #[arg(long, default_value_t = 256)]
        max_size: usize,
        /// Seed for all randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code.clamp(0, 255) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(String, i32), CliError> {
    let ctx = Ctx {
        json: cli.json,
        search_limit: search_limit_from_env()?,
    };
    match cli.command {
        Cmd::Analyze { file } => commands::analyze(&input::load(&file)?, &ctx),
        Cmd::Compare {
            a,
            b,
            stable,
            minimal,
        } => {
            if stable == minimal {
                return Err(CliError::Parse(
                    "compare needs exactly one of --stable or --minimal".to_string(),
                ));
            }
            commands::compare(&input::load(&a)?, &input::load(&b)?, minimal, &ctx)
        }
        Cmd::Snf { file } => commands::snf(&input::load(&file)?, &ctx),
        Cmd::Normalize { file } => commands::normalize(&input::load(&file)?, &ctx),
        Cmd::Phase { file } => commands::phase(&input::load(&file)?, &ctx),
        Cmd::Wall { file } => commands::wall(&input::load(&file)?, &ctx),
        Cmd::Gauss { file, k } => commands::gauss(&input::load(&file)?, k, &ctx),
        Cmd::CountClasses { file } => commands::count_classes(&input::load(&file)?, &ctx),
        Cmd::Selftest { max_size, seed } => Ok(selftest::run(max_size, seed, ctx.json)),
    }
}

/// Enumeration bound: `HEEGAARD_MAX_ENUM` when set, else the library
/// default.
fn search_limit_from_env() -> Result<usize, CliError> {
    match std::env::var("HEEGAARD_MAX_ENUM") {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::Parse(format!(
                "HEEGAARD_MAX_ENUM must be a nonnegative integer, found `{text}`"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEARCH_LIMIT),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Parse(
            "HEEGAARD_MAX_ENUM is not valid UTF-8".to_string(),
        )),
    }
}
