mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{AlphabetChoice, FileConfig, Format, Overrides, RunConfig};

/// Exact computations in conformal down-up algebras L(f, r, s, 0), with
/// r = z^n1, s = z^d and mu^-1 = z^n2.
#[derive(Parser)]
#[command(name = "downup", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Exponent of s = z^d; must be at least 1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    d: Option<i64>,
    /// Exponent of r = z^n1, so b1 = n1/d.
    #[arg(long, global = true, allow_hyphen_values = true)]
    n1: Option<i64>,
    /// Exponent of mu^-1 = z^n2, so b2 = n2/d.
    #[arg(long, global = true, allow_hyphen_values = true)]
    n2: Option<i64>,
    /// Coefficients of f, constant term first, e.g. "1, 0, z^2".
    #[arg(long, global = true, allow_hyphen_values = true)]
    f: Option<String>,
    /// Seed for the verification suites [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples per suite [default: 100].
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    alphabet: Option<AlphabetChoice>,
    /// TOML file with any of the keys d, n1, n2, f, seed, samples, format, alphabet.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Index sets I and J for the alpha-type derivations.
    Indices,
    /// Solves f(X) = s g(X) - g(rX) for g.
    Conformal,
    /// Multiplies two elements and prints the normal form.
    Mul { lhs: String, rhs: String },
    /// Applies a derivation, e.g. "c0 = h^2*k" or "w = 1; multiplier = {1: 1}".
    Derive { spec: String, target: String },
    /// Decides whether the c-type derivation with the given c0 is inner.
    Inner { c0: String },
    /// Runs a property suite, or "all".
    Verify { suite: String },
    /// Rewrites an expression in normal form.
    Translate { expr: String },
}

fn run(cli: Cli) -> Result<commands::Report> {
    let g = cli.global;
    let file = match &g.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        d: g.d,
        n1: g.n1,
        n2: g.n2,
        f: g.f,
        seed: g.seed,
        samples: g.samples,
        format: g.format,
        alphabet: g.alphabet,
    };
    let cfg = RunConfig::resolve(flags, file)?;
    let rep = match &cli.command {
        Command::Indices => commands::indices(&cfg),
        Command::Conformal => commands::conformal(&cfg),
        Command::Mul { lhs, rhs } => commands::mul(&cfg, lhs, rhs),
        Command::Derive { spec, target } => commands::derive(&cfg, spec, target),
        Command::Inner { c0 } => commands::inner(&cfg, c0),
        Command::Verify { suite } => commands::verify(&cfg, suite),
        Command::Translate { expr } => commands::translate(&cfg, expr),
    }?;
    match cfg.format {
        Format::Human => rep.lines.iter().for_each(|l| println!("{l}")),
        Format::Structured => println!("{}", serde_json::to_string_pretty(&rep.to_json())?),
    }
    Ok(rep)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(rep) if rep.ok => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
