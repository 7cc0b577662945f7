//! `majlat`: majorization lattice and LOCC analysis from the command line.

mod batch;
mod commands;
mod error;
mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maj_lattice::oracle::{Suite, VerifyConfig};
use maj_lattice::DEFAULT_EPSILON;
use serde_json::Value;

use crate::commands::LatticeOp;
use crate::error::{CliError, EXIT_USAGE};
use crate::input::{parse_spec, ParseOptions, VectorPair};

#[derive(Debug, Parser)]
#[command(
    name = "majlat",
    version,
    about = "Majorization lattice and LOCC conversion analysis"
)]
struct Cli {
    /// Parse weights as exact rationals ("n/d" strings or decimals).
    #[arg(long, global = true)]
    exact: bool,

    /// Comparison tolerance for float vectors.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,

    /// Zero-pad vectors of different dimension to a common one.
    #[arg(long, global = true)]
    pad: bool,

    /// Include the supremum flattening trace in the output.
    #[arg(long, global = true)]
    trace: bool,

    /// Seed for all random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full conversion analysis of psi towards phi.
    Analyze {
        /// Initial spectrum: JSON array or object, or @path.
        #[arg(long)]
        psi: String,
        /// Target spectrum: JSON array or object, or @path.
        #[arg(long)]
        phi: String,
    },
    /// A single lattice operation on two vectors.
    Lattice {
        #[arg(value_enum)]
        op: LatticeOp,
        p: String,
        q: String,
    },
    /// Analyze every record of a CSV or JSONL file.
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run invariant suites against grid and sampling oracles.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "12")]
        denoms: Vec<u64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Emit CSV of fidelity and distance gaps for sampled pairs.
    Scan {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: maj_lattice::Error| e.to_string())
}

fn print_json(value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::new("Serialize", e.to_string()))?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| CliError::io(e.to_string()))
}

fn read_pair(p: &str, q: &str, opts: ParseOptions, pad: bool) -> Result<VectorPair, CliError> {
    let pair = VectorPair::new(parse_spec(p, opts)?, parse_spec(q, opts)?)?;
    Ok(if pad { pair.padded()? } else { pair })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if !(cli.epsilon.is_finite() && cli.epsilon >= 0.0) {
        return Err(CliError::usage(
            "--epsilon must be a finite non-negative number",
        ));
    }
    let opts = ParseOptions {
        exact: cli.exact,
        epsilon: cli.epsilon,
    };
    match cli.command {
        Command::Analyze { psi, phi } => {
            let pair = read_pair(&psi, &phi, opts, cli.pad)?;
            print_json(&commands::analysis(&pair, cli.trace)?)?;
            Ok(0)
        }
        Command::Lattice { op, p, q } => {
            let pair = read_pair(&p, &q, opts, cli.pad)?;
            print_json(&commands::lattice(op, &pair, cli.trace)?)?;
            Ok(0)
        }
        Command::Batch { input, output } => {
            let file = File::create(&output)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", output.display())))?;
            let mut out = BufWriter::new(file);
            let summary = batch::run(&input, &mut out, opts, cli.pad, cli.trace)?;
            let summary = serde_json::to_value(summary)
                .map_err(|e| CliError::new("Serialize", e.to_string()))?;
            println!("{summary}");
            Ok(0)
        }
        Command::Verify {
            suite,
            dims,
            denoms,
            samples,
        } => {
            let config = VerifyConfig {
                dims,
                denoms,
                samples,
                seed: cli.seed,
            };
            let (report, code) = commands::verify(suite, &config)?;
            print_json(&report)?;
            Ok(code)
        }
        Command::Scan { dim, samples } => {
            let mut stdout = io::stdout().lock();
            commands::scan(dim, samples, cli.seed, &mut stdout)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            eprintln!("{}", CliError::usage(message.trim_end()).to_json());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(EXIT_USAGE)
        }
    }
}
