//! Command-line front end: sketching, feature export, kernel matrices,
//! and statistical verification of the collision laws.
//!
//! Exit codes: 0 success, 1 validation failure, 2 verification failure.

mod bench;
mod sketch;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "stablesketch", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sketch a dataset and export the encoded features
    Sketch(SketchArgs),
    /// Write the pairwise collision-fraction matrix of a dataset as CSV
    Kernel(KernelArgs),
    /// Compare empirical collision rates against the closed-form laws
    Verify(VerifyArgs),
    /// Measure sketching throughput
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Sign,
    Cws,
}

/// A stability index as given on the command line. The literal `0+`
/// maps to the finite surrogate and is echoed back explicitly.
#[derive(Clone, Copy, Debug)]
struct AlphaFlag {
    value: f64,
    zero_plus: bool,
}

impl fmt::Display for AlphaFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero_plus {
            write!(f, "{} (requested 0+)", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

fn parse_alpha(s: &str) -> Result<AlphaFlag, String> {
    if s == "0+" {
        return Ok(AlphaFlag {
            value: stablesketch_core::ZERO_PLUS_SURROGATE,
            zero_plus: true,
        });
    }
    let value: f64 = s.parse().map_err(|_| format!("invalid alpha '{s}'"))?;
    stablesketch_core::Alpha::new(value).map_err(|e| e.to_string())?;
    Ok(AlphaFlag {
        value,
        zero_plus: false,
    })
}

#[derive(Args)]
struct SketchArgs {
    /// Dataset in "label idx:val ..." text format
    #[arg(long)]
    input: std::path::PathBuf,
    /// Where to write the encoded features (same text format)
    #[arg(long)]
    output: std::path::PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Stability index for sign sketches; accepts `0+`
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<AlphaFlag>,
    /// Number of projections or samples
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Feature buckets per CWS sample
    #[arg(long)]
    buckets: Option<usize>,
    /// Override the dataset dimension (so splits share one projection space)
    #[arg(long)]
    dim: Option<usize>,
    /// l1-normalize each vector before sketching
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    input: std::path::PathBuf,
    /// Where to write the n x n CSV matrix
    #[arg(long)]
    output: std::path::PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<AlphaFlag>,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Closed-form cases to check; tokens 2, 1, 0+ (comma-separated or repeated)
    #[arg(long = "alpha", value_delimiter = ',', default_value = "2,1,0+")]
    alphas: Vec<String>,
    /// Random vector pairs per case
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Sketch length; at least 1000
    #[arg(long, default_value_t = 10_000)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the machine-readable report here (JSON)
    #[arg(long)]
    report: Option<std::path::PathBuf>,
    /// Independent repetitions with derived seeds
    #[arg(long, default_value_t = 1)]
    repeats: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dim: usize,
    /// Nonzero entries per generated vector
    #[arg(long)]
    nnz: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = parse_alpha)]
    alpha: AlphaFlag,
    /// Number of vectors to sketch
    #[arg(long)]
    vectors: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sketch(args) => sketch::run_sketch(args),
        Command::Kernel(args) => sketch::run_kernel(args),
        Command::Verify(args) => verify::run(args),
        Command::Bench(args) => bench::run(args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
