mod commands;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::units::{Output, Units};

/// Certified Mahler measures, entropy bounds for crossed-product systems, and
/// small-measure polynomial searches.
#[derive(Debug, Parser)]
#[command(name = "mahlerkit", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Units for printed entropy values.
    #[arg(long, global = true, value_enum, default_value_t = Units::Nats)]
    units: Units,
    /// Target enclosure width in nats.
    #[arg(long, global = true, default_value_t = 1e-10)]
    eps: f64,
    /// Significant digits in text output.
    #[arg(long, global = true, default_value_t = 12)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certified Mahler measure of a Laurent polynomial in `t`.
    Mahler {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// Cross-check against the circle quadrature; exit 4 on disagreement.
        #[arg(long)]
        validate: bool,
    },
    /// Evaluate a system spec (JSON file, or `-` for stdin).
    Entropy { spec: PathBuf },
    /// Build a system with Cartan entropy `s` and total entropy `t` (nats or `inf`).
    Synthesize {
        #[arg(allow_hyphen_values = true)]
        s: String,
        #[arg(allow_hyphen_values = true)]
        t: String,
    },
    /// Exhaustive search for polynomials of smallest positive measure.
    Lehmer {
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
        #[arg(long, default_value_t = 1)]
        height: u64,
        /// Restrict to polynomials whose leading and constant coefficients are ±1.
        #[arg(long)]
        monic_reciprocal: bool,
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// JSON-lines checkpoint; an existing file with the same config is resumed.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Start over even if the checkpoint exists.
        #[arg(long)]
        restart: bool,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output { json: cli.json, units: cli.units, digits: cli.precision };
    let result = match cli.command {
        Command::Mahler { poly, validate } => commands::mahler(&poly, cli.eps, validate, &out),
        Command::Entropy { spec } => commands::entropy(&spec, cli.eps, &out),
        Command::Synthesize { s, t } => commands::synthesize(&s, &t, cli.eps, &out),
        Command::Lehmer { max_degree, height, monic_reciprocal, top, checkpoint, restart, workers } => {
            let config = mahlerkit::SearchConfig {
                max_degree,
                height,
                monic_reciprocal_only: monic_reciprocal,
                top_k: top,
                eps: cli.eps,
            };
            commands::lehmer(&config, checkpoint, !restart, workers, &out)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
