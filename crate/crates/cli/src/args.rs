use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "laplace",
    version,
    about = "Reverse Cholesky and Gram-Schmidt least squares, with Laplace's error analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor a normal system and print M, L and the reduced right-hand side.
    Factor {
        #[command(flatten)]
        input: InputArgs,
        /// Print every intermediate system.
        #[arg(long)]
        snapshots: bool,
        #[arg(long)]
        json: bool,
    },
    /// Solve for the leading variables.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        /// Number of leading variables to solve for.
        #[arg(long, value_parser = positive)]
        vars: usize,
        #[arg(long)]
        json: bool,
    },
    /// Poids, log10 poids and standard deviation of one or all variables.
    #[command(group(ArgGroup::new("which").required(true).args(["var", "all"])))]
    Variance {
        #[command(flatten)]
        input: InputArgs,
        /// Variable number, starting at 1.
        #[arg(long, value_parser = positive)]
        var: Option<usize>,
        #[arg(long)]
        all: bool,
        /// Estimate the noise variance with s - n degrees of freedom.
        #[arg(long)]
        unbiased: bool,
        #[arg(long)]
        json: bool,
    },
    /// Probability that an error lies within ±U.
    #[command(group(ArgGroup::new("weight").required(true).args(["log10_poids", "poids"])))]
    Confidence {
        #[arg(long, allow_hyphen_values = true)]
        log10_poids: Option<f64>,
        #[arg(long)]
        poids: Option<f64>,
        #[arg(long)]
        half_width: f64,
        #[arg(long)]
        json: bool,
    },
    /// Reproduce the historical computation and check it.
    Replicate {
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        json: bool,
        /// Also write the dataset's normal system to this file.
        #[arg(long, value_name = "PATH")]
        export_system: Option<PathBuf>,
    },
    /// Replay the elimination at a fixed number of significant digits.
    PrecisionReplay {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(2..=15))]
        digits: u32,
        /// Recompute each printed step from the printed step before it
        /// (built-in datasets only).
        #[arg(long, requires = "dataset")]
        anchored: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// A normal-system or regression file, or a `factor --json` document.
    pub path: Option<PathBuf>,
    /// A built-in dataset instead of a file.
    #[arg(long)]
    pub dataset: Option<String>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}
