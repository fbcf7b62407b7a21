//! `hst`: encode, decode, sample, analyze and benchmark hypersuccinct trees.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "hst", version, about = "Hypersuccinct tree codes, tree sources and RMQ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode one BP tree into an `.hst` blob.
    Encode {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Micro-tree block size (default ⌈lg n / 8⌉).
        #[arg(long)]
        block: Option<usize>,
        /// BP text file, `-` for stdin.
        input: PathBuf,
        output: PathBuf,
    },
    /// Decode an `.hst` blob back to its BP line.
    Decode { input: PathBuf, output: PathBuf },
    /// Draw trees from a source, one BP line each.
    Sample {
        #[command(flatten)]
        source: SourceArg,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// JSON report: log-probability, empirical entropies and space breakdown.
    Analyze {
        #[command(flatten)]
        source: SourceArg,
        /// Order of the empirical type / shape entropy.
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long)]
        block: Option<usize>,
        input: PathBuf,
    },
    /// Range-minimum queries over integer arrays.
    Rmq {
        #[command(subcommand)]
        action: RmqAction,
    },
    /// Encode sampled trees and write one CSV row per (source, n, replicate).
    Bench {
        #[command(flatten)]
        source: SourceArg,
        /// Comma-separated sizes (heights for height-indexed sources).
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        #[arg(long)]
        block: Option<usize>,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum RmqAction {
    /// Store the Cartesian tree of an array as an `.hst` blob.
    Build {
        #[arg(long)]
        block: Option<usize>,
        array: PathBuf,
        output: PathBuf,
    },
    /// Answer `i j` queries (1-based, one pair per line) against a built index.
    Query {
        index: PathBuf,
        /// Query file, `-` for stdin.
        queries: PathBuf,
    },
    /// JSON run statistics of an array.
    Runs { array: PathBuf },
}

#[derive(Args, Debug)]
pub struct SourceArg {
    /// Source descriptor, e.g. `bst`, `binomial:0.5`, `wb:2/7`, `lrm`.
    #[arg(long = "source")]
    pub source: String,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct TargetArgs {
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Binary,
    Ordinal,
}

/// A failed run: usage problems exit with 2, bad input with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 2 {
                let first = e.to_string().lines().next().unwrap_or("usage error").to_string();
                eprintln!("hst: {}", first.trim_start_matches("error: "));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("hst: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("hst: {msg}");
            ExitCode::from(1)
        }
    }
}
