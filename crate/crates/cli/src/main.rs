//! `kpotent`: construct, enumerate and count (k+1)-potent matrices.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod report;

#[derive(Parser, Debug)]
#[command(
    name = "kpotent",
    version,
    about = "Potent elements of upper triangular and incidence algebras"
)]
struct Cli {
    /// Emit `{verb, inputs, result, checks}` as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Oracle worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Target {
    /// `chain:n`, `star:n:m2,...`, `rhombus:n:m`, `y:n:m:l`, or `@file`.
    #[arg(long)]
    poset: String,
    /// Field order `q` (a prime power) or `p^e`.
    #[arg(long)]
    field: String,
    #[arg(long)]
    k: u32,
    /// Restrict the diagonal to {0, 1, ω, …, ω^{k-1}}.
    #[arg(long)]
    roots_of_unity: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the potent scalars `x^{k+1} = x` of a field.
    Roots {
        #[arg(long)]
        field: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        roots_of_unity: bool,
    },
    /// Count potent elements by closed form.
    Count {
        #[arg(long)]
        poset: String,
        #[arg(long)]
        k: Option<u32>,
        /// Evaluate over this field; `s` follows from the field and `k`.
        #[arg(long)]
        field: Option<String>,
        /// Number of potent scalars, for a symbolic count.
        #[arg(long)]
        s: Option<usize>,
        /// Print the polynomial in `q` instead of its value.
        #[arg(long)]
        symbolic: bool,
    },
    /// Complete a diagonal and free entries to the unique potent matrix.
    Complete {
        #[command(flatten)]
        target: Target,
        /// Diagonal element codes in extension order.
        #[arg(long, num_args = 1.., required = true)]
        diag: Vec<u64>,
        /// Free entries as `i,j=code` with 1-based indices.
        #[arg(long, num_args = 0..)]
        free: Vec<String>,
    },
    /// List every potent element, built from diagonals and free entries.
    Enumerate {
        #[command(flatten)]
        target: Target,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
        /// Stop listing after this many matrices; the count is still exact.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Compare closed-form counts with the exhaustive oracle.
    Verify {
        /// Run the extended case matrix.
        #[arg(long)]
        all: bool,
        /// A single case instead of the built-in matrix.
        #[arg(long, requires_all = ["field", "k"])]
        poset: Option<String>,
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        /// Maximum oracle states, e.g. `1e7`; defaults to `KPOTENT_CAP` or 1e8.
        #[arg(long)]
        cap: Option<String>,
    },
    /// Recompute the reference tables and diff them against the golden files.
    Tables {
        /// Table ids (1–7, 9–12); all when omitted.
        #[arg(long, num_args = 1..)]
        id: Vec<u32>,
        /// Directory holding `tableNN.txt` and `errata.txt`; the bundled
        /// copies are used otherwise.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
    },
    /// Check the sorted-partition count against the composition count.
    SlowikEquiv {
        #[arg(long, default_value_t = 6)]
        n_max: u64,
        #[arg(long, default_value_t = 5)]
        l_max: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.text);
            }
            if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<commands::UsageError>() {
                Some(_) => ExitCode::from(2),
                None => ExitCode::from(1),
            }
        }
    }
}
