use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use polyproj::cli::{
    self, cmd_bench, cmd_cone, cmd_lp, cmd_project, cmd_verify, BenchOptions, ProjectOptions,
};
use std::path::PathBuf;

/// Exact projection onto finite intersections of halfspaces, with
/// verifiable certificates.
#[derive(Parser)]
#[command(name = "polyproj", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project the point of a problem file and print the certificate.
    Project {
        file: PathBuf,
        /// Feasibility tolerance; overrides the file's `tol` line.
        #[arg(long)]
        tol: Option<f64>,
        /// Cap on support-set cardinality searched.
        #[arg(long = "max-card")]
        max_card: Option<usize>,
        /// Worker width for the subset search.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check whether a candidate point is the projection.
    Verify {
        file: PathBuf,
        /// Candidate coordinates, whitespace-separated: "c_1 ... c_D".
        /// Negative leading coordinates are fine: the value is taken
        /// verbatim.
        #[arg(long, allow_hyphen_values = true)]
        candidate: String,
    },
    /// Moreau split and mixed representation for a cone file.
    Cone { file: PathBuf },
    /// Coordinate clipping and first-order verification for an lp file.
    Lp { file: PathBuf },
    /// Race the closed-form search against the iterative oracle on
    /// seeded random instances.
    Bench {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "dykstra")]
        oracle: String,
    },
}

fn main() {
    let parsed = Cli::try_parse().unwrap_or_else(|e| {
        let code = match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => cli::EXIT_SUCCESS,
            _ => cli::EXIT_INPUT_ERROR,
        };
        let _ = e.print();
        std::process::exit(code);
    });

    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    let code = match parsed.command {
        Command::Project { file, tol, max_card, parallel, json } => {
            let opts = ProjectOptions { tol, max_cardinality: max_card, parallel, json };
            cmd_project(&file, &opts, &mut out, &mut err)
        }
        Command::Verify { file, candidate } => cmd_verify(&file, &candidate, &mut out, &mut err),
        Command::Cone { file } => cmd_cone(&file, &mut out, &mut err),
        Command::Lp { file } => cmd_lp(&file, &mut out, &mut err),
        Command::Bench { dim, n, count, seed, oracle } => {
            let opts = BenchOptions { dim, n, count, seed, oracle };
            cmd_bench(&opts, &mut out, &mut err)
        }
    };
    std::process::exit(code);
}
