use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod input;

#[derive(Parser, Debug)]
#[command(
    name = "epsfree",
    version,
    about = "Exact mixed moments of epsilon-independent variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone, Copy)]
struct OutputArgs {
    /// Length cap for enumerations and recursions
    #[arg(long, global = true, env = "EPSFREE_CAP")]
    cap: Option<usize>,

    /// JSON output (the default)
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,

    /// Plain-text table output
    #[arg(long, global = true)]
    table: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List NC^eps[i] for a tuple of labels
    Enumerate {
        /// Graph JSON file ("-" for stdin)
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated label names
        #[arg(long, allow_hyphen_values = true)]
        tuple: String,
    },
    /// Mixed moment of a word of labels
    Moment {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        tuple: String,
        /// Distribution JSON file ("-" for stdin)
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Run the consistency suites over all tuples up to a length
    Crosscheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Seed for the random moment data
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra distribution data to check against
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Perturb one cumulant table (harness self-test; must fail)
        #[arg(long)]
        corrupt_table: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Cumulant,
    Definition,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = commands::Output {
        table: cli.output.table && !cli.output.json,
        cap: cli.output.cap,
    };
    let result = match cli.command {
        Command::Enumerate { graph, tuple } => commands::enumerate(&out, &graph, &tuple),
        Command::Moment {
            graph,
            tuple,
            dist,
            method,
        } => commands::moment(&out, &graph, &tuple, &dist, method),
        Command::Crosscheck {
            graph,
            max_n,
            seed,
            dist,
            corrupt_table,
        } => commands::crosscheck(&out, &graph, max_n, seed, dist.as_deref(), corrupt_table),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
