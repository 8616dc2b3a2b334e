//! Command-line front end. [`run`] is the whole program; the binary only
//! forwards the process arguments and standard streams.

mod bench;
mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::RunConfig;

use crate::aggregate::with_threads;
use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "contmean", version, about = "Continuous mean distance of weighted graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// File of `key = value` lines supplying defaults for the flags below.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "CONTMEAN_THREADS")]
    pub threads: Option<usize>,
    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative tolerance for distance comparisons.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// What to do with edges longer than the distance between their endpoints.
    #[arg(long, global = true, value_enum, value_name = "POLICY")]
    pub allow_shortcut_edges: Option<ShortcutPolicy>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// Graph file, edge list or JSON; `-` or no input flag reads stdin.
    #[arg(long, short)]
    pub input: Option<String>,
    /// Generate the graph instead: `KIND:N`, `KIND:N:ALPHA` or `KIND:N:LO..HI`.
    #[arg(long, conflicts_with = "input", value_name = "SPEC")]
    pub generate: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Continuous and discrete mean distance of a graph.
    Mean {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        backend: Option<BackendChoice>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Include the per-pair contribution table.
        #[arg(long)]
        contributions: bool,
    },
    /// All-pairs vertex distances as CSV.
    Distances {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Classification and mean of one edge pair.
    EdgePair {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, num_args = 2, value_names = ["I", "J"], required = true)]
        pair: Vec<usize>,
    },
    /// Roof diagram of one edge pair: planes, regions and volumes.
    Roof {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, num_args = 2, value_names = ["I", "J"], required = true)]
        pair: Vec<usize>,
    },
    /// Edge-pair and line-graph bound report.
    Bounds {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Subdivision bounds and limits.
    Subdivide {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: u32,
        /// Build the subdivided graph and measure its discrete mean.
        #[arg(long)]
        materialize: bool,
        /// Also check the tree subdivision bound with this many random
        /// points per edge (trees only).
        #[arg(long, value_name = "POINTS")]
        tree_points: Option<usize>,
    },
    /// Grid-quadrature reference value.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        /// Samples per axis.
        #[arg(long = "n", default_value_t = 512)]
        resolution: usize,
    },
    /// Write a generated graph to stdout as an edge list.
    Generate(GenerateArgs),
    /// Time the distance and pair-loop phases over growing instances.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub kind: crate::graph::GraphKind,
    #[arg(long)]
    pub n: usize,
    /// Uniform edge length (default 1).
    #[arg(long, conflicts_with_all = ["lo", "weights"])]
    pub alpha: Option<f64>,
    /// Lower end of random edge lengths.
    #[arg(long, requires = "hi")]
    pub lo: Option<f64>,
    #[arg(long, requires = "lo")]
    pub hi: Option<f64>,
    /// Explicit comma-separated edge lengths in generation order.
    #[arg(long, value_delimiter = ',', conflicts_with = "lo")]
    pub weights: Option<Vec<f64>>,
    /// Edge count for random connected graphs.
    #[arg(long)]
    pub edges: Option<usize>,
    /// Probability of duplicating an edge (random connected graphs).
    #[arg(long, default_value_t = 0.0)]
    pub parallel_prob: f64,
    /// Emit JSON instead of an edge list.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Target edge counts.
    #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [crate::graph::GraphKind::RandomConnected])]
    pub kinds: Vec<crate::graph::GraphKind>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendChoice>,
    /// Timing runs per instance; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeat: usize,
    /// Also time the tree closed form on a random tree with this many vertices.
    #[arg(long, value_name = "N")]
    pub tree_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum BackendChoice {
    #[default]
    Spt,
    Roof,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    Continuous,
    Discrete,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ShortcutPolicy {
    #[default]
    Error,
    Warn,
}

/// Exit status for a library error: bound failures are internal assertion
/// failures (1), everything else is bad input (2).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BoundViolation(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let config = match RunConfig::resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let input = match commands::load_input(&cli.command, &config, stdin) {
        Ok(input) => input,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        with_threads(config.threads, || commands::execute(&cli.command, &config, input))
    }));
    match outcome {
        Ok(Ok(Ok(out))) => {
            let _ = stdout.write_all(out.text.as_bytes());
            for warning in &out.warnings {
                let _ = writeln!(stderr, "warning: {warning}");
            }
            out.code
        }
        Ok(Ok(Err(e))) | Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| panic.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            let _ = writeln!(stderr, "internal error: {msg}");
            1
        }
    }
}
