//! `spanner`: generate instances, run online spanners, verify and benchmark them.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const COMPATIBILITY: &str = "\
Compatibility (generator -> algorithms):
  gen uniform (points, l2)       alg1 (dim <= 3 or so), greedy, offline-greedy
  gen uniform --norm l1          greedy, offline-greedy
  gen l1-lattice (points, l1)    greedy, offline-greedy
  gen girth [--star] (matrix)    greedy, offline-greedy
  gen hypercube (points, l2)     greedy, offline-greedy
  gen hst (hst tree)             hst, hst-tree, hst2e, greedy, offline-greedy
alg1 needs a number of cones exponential in the dimension and refuses
covers beyond 2e7 candidate directions.
Any matrix instance that is an ultrametric also runs hst and hst2e.
Every algorithm output can be checked with `verify`.

Exit codes: 0 ok, 1 usage or input error, 2 stretch bound violated,
3 generator failure or infeasible parameters.";

#[derive(Parser, Debug, Serialize)]
#[command(name = "spanner", version, about = "Online metric spanners", after_help = COMPATIBILITY)]
pub struct Cli {
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Stretch verification: none, after the last point, or after every prefix.
    #[arg(long, global = true, value_enum, default_value_t = VerifyMode::Final)]
    pub verify: VerifyMode,

    /// Permute the arrival order with this seed.
    #[arg(long, global = true)]
    pub shuffle: Option<u64>,

    /// Largest instance verified prefix by prefix.
    #[arg(long, global = true, default_value_t = spanner_core::eval::DEFAULT_PREFIX_CAP)]
    pub prefix_cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    None,
    Final,
    Prefix,
}

#[derive(Args, Debug, Serialize)]
pub struct RunArgs {
    /// Instance JSON (`-` for standard input).
    #[arg(long)]
    pub input: PathBuf,

    /// Also write a metrics report (JSON) here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Grid + near-sighted Yao spanner on Euclidean points; stretch (1+eps)^2.
    Alg1 {
        #[arg(long)]
        eps: f64,
        /// Per-level edge trace CSV (step,level,u,v,w).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Ordered greedy t-spanner on any metric.
    Greedy {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Classic offline greedy t-spanner (reference, not online).
    OfflineGreedy {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Nearest-first tree on powers-of-alpha rounding of an ultrametric; stretch 2 alpha^2/(alpha-1).
    Hst {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Nearest-first tree on an alpha-HST instance; stretch 2 alpha/(alpha-1).
    HstTree {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Multi-scale union of nearest-first trees on an ultrametric; stretch 2(1+3 eps).
    Hst2e {
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Generate an instance (JSON). Scheduled generators also write `<out stem>.schedule.json`.
    Gen {
        #[command(subcommand)]
        generator: Generator,
    },
    /// Run an experiment or sweep spec and write benchmark rows.
    Bench {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Check a spanner CSV against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Spanner CSV with header u,v,w.
        #[arg(long)]
        spanner: PathBuf,
        /// Declared stretch bound; exceeding it exits with code 2.
        #[arg(long)]
        bound: Option<f64>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Generator {
    /// Integer lattice in [0, 1/(eps d))^d with the batch schedule.
    L1Lattice {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Graph metric truncated at 2k-1 (petersen, heawood, mcgee or an edge-list file).
    Girth {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        k: usize,
        /// Append a hub at distance (2k-1)/2 from every point, arriving last.
        #[arg(long)]
        star: bool,
    },
    /// Spread +-1 vectors followed by the origin.
    Hypercube {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        size: usize,
    },
    /// Uniform random points in the unit cube.
    Uniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = NormArg::L2)]
        norm: NormArg,
    },
    /// Random hierarchically separated tree.
    Hst {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1.25)]
        min_ratio: f64,
        #[arg(long, default_value_t = 4.0)]
        max_ratio: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormArg {
    L1,
    L2,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    eprintln!("config: {}", serde_json::to_string(&cli).unwrap_or_default());
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
