//! `bridgelab`: checks, synthesis and bridge tail reports from the command line.
//!
//! Exit codes: 0 when every checked condition or bound holds, 2 when one fails (the
//! report carries witnesses), 1 on usage, input or numerical errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;

pub const WORKERS_ENV: &str = "BRIDGELAB_WORKERS";

#[derive(Parser, Serialize, Debug)]
#[command(name = "bridgelab", version, about = "Reciprocal characteristics and bridge tail bounds")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Serialize, Debug)]
pub struct Common {
    /// Flat key = value file; flags on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "bridgelab-out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of seeded sampling streams. BRIDGELAB_WORKERS overrides it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Serialize, Debug)]
pub enum Cmd {
    /// Closed-walk conditions and patch bounds.
    Characteristics {
        #[command(subcommand)]
        cmd: CharCmd,
    },
    /// Jump intensities from prescribed characteristics.
    Synth {
        #[command(subcommand)]
        cmd: SynthCmd,
    },
    #[command(name = "pinned-poisson")]
    PinnedPoisson {
        #[command(subcommand)]
        cmd: PinnedCmd,
    },
    /// Bridge marginals and tails.
    Bridge {
        #[command(subcommand)]
        cmd: BridgeCmd,
    },
    /// JSON schemas of the reports.
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct GraphSource {
    /// File of "src dst" arcs.
    #[arg(long, conflicts_with = "lattice")]
    pub graph: Option<PathBuf>,
    /// Square lattice window of W × H vertices.
    #[arg(long, num_args = 2, value_names = ["W", "H"])]
    pub lattice: Option<Vec<usize>>,
    /// Treat a lattice window as a finite graph rather than a window into ℤ².
    #[arg(long)]
    pub finite: bool,
}

#[derive(Subcommand, Serialize, Debug)]
pub enum CharCmd {
    /// 2-cycle and face conditions on a lattice window.
    CheckLattice {
        #[command(flatten)]
        src: GraphSource,
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// Only check cycles at least this many steps inside the window.
        #[arg(long, default_value_t = 0)]
        margin: usize,
    },
    /// 2-cycle and basis-cycle conditions on a general graph.
    CheckTree {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// Root of the BFS tree; defaults to the first vertex.
        #[arg(long)]
        root: Option<String>,
    },
    /// Φ(c) ≤ base^ℓ(c) over every simple closed walk up to a length.
    Patch {
        #[command(flatten)]
        src: GraphSource,
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// Defaults to λ on lattices and λ/Δ elsewhere.
        #[arg(long)]
        base: Option<f64>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = bridgelab::graph::DEFAULT_WALK_CAP)]
        cap: usize,
    },
    /// Spanning tree and closed-walk basis.
    Basis {
        #[command(flatten)]
        src: GraphSource,
        #[arg(long)]
        root: Option<String>,
    },
}

#[derive(Subcommand, Serialize, Debug)]
pub enum SynthCmd {
    /// Rates from edge and face values on a lattice window.
    Lattice {
        #[arg(long, num_args = 2, value_names = ["W", "H"], required = true)]
        lattice: Vec<usize>,
        #[arg(long)]
        prescription: PathBuf,
    },
    /// Rates from edge and basis-cycle values on a general graph.
    Basis {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        prescription: PathBuf,
        #[arg(long)]
        root: Option<String>,
    },
    /// Constant-speed gauge of a rate file.
    Normalize {
        #[command(flatten)]
        src: GraphSource,
        #[arg(long)]
        rates: PathBuf,
    },
}

#[derive(Subcommand, Serialize, Debug)]
pub enum PinnedCmd {
    /// Exact tail of ρ_Φ beside its bounds.
    Tail {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        r_max: usize,
    },
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct DiffusionArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Grid intervals M.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Start point, comma separated; zero by default.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub r_step: f64,
    /// Half-width of a cube around the origin; paths leaving it are counted.
    #[arg(long = "box")]
    pub certified_box: Option<f64>,
}

#[derive(Subcommand, Serialize, Debug)]
pub enum BridgeCmd {
    /// Exact and sampled tails of a walk bridge.
    Ctmc {
        #[command(flatten)]
        src: GraphSource,
        /// Rate file; the simple walk of rate --lambda when absent.
        #[arg(long)]
        rates: Option<PathBuf>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        /// Rate of the reference walk for the envelope column.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Ornstein-Uhlenbeck bridge against the Gaussian envelope.
    Ou {
        #[command(flatten)]
        run: DiffusionArgs,
    },
    /// Gradient-diffusion bridge from the potential registry.
    Diffusion {
        /// ou, ou-plus-logcosh, quartic or zero.
        #[arg(long)]
        potential: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Quartic coefficient.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Use finite differences of U with this step instead of closed forms.
        #[arg(long)]
        fd_step: Option<f64>,
        #[command(flatten)]
        run: DiffusionArgs,
    },
}

#[derive(Subcommand, Serialize, Debug)]
pub enum ReportCmd {
    /// Validates a JSON report against a shipped schema.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        schema: String,
    },
    /// Prints a schema, or lists them.
    Schema {
        #[arg(long)]
        name: Option<String>,
    },
}

fn main() {
    std::process::exit(run(std::env::args().collect()));
}

/// Parses, runs and maps the outcome to an exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            print_subcommand_help(&argv);
            return 1;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    match commands::dispatch(&cli, &subcommand_path(&matches)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn subcommand_path(m: &ArgMatches) -> String {
    let mut parts = Vec::new();
    let mut cur = m;
    while let Some((name, sub)) = cur.subcommand() {
        parts.push(name.to_string());
        cur = sub;
    }
    parts.join(" ")
}

/// Help of the deepest subcommand named in `argv`.
fn print_subcommand_help(argv: &[String]) {
    let mut cmd = Cli::command();
    cmd.build();
    for a in argv.iter().skip(1) {
        if let Some(sub) = cmd.find_subcommand(a) {
            cmd = sub.clone();
        }
    }
    eprintln!("{}", cmd.render_help());
}
