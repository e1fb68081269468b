mod commands;
mod experiment;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit statuses.
pub mod status {
    pub const OK: u8 = 0;
    /// Disproved, infeasible, or a rejected certificate.
    pub const FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    /// Not established within the depth or budget given.
    pub const NOT_VERIFIED: u8 = 3;
}

#[derive(Parser, Debug)]
#[command(name = "edgelink", version, about = "Edge-disjoint linkages, splitting-off and orientations")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Initial truncation depth.
    #[arg(long, global = true, default_value_t = 8)]
    pub depth: u32,
    #[arg(long = "depth-cap", global = true, default_value_t = 128)]
    pub depth_cap: u32,
    #[arg(long = "budget-nodes", global = true, default_value_t = 20_000_000)]
    pub budget_nodes: u64,
    /// Family descriptor file (`{family, params, roots}`).
    #[arg(long, global = true)]
    pub family: Option<PathBuf>,
    /// Graph file: edge list or `{vertices, edges}` document.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Directory for certificate and transcript; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Edge-connectivity of a finite graph with a minimum cut.
    Connectivity,
    /// Lifting-graph report at a vertex.
    Liftgraph {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        k: usize,
    },
    /// Admissible splitting at a vertex.
    Split {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        k: usize,
    },
    /// Linking fan on a family, from a request file or a random grid request.
    Fan {
        #[arg(long)]
        request: Option<PathBuf>,
        /// Number of random rays when no request file is given.
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    #[command(subcommand)]
    Linkage(LinkageCommand),
    /// Immersion of a 2k-edge-connected graph around a vertex set.
    Immerse {
        #[arg(long)]
        k: usize,
        /// Vertex of A0 as `x,y` or `x,y,cell`; repeatable.
        #[arg(long = "vertex")]
        vertices: Vec<String>,
    },
    #[command(subcommand)]
    Orient(OrientCommand),
    /// Replays a certificate with the independent checkers.
    Verify { certificate: PathBuf },
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Subcommand, Debug)]
pub enum LinkageCommand {
    /// Solves an instance document, or the pairs given with `--graph`.
    Solve {
        instance: Option<PathBuf>,
        /// Terminal pair `s-t`; repeatable, used with `--graph`.
        #[arg(long = "pair")]
        pairs: Vec<String>,
    },
    Verify { certificate: PathBuf },
    /// Writes the even-k cycle instance and its infeasibility certificate.
    Counterexample {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OrientCommand {
    /// k-arc-connected orientation of a finite 2k-edge-connected graph.
    Finite {
        #[arg(long)]
        k: usize,
    },
    /// Rounds of growing orientations on a family.
    Infinite {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    /// Structure classes of lifting graphs on random (s,k)-edge-connected instances.
    Liftgraph {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Search for balanced-bipartite lifting graphs with odd k.
    OddK {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Solver verdicts on random (k+1)-edge-connected instances.
    Linkage {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_status(&e))
        }
    }
}
