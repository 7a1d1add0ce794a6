//! Command-line front end for graphnim: graph generation, solving, strategy
//! verification, playout batches, terminal play and a JSON session service.

pub mod commands;
pub mod engine;
pub mod error;
pub mod play;
pub mod report;
pub mod serve;

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use graphnim::strategy::{Quantifier, StrategyKind};

pub use error::{CliError, ExitKind};

#[derive(Debug, Parser)]
#[command(
    name = "graphnim",
    version,
    about = "Nim on graphs: solve, verify and play"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Limits {
    /// Use cube symmetry in the transposition table (cubes up to dimension 7)
    #[arg(long)]
    pub symmetry: bool,
    /// Abort after expanding this many nodes
    #[arg(long, value_name = "N")]
    pub nodes: Option<u64>,
    /// Abort after this many seconds
    #[arg(long, value_name = "S", value_parser = parse_seconds)]
    pub time: Option<Duration>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a hypercube board in the graph file format
    Gen {
        #[arg(long, value_name = "N")]
        cube: u32,
        /// Uniform edge weight
        #[arg(long, value_name = "K", default_value_t = 1)]
        weight: u32,
        /// Keep only vertices of level at most L
        #[arg(long, value_name = "L")]
        truncate: Option<u32>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Decide who wins a board from its start vertex
    Solve {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Exhaustively check a cube strategy against every opponent line
    Verify {
        #[arg(long, value_name = "N")]
        cube: u32,
        /// p1odd or p2even
        #[arg(long)]
        strategy: StrategyKind,
        /// all: every compliant move must win; exists: some compliant move must win
        #[arg(long)]
        quantifier: Quantifier,
        #[command(flatten)]
        limits: Limits,
    },
    /// Run seeded random games on a unit cube and check the parity properties
    Playouts {
        #[arg(long, value_name = "N")]
        cube: u32,
        #[arg(long, value_name = "G")]
        games: u64,
        #[arg(long, value_name = "S")]
        seed: u64,
        #[arg(long, default_value = "random")]
        p1: StrategyKind,
        #[arg(long, default_value = "random")]
        p2: StrategyKind,
    },
    /// Play on the terminal against an engine or another human
    Play {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[arg(long, default_value = "optimal")]
        engine: StrategyKind,
        /// Human plays P1 (default)
        #[arg(long, conflicts_with_all = ["engine_first", "hot_seat"])]
        human_first: bool,
        /// Engine plays P1
        #[arg(long, conflicts_with = "hot_seat")]
        engine_first: bool,
        /// Two humans, no engine
        #[arg(long)]
        hot_seat: bool,
        /// Seed for the random engine
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Engine thinking limit in seconds
        #[arg(long, value_name = "S", value_parser = parse_seconds)]
        time: Option<Duration>,
    },
    /// Serve the JSON session protocol over HTTP
    Serve {
        #[arg(long, value_name = "P")]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Board used when a new session does not send one
        #[arg(long, value_name = "PATH")]
        graph: Option<PathBuf>,
        /// Engine and analysis limit in seconds per request
        #[arg(long, value_name = "S", value_parser = parse_seconds)]
        time: Option<Duration>,
    },
}

fn parse_seconds(text: &str) -> Result<Duration, String> {
    let secs: f64 = text
        .parse()
        .map_err(|_| format!("{text:?} is not a number"))?;
    if !secs.is_finite() || secs <= 0.0 {
        return Err(format!("{text} is not a positive number of seconds"));
    }
    Ok(Duration::from_secs_f64(secs))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut err = std::io::stderr();
    match cli.command {
        Command::Gen {
            cube,
            weight,
            truncate,
            out: path,
        } => commands::gen(cube, weight, truncate, &path, &mut out),
        Command::Solve { graph, limits } => {
            let graph = commands::load_graph_file(&graph)?;
            let config = commands::solve_config(limits.symmetry, limits.nodes, limits.time);
            commands::solve(graph, config, &mut out, &mut err)
        }
        Command::Verify {
            cube,
            strategy,
            quantifier,
            limits,
        } => {
            let config = commands::solve_config(limits.symmetry, limits.nodes, limits.time);
            commands::verify(cube, strategy, quantifier, config, &mut out, &mut err)
        }
        Command::Playouts {
            cube,
            games,
            seed,
            p1,
            p2,
        } => {
            let mut out = std::io::BufWriter::new(out);
            let result = commands::playouts(cube, games, seed, [p1, p2], &mut out);
            out.flush()?;
            result
        }
        Command::Play {
            graph,
            engine,
            engine_first,
            hot_seat,
            seed,
            time,
            ..
        } => {
            let graph = Arc::new(commands::load_graph_file(&graph)?);
            let seats = if hot_seat {
                play::Seats::HotSeat
            } else if engine_first {
                play::Seats::EngineFirst
            } else {
                play::Seats::HumanFirst
            };
            let config = play::PlayConfig {
                engine,
                seats,
                seed,
                solver: commands::solve_config(false, None, time),
            };
            play::play(graph, &config, std::io::stdin().lock(), out).map(|_| ())
        }
        Command::Serve {
            port,
            host,
            graph,
            time,
        } => {
            let graph = graph.map(|p| commands::load_graph_file(&p)).transpose()?;
            let addr = SocketAddr::new(host, port);
            serve::serve(
                addr,
                graph,
                commands::solve_config(false, None, time),
                |bound| {
                    println!("listening on http://{bound}");
                },
            )
        }
    }
}
