//! Interactive terminal play. The loop reads from any `BufRead` and writes to
//! any `Write`, so scripted sessions drive it the same way a terminal does.

use std::io::{BufRead, Write};
use std::sync::Arc;

use graphnim::solver::SolveConfig;
use graphnim::strategy::StrategyKind;
use graphnim::{GameGraph, GameState, Move, Player};

use crate::commands::check_policy;
use crate::engine::Engine;
use crate::error::CliError;
use crate::report::{parse_vertex, render_board, show};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Seats {
    HumanFirst,
    EngineFirst,
    /// Two humans share the terminal; no engine.
    HotSeat,
}

#[derive(Clone, Debug)]
pub struct PlayConfig {
    pub engine: StrategyKind,
    pub seats: Seats,
    pub seed: u64,
    pub solver: SolveConfig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayResult {
    pub winner: Player,
    pub resigned: bool,
    pub moves: Vec<Move>,
    pub final_state: GameState,
}

const SYNTAX: &str =
    "commands: move <vertex> <amount> | moves | help   (∅ or {} names the empty vertex)";

enum Command {
    Move(Move),
    ListMoves,
    Help,
    Empty,
}

fn parse_command(graph: &GameGraph, line: &str) -> Result<Command, String> {
    let words: Vec<&str> = line.split_whitespace().collect();
    match words.as_slice() {
        [] => Ok(Command::Empty),
        ["moves"] => Ok(Command::ListMoves),
        ["help"] => Ok(Command::Help),
        ["move", vertex, amount] => {
            let to = parse_vertex(graph, vertex).ok_or_else(|| format!("no vertex {vertex:?}"))?;
            let amount = amount
                .parse()
                .map_err(|_| format!("amount {amount:?} is not a non-negative integer"))?;
            Ok(Command::Move(Move::new(to, amount)))
        }
        _ => Err(format!("cannot read {:?}", line.trim())),
    }
}

pub fn play<R: BufRead, W: Write>(
    graph: Arc<GameGraph>,
    config: &PlayConfig,
    mut input: R,
    mut out: W,
) -> Result<PlayResult, CliError> {
    let engine_seat = match config.seats {
        Seats::HumanFirst => Some(Player::P2),
        Seats::EngineFirst => Some(Player::P1),
        Seats::HotSeat => None,
    };
    let mut engine = match engine_seat {
        Some(seat) => {
            check_policy(config.engine, seat, &graph)?;
            Some(Engine::new(
                config.engine,
                &graph,
                config.seed,
                config.solver.clone(),
            )?)
        }
        None => None,
    };

    let mut state = GameState::new(graph.clone());
    let mut moves = Vec::new();
    writeln!(out, "{SYNTAX}")?;
    write!(out, "{}", render_board(&state))?;
    let mut line = String::new();
    loop {
        let mover = state.to_move();
        if state.is_terminal() {
            writeln!(
                out,
                "{mover} is stuck on {}. {} wins.",
                show(graph.label(state.position())),
                mover.opponent()
            )?;
            return Ok(PlayResult {
                winner: mover.opponent(),
                resigned: false,
                moves,
                final_state: state,
            });
        }

        let mv = match (&mut engine, engine_seat) {
            (Some(engine), Some(seat)) if seat == mover => {
                let mv = engine.reply(&state)?;
                writeln!(
                    out,
                    "engine ({}) plays move {} {}",
                    engine.kind(),
                    show(graph.label(mv.to)),
                    mv.amount
                )?;
                mv
            }
            _ => {
                write!(out, "{mover}> ")?;
                out.flush()?;
                line.clear();
                if input.read_line(&mut line)? == 0 {
                    writeln!(out)?;
                    writeln!(out, "{mover} resigns. {} wins.", mover.opponent())?;
                    return Ok(PlayResult {
                        winner: mover.opponent(),
                        resigned: true,
                        moves,
                        final_state: state,
                    });
                }
                match parse_command(&graph, &line) {
                    Ok(Command::Move(mv)) => match state.check_move(mv) {
                        Ok(_) => mv,
                        Err(e) => {
                            writeln!(out, "illegal: {e}")?;
                            continue;
                        }
                    },
                    Ok(Command::ListMoves) => {
                        let listed: Vec<String> = state
                            .legal_moves()
                            .iter()
                            .map(|m| format!("{} {}", show(graph.label(m.to)), m.amount))
                            .collect();
                        writeln!(out, "legal: {}", listed.join(", "))?;
                        continue;
                    }
                    Ok(Command::Help) => {
                        writeln!(out, "{SYNTAX}")?;
                        continue;
                    }
                    Ok(Command::Empty) => continue,
                    Err(e) => {
                        writeln!(out, "illegal: {e}")?;
                        continue;
                    }
                }
            }
        };
        state = state.apply_move(mv).expect("move was checked");
        moves.push(mv);
        write!(out, "{}", render_board(&state))?;
    }
}
