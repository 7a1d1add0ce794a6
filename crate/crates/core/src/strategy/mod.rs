//! Playing strategies for unit-weight hypercubes, their exhaustive
//! verification, and a seeded random-playout harness.
//!
//! * [`StrategyKind::P1OddCube`]: on an odd-dimensional cube the first player
//!   only ever moves to level 1, which keeps the game inside levels 0..=2.
//! * [`StrategyKind::P2EvenCube`]: on an even-dimensional cube the second
//!   player may move anywhere; any legal move wins.

mod playout;
mod verify;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameGraph, GameState, Move, Player};
use crate::hypercube::{CubeLayout, Parity};
use crate::solver::{AbortReason, SolveConfig, Solver};

pub use playout::{
    check_playout_properties, random_playout, run_playouts, PlayoutError, PlayoutSummary,
    PlayoutTrace, PropertyCheck, PropertyReport, Snapshot, TraceError,
};
pub use verify::{verify_strategy, Quantifier, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    P1OddCube,
    P2EvenCube,
    SolverOptimal,
    RandomLegal,
}

impl StrategyKind {
    /// The player this strategy is written for, if it is tied to one.
    pub fn player(self) -> Option<Player> {
        match self {
            StrategyKind::P1OddCube => Some(Player::P1),
            StrategyKind::P2EvenCube => Some(Player::P2),
            _ => None,
        }
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            StrategyKind::P1OddCube => "p1odd",
            StrategyKind::P2EvenCube => "p2even",
            StrategyKind::SolverOptimal => "optimal",
            StrategyKind::RandomLegal => "random",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p1odd" | "P1OddCube" => Ok(StrategyKind::P1OddCube),
            "p2even" | "P2EvenCube" => Ok(StrategyKind::P2EvenCube),
            "optimal" | "SolverOptimal" => Ok(StrategyKind::SolverOptimal),
            "random" | "RandomLegal" => Ok(StrategyKind::RandomLegal),
            other => Err(format!(
                "unknown strategy {other:?} (expected p1odd, p2even, optimal or random)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("{kind} needs a hypercube board")]
    NotACube { kind: StrategyKind },
    #[error("{kind} needs unit edge weights")]
    NotUnitWeight { kind: StrategyKind },
    #[error("{kind} does not apply to a cube of dimension {dim}")]
    WrongDimension { kind: StrategyKind, dim: u32 },
    #[error("{kind} plays for {expected}, but {found} is on move")]
    WrongMover {
        kind: StrategyKind,
        expected: Player,
        found: Player,
    },
    #[error("{kind} expects to move from a vertex of {expected:?} parity, piece is on {vertex:?}")]
    WrongParity {
        kind: StrategyKind,
        expected: Parity,
        vertex: String,
    },
    /// Legal moves exist but none keeps play within levels 0..=2. On an
    /// odd cube reached by compliant play this refutes the confinement claim.
    #[error("LEMMA VIOLATION: no level-1 move from {vertex:?} although legal moves exist")]
    NoCompliantMove { vertex: String },
    #[error("{kind} has no move: {player} is stuck")]
    Stuck { kind: StrategyKind, player: Player },
    #[error("{0} cannot be verified; only p1odd and p2even are strategies for one player")]
    NotVerifiable(StrategyKind),
    #[error("solver aborted: {0}")]
    SolverAborted(AbortReason),
}

/// How [`Strategy::next_move`] picks among compliant moves.
pub enum TieBreak<'a> {
    /// Lowest move in enumeration order.
    Deterministic,
    /// Uniform over the compliant moves.
    Seeded(&'a mut ChaCha8Rng),
}

/// A strategy bound to one board, with its applicability checked up front.
pub struct Strategy {
    kind: StrategyKind,
    layout: Option<CubeLayout>,
    solver: Option<Solver>,
}

impl Strategy {
    pub fn new(kind: StrategyKind, graph: &GameGraph) -> Result<Self, StrategyError> {
        Self::with_solver_config(kind, graph, SolveConfig::default())
    }

    pub fn with_solver_config(
        kind: StrategyKind,
        graph: &GameGraph,
        config: SolveConfig,
    ) -> Result<Self, StrategyError> {
        let layout = match kind {
            StrategyKind::P1OddCube | StrategyKind::P2EvenCube => {
                let layout =
                    CubeLayout::detect(graph).map_err(|_| StrategyError::NotACube { kind })?;
                if !graph.is_unit() {
                    return Err(StrategyError::NotUnitWeight { kind });
                }
                let odd = layout.dim() % 2 == 1;
                if odd != (kind == StrategyKind::P1OddCube) {
                    return Err(StrategyError::WrongDimension {
                        kind,
                        dim: layout.dim(),
                    });
                }
                Some(layout)
            }
            _ => None,
        };
        let solver = (kind == StrategyKind::SolverOptimal).then(|| Solver::new(config));
        Ok(Self {
            kind,
            layout,
            solver,
        })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    fn check_turn(&self, state: &GameState) -> Result<(), StrategyError> {
        let (Some(expected), Some(layout)) = (self.kind.player(), &self.layout) else {
            return Ok(());
        };
        let kind = self.kind;
        if state.to_move() != expected {
            return Err(StrategyError::WrongMover {
                kind,
                expected,
                found: state.to_move(),
            });
        }
        let parity = match kind {
            StrategyKind::P1OddCube => Parity::Even,
            _ => Parity::Odd,
        };
        if layout.vertex(state.position()).parity() != parity {
            return Err(StrategyError::WrongParity {
                kind,
                expected: parity,
                vertex: state.graph().label(state.position()).to_string(),
            });
        }
        Ok(())
    }

    /// Moves the strategy allows in `state`. Empty when the player on move
    /// has no legal move at all.
    pub fn compliant_moves(&mut self, state: &GameState) -> Result<Vec<Move>, StrategyError> {
        self.check_turn(state)?;
        let legal = state.legal_moves();
        match self.kind {
            StrategyKind::P1OddCube => {
                let layout = self.layout.as_ref().expect("checked in constructor");
                let compliant: Vec<Move> = legal
                    .iter()
                    .copied()
                    .filter(|m| layout.level(m.to) <= 2)
                    .collect();
                if compliant.is_empty() && !legal.is_empty() {
                    return Err(StrategyError::NoCompliantMove {
                        vertex: state.graph().label(state.position()).to_string(),
                    });
                }
                Ok(compliant)
            }
            StrategyKind::P2EvenCube | StrategyKind::RandomLegal => Ok(legal),
            StrategyKind::SolverOptimal => {
                let solver = self
                    .solver
                    .as_mut()
                    .expect("optimal strategy owns a solver");
                let wins = solver
                    .winning_moves(state)
                    .map_err(StrategyError::SolverAborted)?;
                // in a lost position every move is equally bad
                Ok(if wins.is_empty() { legal } else { wins })
            }
        }
    }

    pub fn next_move(
        &mut self,
        state: &GameState,
        tie: TieBreak<'_>,
    ) -> Result<Move, StrategyError> {
        let moves = self.compliant_moves(state)?;
        if moves.is_empty() {
            return Err(StrategyError::Stuck {
                kind: self.kind,
                player: state.to_move(),
            });
        }
        Ok(match tie {
            TieBreak::Deterministic => moves[0],
            TieBreak::Seeded(rng) => moves[rng.random_range(0..moves.len())],
        })
    }
}

pub fn compliant_moves(state: &GameState, kind: StrategyKind) -> Result<Vec<Move>, StrategyError> {
    Strategy::new(kind, state.graph())?.compliant_moves(state)
}

pub fn next_move(
    state: &GameState,
    kind: StrategyKind,
    tie: TieBreak<'_>,
) -> Result<Move, StrategyError> {
    Strategy::new(kind, state.graph())?.next_move(state, tie)
}

/// Replays unit moves along `labels` from the fresh state of `graph`.
pub fn walk(graph: &Arc<GameGraph>, labels: &[&str]) -> Option<GameState> {
    let mut state = GameState::new(graph.clone());
    for label in labels {
        let to = graph.vertex_index(label)?;
        state = state.apply_move(Move::new(to, 1)).ok()?;
    }
    Some(state)
}
