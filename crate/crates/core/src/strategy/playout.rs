//! Seeded playouts and the per-step degree checks of the cube arguments.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{Strategy, StrategyError, StrategyKind, TieBreak};
use crate::game::{GameGraph, GameState, Move, Player};
use crate::hypercube::{label_levels, CubeLayout};

/// The position as seen by the player about to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub mover: Player,
    pub position: usize,
    pub remaining_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayoutTrace {
    pub seed: u64,
    pub policies: [StrategyKind; 2],
    pub moves: Vec<Move>,
    /// One entry per move plus the final, terminal position.
    pub snapshots: Vec<Snapshot>,
    pub stuck_vertex: usize,
    pub stuck_player: Player,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("policy failed after {} moves (seed {seed}): {cause}", moves.len())]
pub struct PlayoutError {
    pub seed: u64,
    pub moves: Vec<Move>,
    pub snapshots: Vec<Snapshot>,
    pub cause: StrategyError,
}

fn snapshot(state: &GameState) -> Snapshot {
    Snapshot {
        mover: state.to_move(),
        position: state.position(),
        remaining_degree: state.remaining_degree(state.position()),
    }
}

/// Plays one complete game, each player following its policy with seeded
/// uniform tie-breaking.
pub fn random_playout(
    graph: &Arc<GameGraph>,
    policies: [StrategyKind; 2],
    seed: u64,
) -> Result<PlayoutTrace, PlayoutError> {
    let fail = |moves: Vec<Move>, snapshots: Vec<Snapshot>, cause| PlayoutError {
        seed,
        moves,
        snapshots,
        cause,
    };
    let mut players = Vec::with_capacity(2);
    for kind in policies {
        players.push(Strategy::new(kind, graph).map_err(|e| fail(Vec::new(), Vec::new(), e))?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::new(graph.clone());
    let mut moves = Vec::new();
    let mut snapshots = Vec::new();
    loop {
        snapshots.push(snapshot(&state));
        if state.is_terminal() {
            break;
        }
        let player = &mut players[state.to_move().index()];
        match player.next_move(&state, TieBreak::Seeded(&mut rng)) {
            Ok(mv) => {
                state
                    .apply_in_place(mv)
                    .expect("strategies only offer legal moves");
                moves.push(mv);
            }
            Err(e) => return Err(fail(moves, snapshots, e)),
        }
    }
    Ok(PlayoutTrace {
        seed,
        policies,
        moves,
        snapshots,
        stuck_vertex: state.position(),
        stuck_player: state.to_move(),
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("move {index} is illegal on replay")]
    IllegalMove { index: usize },
    #[error("snapshot {index} does not match the replayed position")]
    SnapshotMismatch { index: usize },
    #[error("expected {expected} snapshots, found {found}")]
    SnapshotCount { expected: usize, found: usize },
    #[error("recorded stuck position does not match the replay")]
    WrongEnding,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Number of steps at which the check failed.
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
    pub stuck_player: Player,
    pub stuck_vertex: usize,
    pub max_level: Option<u32>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const ODD_DEGREE_AWAY_FROM_START: &str = "odd-degree-away-from-empty";
pub const EVEN_DEGREE_AT_START: &str = "even-degree-at-empty";
pub const P1_STUCK_AT_START: &str = "p1-stuck-at-empty";
pub const P2_STUCK: &str = "p2-stuck";
pub const CONFINED_TO_LEVEL_TWO: &str = "levels-at-most-2";

fn count_check(name: &'static str, failures: usize) -> PropertyCheck {
    PropertyCheck {
        name,
        passed: failures == 0,
        failures,
    }
}

/// Replays `trace` and evaluates the properties that apply to it.
///
/// On a unit cube of even dimension started at the empty set: the mover sees
/// an odd remaining degree away from the empty set and an even one on it, and
/// the game ends with P1 stuck on the empty set. On a unit cube of odd
/// dimension with P1 following the odd-cube strategy: P2 is stuck and no
/// visited vertex lies above level 2.
pub fn check_playout_properties(
    trace: &PlayoutTrace,
    graph: &Arc<GameGraph>,
) -> Result<PropertyReport, TraceError> {
    if trace.snapshots.len() != trace.moves.len() + 1 {
        return Err(TraceError::SnapshotCount {
            expected: trace.moves.len() + 1,
            found: trace.snapshots.len(),
        });
    }
    let mut state = GameState::new(graph.clone());
    for (index, snap) in trace.snapshots.iter().enumerate() {
        if *snap != snapshot(&state) {
            return Err(TraceError::SnapshotMismatch { index });
        }
        if let Some(&mv) = trace.moves.get(index) {
            state
                .apply_in_place(mv)
                .map_err(|_| TraceError::IllegalMove { index })?;
        }
    }
    if !state.is_terminal()
        || state.position() != trace.stuck_vertex
        || state.to_move() != trace.stuck_player
    {
        return Err(TraceError::WrongEnding);
    }

    let levels = label_levels(graph);
    let max_level = levels
        .as_ref()
        .and_then(|l| trace.snapshots.iter().map(|s| l[s.position]).max());
    let mut checks = Vec::new();
    if let (Ok(layout), true) = (CubeLayout::detect(graph), graph.is_unit()) {
        let start = graph.start();
        let from_empty = layout.level(start) == 0;
        if layout.dim() % 2 == 0 && from_empty {
            let away = trace
                .snapshots
                .iter()
                .filter(|s| s.position != start && s.remaining_degree % 2 == 0)
                .count();
            let at = trace
                .snapshots
                .iter()
                .filter(|s| s.position == start && s.remaining_degree % 2 == 1)
                .count();
            let p1_stuck = trace.stuck_player == Player::P1 && trace.stuck_vertex == start;
            checks.push(count_check(ODD_DEGREE_AWAY_FROM_START, away));
            checks.push(count_check(EVEN_DEGREE_AT_START, at));
            checks.push(count_check(P1_STUCK_AT_START, usize::from(!p1_stuck)));
        }
        if layout.dim() % 2 == 1 && from_empty && trace.policies[0] == StrategyKind::P1OddCube {
            let high = trace
                .snapshots
                .iter()
                .filter(|s| layout.level(s.position) > 2)
                .count();
            checks.push(count_check(
                P2_STUCK,
                usize::from(trace.stuck_player != Player::P2),
            ));
            checks.push(count_check(CONFINED_TO_LEVEL_TWO, high));
        }
    }
    Ok(PropertyReport {
        checks,
        stuck_player: trace.stuck_player,
        stuck_vertex: trace.stuck_vertex,
        max_level,
    })
}

/// One line of a playout batch report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayoutSummary {
    pub seed: u64,
    pub length: usize,
    pub stuck_player: Option<Player>,
    pub stuck_vertex: Option<String>,
    pub max_level: Option<u32>,
    pub properties_pass: bool,
    pub failed_checks: Vec<&'static str>,
    pub error: Option<String>,
}

/// Runs `games` playouts with seeds `base_seed, base_seed + 1, ...` in
/// parallel. The result is in seed order and independent of thread count.
pub fn run_playouts(
    graph: &Arc<GameGraph>,
    policies: [StrategyKind; 2],
    games: u64,
    base_seed: u64,
) -> Vec<PlayoutSummary> {
    (0..games)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            match random_playout(graph, policies, seed) {
                Ok(trace) => match check_playout_properties(&trace, graph) {
                    Ok(report) => PlayoutSummary {
                        seed,
                        length: trace.moves.len(),
                        stuck_player: Some(report.stuck_player),
                        stuck_vertex: Some(graph.label(report.stuck_vertex).to_string()),
                        max_level: report.max_level,
                        properties_pass: report.all_passed(),
                        failed_checks: report
                            .checks
                            .iter()
                            .filter(|c| !c.passed)
                            .map(|c| c.name)
                            .collect(),
                        error: None,
                    },
                    Err(e) => failed_summary(seed, trace.moves.len(), e.to_string()),
                },
                Err(e) => failed_summary(seed, e.moves.len(), e.to_string()),
            }
        })
        .collect()
}

fn failed_summary(seed: u64, length: usize, error: String) -> PlayoutSummary {
    PlayoutSummary {
        seed,
        length,
        stuck_player: None,
        stuck_vertex: None,
        max_level: None,
        properties_pass: false,
        failed_checks: Vec::new(),
        error: Some(error),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::{diamond, k2};
    use crate::hypercube::unit_cube;

    const RANDOM: [StrategyKind; 2] = [StrategyKind::RandomLegal, StrategyKind::RandomLegal];

    #[test]
    fn q4_random_games_end_with_p1_stuck_on_empty() {
        let q4 = unit_cube(4).unwrap();
        for seed in 0..200 {
            let trace = random_playout(&q4, RANDOM, seed).unwrap();
            let report = check_playout_properties(&trace, &q4).unwrap();
            assert!(report.all_passed(), "seed {seed}: {report:?}");
            assert_eq!(report.checks.len(), 3);
            assert_eq!(trace.stuck_player, Player::P1);
            assert_eq!(q4.label(trace.stuck_vertex), "");
        }
    }

    #[test]
    fn k2_game_is_one_move() {
        let g = k2(1);
        let trace = random_playout(&g, RANDOM, 9).unwrap();
        assert_eq!(trace.moves.len(), 1);
        assert_eq!(trace.stuck_player, Player::P2);
        let report = check_playout_properties(&trace, &g).unwrap();
        assert!(report.checks.is_empty());
    }

    #[test]
    fn odd_cube_strategy_confines_play() {
        let q3 = unit_cube(3).unwrap();
        for seed in 0..100 {
            let trace = random_playout(
                &q3,
                [StrategyKind::P1OddCube, StrategyKind::RandomLegal],
                seed,
            )
            .unwrap();
            let report = check_playout_properties(&trace, &q3).unwrap();
            assert!(report.all_passed());
            assert_eq!(report.stuck_player, Player::P2);
            assert!(report.max_level.unwrap() <= 2);
        }
    }

    #[test]
    fn playouts_are_reproducible() {
        let q4 = unit_cube(4).unwrap();
        assert_eq!(
            random_playout(&q4, RANDOM, 42),
            random_playout(&q4, RANDOM, 42)
        );
        let a = run_playouts(&q4, RANDOM, 50, 1);
        let b = run_playouts(&q4, RANDOM, 50, 1);
        assert_eq!(a, b);
        assert_eq!(a[3].seed, 4);
    }

    #[test]
    fn corrupted_traces_are_detected() {
        let q4 = unit_cube(4).unwrap();
        let trace = random_playout(&q4, RANDOM, 5).unwrap();

        let mut bad = trace.clone();
        bad.snapshots[2].remaining_degree += 1;
        assert_eq!(
            check_playout_properties(&bad, &q4),
            Err(TraceError::SnapshotMismatch { index: 2 })
        );

        let mut bad = trace.clone();
        bad.moves[1].amount = 2;
        assert_eq!(
            check_playout_properties(&bad, &q4),
            Err(TraceError::IllegalMove { index: 1 })
        );

        let mut bad = trace.clone();
        bad.stuck_player = Player::P2;
        assert_eq!(
            check_playout_properties(&bad, &q4),
            Err(TraceError::WrongEnding)
        );

        let mut bad = trace;
        bad.snapshots.pop();
        assert!(matches!(
            check_playout_properties(&bad, &q4),
            Err(TraceError::SnapshotCount { .. })
        ));
    }

    #[test]
    fn policy_errors_carry_the_partial_game() {
        let err = random_playout(
            &diamond(),
            [StrategyKind::P1OddCube, StrategyKind::RandomLegal],
            0,
        )
        .unwrap_err();
        assert!(err.moves.is_empty());
        assert!(matches!(err.cause, StrategyError::NotACube { .. }));

        // p2even played by P1 fails on the first move
        let q4 = unit_cube(4).unwrap();
        let err = random_playout(
            &q4,
            [StrategyKind::P2EvenCube, StrategyKind::RandomLegal],
            0,
        )
        .unwrap_err();
        assert!(matches!(err.cause, StrategyError::WrongMover { .. }));
        assert_eq!(err.snapshots.len(), 1);
    }
}
