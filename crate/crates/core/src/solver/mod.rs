//! Exact solving by memoized negamax.
//!
//! Every move removes at least one unit of weight, so the game tree is finite
//! and a position's value is a plain win/loss for the player to move. The
//! transposition table maps a [`StateKey`] (position plus remaining weights)
//! to that value. On generated cubes the key can optionally be reduced over
//! coordinate permutations.

mod key;
mod oracle;

use std::sync::Arc;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::game::{GameGraph, GameState, Move, Outcome};
use crate::hypercube::label_levels;

pub use key::{canonicalize, CubeSymmetry, KeyEncoder, StateKey, SYMMETRY_DIMENSION_CAP};
pub use oracle::{oracle_solve, oracle_solve_with_guard, OracleRefused, ORACLE_WEIGHT_GUARD};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub use_symmetry: bool,
    pub table_capacity: usize,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            use_symmetry: false,
            table_capacity: 1 << 24,
            time_limit: None,
            node_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AbortReason {
    NodeLimit,
    TimeLimit,
    TableFull,
}

impl std::fmt::Display for AbortReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AbortReason::NodeLimit => "node limit reached",
            AbortReason::TimeLimit => "time limit reached",
            AbortReason::TableFull => "transposition table full",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub table_entries: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    /// `None` when the search was aborted.
    pub outcome: Option<Outcome>,
    /// Lowest move in enumeration order that leaves the opponent lost; only
    /// set when the outcome is `MoverWins`.
    pub best_move: Option<Move>,
    pub stats: SearchStats,
    pub aborted: Option<AbortReason>,
}

/// How states are turned into table keys for one graph.
pub(crate) struct Keying {
    graph: Arc<GameGraph>,
    encoder: KeyEncoder,
    symmetry: Option<CubeSymmetry>,
    symmetry_requested: bool,
    levels: Option<Vec<u32>>,
}

impl Keying {
    pub(crate) fn new(graph: &Arc<GameGraph>, use_symmetry: bool) -> Self {
        // Symmetry only applies to full cubes of modest dimension; anything
        // else is keyed directly.
        let symmetry = if use_symmetry {
            CubeSymmetry::new(graph).ok()
        } else {
            None
        };
        Self {
            graph: graph.clone(),
            encoder: KeyEncoder::for_graph(graph),
            symmetry,
            symmetry_requested: use_symmetry,
            levels: label_levels(graph),
        }
    }

    pub(crate) fn key(&self, state: &GameState) -> StateKey {
        match &self.symmetry {
            Some(sym) => sym.canonical_key(&self.encoder, state.position(), state.weights()),
            None => self.encoder.encode_state(state),
        }
    }

    pub(crate) fn matches(&self, graph: &Arc<GameGraph>, use_symmetry: bool) -> bool {
        self.symmetry_requested == use_symmetry
            && (Arc::ptr_eq(&self.graph, graph) || *self.graph == **graph)
    }

    pub(crate) fn symmetric(&self) -> bool {
        self.symmetry.is_some()
    }

    /// Moves in search order: on cube-labelled graphs lower-level targets
    /// first; larger amounts before smaller ones.
    pub(crate) fn search_moves(&self, state: &GameState) -> Vec<Move> {
        let graph = state.graph();
        let mut targets: Vec<(usize, usize)> = graph
            .incident(state.position())
            .iter()
            .copied()
            .filter(|&(_, e)| state.weight(e) > 0)
            .collect();
        if let Some(levels) = &self.levels {
            targets.sort_by_key(|&(to, _)| levels[to]);
        }
        targets
            .into_iter()
            .flat_map(|(to, e)| {
                (1..=state.weight(e))
                    .rev()
                    .map(move |amount| Move { to, amount })
            })
            .collect()
    }
}

pub(crate) struct Budget {
    pub(crate) started: Instant,
    pub(crate) nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
}

impl Budget {
    pub(crate) fn new(config: &SolveConfig) -> Self {
        let started = Instant::now();
        Self {
            started,
            nodes: 0,
            node_limit: config.node_limit,
            deadline: config.time_limit.map(|t| started + t),
        }
    }

    #[inline]
    pub(crate) fn expand(&mut self) -> Result<(), AbortReason> {
        if self.node_limit.is_some_and(|limit| self.nodes >= limit) {
            return Err(AbortReason::NodeLimit);
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(AbortReason::TimeLimit);
        }
        Ok(())
    }
}

/// A reusable solver. The table survives between calls on the same graph,
/// so solving successive positions of one game gets cheaper as it goes.
pub struct Solver {
    config: SolveConfig,
    keying: Option<Keying>,
    table: FxHashMap<StateKey, Outcome>,
    depth_table: FxHashMap<StateKey, (Outcome, u32)>,
}

impl Solver {
    pub fn new(config: SolveConfig) -> Self {
        Self {
            config,
            keying: None,
            table: FxHashMap::default(),
            depth_table: FxHashMap::default(),
        }
    }

    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    /// Whether the symmetry reduction is active for the current graph.
    pub fn uses_symmetry(&self) -> bool {
        self.keying.as_ref().is_some_and(Keying::symmetric)
    }

    fn prepare(&mut self, graph: &Arc<GameGraph>) {
        if !self
            .keying
            .as_ref()
            .is_some_and(|k| k.matches(graph, self.config.use_symmetry))
        {
            self.keying = Some(Keying::new(graph, self.config.use_symmetry));
            self.table.clear();
            self.depth_table.clear();
        }
    }

    pub fn solve(&mut self, state: &GameState) -> SolveResult {
        self.prepare(state.graph());
        let mut budget = Budget::new(&self.config);
        let mut work = state.clone();
        let result = self.search(&mut work, &mut budget).and_then(|outcome| {
            let best = match outcome {
                Outcome::MoverWins => self.first_winning_move(&mut work, &mut budget)?,
                Outcome::MoverLoses => None,
            };
            Ok((outcome, best))
        });
        let stats = SearchStats {
            nodes_expanded: budget.nodes,
            table_entries: self.table.len(),
            elapsed: budget.started.elapsed(),
        };
        match result {
            Ok((outcome, best_move)) => SolveResult {
                outcome: Some(outcome),
                best_move,
                stats,
                aborted: None,
            },
            Err(reason) => SolveResult {
                outcome: None,
                best_move: None,
                stats,
                aborted: Some(reason),
            },
        }
    }

    /// Engine move: when winning, the lowest move in enumeration order to a
    /// lost position; when losing, the move that makes the game last longest
    /// under best play; `None` at a terminal state.
    pub fn best_move(&mut self, state: &GameState) -> Result<Option<Move>, AbortReason> {
        let result = self.solve(state);
        match (result.outcome, result.aborted) {
            (_, Some(reason)) => Err(reason),
            (Some(Outcome::MoverWins), None) => Ok(result.best_move),
            _ => {
                let mut budget = Budget::new(&self.config);
                let mut work = state.clone();
                let mut best: Option<(u32, Move)> = None;
                for mv in state.legal_moves() {
                    let undo = work.apply_in_place(mv).expect("legal");
                    let r = self.depth_search(&mut work, &mut budget);
                    work.undo(undo);
                    let (_, plies) = r?;
                    if best.is_none_or(|(b, _)| plies > b) {
                        best = Some((plies, mv));
                    }
                }
                Ok(best.map(|(_, mv)| mv))
            }
        }
    }

    /// Outcome and game length under best play (the winner hurries, the loser
    /// stalls), in plies.
    pub fn solve_with_length(&mut self, state: &GameState) -> Result<(Outcome, u32), AbortReason> {
        self.prepare(state.graph());
        let mut budget = Budget::new(&self.config);
        self.depth_search(&mut state.clone(), &mut budget)
    }

    /// All legal moves that leave the opponent in a lost position, in
    /// enumeration order.
    pub fn winning_moves(&mut self, state: &GameState) -> Result<Vec<Move>, AbortReason> {
        self.prepare(state.graph());
        let mut budget = Budget::new(&self.config);
        let mut work = state.clone();
        let mut wins = Vec::new();
        for mv in state.legal_moves() {
            let undo = work.apply_in_place(mv).expect("legal");
            let r = self.search(&mut work, &mut budget);
            work.undo(undo);
            if r? == Outcome::MoverLoses {
                wins.push(mv);
            }
        }
        Ok(wins)
    }

    /// Snapshot of the transposition table as `(position, weights, outcome)`
    /// triples. With symmetry enabled these are orbit representatives.
    pub fn table_states(&self) -> Vec<(usize, Vec<u32>, Outcome)> {
        let Some(keying) = &self.keying else {
            return Vec::new();
        };
        self.table
            .iter()
            .map(|(k, &o)| {
                let (pos, ws) = keying.encoder.decode(k);
                (pos, ws, o)
            })
            .collect()
    }

    fn store(&mut self, key: StateKey, outcome: Outcome) -> Result<(), AbortReason> {
        if self.table.len() >= self.config.table_capacity {
            return Err(AbortReason::TableFull);
        }
        self.table.insert(key, outcome);
        Ok(())
    }

    fn search(
        &mut self,
        state: &mut GameState,
        budget: &mut Budget,
    ) -> Result<Outcome, AbortReason> {
        let keying = self.keying.as_ref().expect("prepared");
        let key = keying.key(state);
        if let Some(&o) = self.table.get(&key) {
            return Ok(o);
        }
        budget.expand()?;
        let moves = keying.search_moves(state);
        let mut outcome = Outcome::MoverLoses;
        for mv in moves {
            let undo = state.apply_in_place(mv).expect("search moves are legal");
            let child = self.search(state, budget);
            state.undo(undo);
            if child? == Outcome::MoverLoses {
                outcome = Outcome::MoverWins;
                break;
            }
        }
        self.store(key, outcome)?;
        Ok(outcome)
    }

    fn first_winning_move(
        &mut self,
        state: &mut GameState,
        budget: &mut Budget,
    ) -> Result<Option<Move>, AbortReason> {
        for mv in state.legal_moves() {
            let undo = state.apply_in_place(mv).expect("legal");
            let child = self.search(state, budget);
            state.undo(undo);
            if child? == Outcome::MoverLoses {
                return Ok(Some(mv));
            }
        }
        Ok(None)
    }

    fn depth_search(
        &mut self,
        state: &mut GameState,
        budget: &mut Budget,
    ) -> Result<(Outcome, u32), AbortReason> {
        let keying = self.keying.as_ref().expect("prepared");
        let key = keying.key(state);
        if let Some(&v) = self.depth_table.get(&key) {
            return Ok(v);
        }
        budget.expand()?;
        let mut fastest_win: Option<u32> = None;
        let mut longest_loss = 0;
        for mv in keying.search_moves(state) {
            let undo = state.apply_in_place(mv).expect("legal");
            let child = self.depth_search(state, budget);
            state.undo(undo);
            let (o, plies) = child?;
            match o {
                Outcome::MoverLoses => {
                    fastest_win = Some(fastest_win.map_or(plies + 1, |f| f.min(plies + 1)))
                }
                Outcome::MoverWins => longest_loss = longest_loss.max(plies + 1),
            }
        }
        let value = match fastest_win {
            Some(plies) => (Outcome::MoverWins, plies),
            None => (Outcome::MoverLoses, longest_loss),
        };
        if self.depth_table.len() >= self.config.table_capacity {
            return Err(AbortReason::TableFull);
        }
        self.depth_table.insert(key, value);
        Ok(value)
    }
}

pub fn solve(state: &GameState, config: &SolveConfig) -> SolveResult {
    Solver::new(config.clone()).solve(state)
}

pub fn best_move(state: &GameState, config: &SolveConfig) -> Result<Option<Move>, AbortReason> {
    Solver::new(config.clone()).best_move(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::{diamond, k2, unit_path3};
    use crate::game::Player;
    use crate::hypercube::{generate_hypercube, unit_cube, CubeSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn sym() -> SolveConfig {
        SolveConfig {
            use_symmetry: true,
            ..SolveConfig::default()
        }
    }

    #[test]
    fn small_cubes_follow_dimension_parity() {
        for (n, expected) in [
            (1, Outcome::MoverWins),
            (2, Outcome::MoverLoses),
            (3, Outcome::MoverWins),
        ] {
            let s = GameState::new(unit_cube(n).unwrap());
            for config in [SolveConfig::default(), sym()] {
                let r = solve(&s, &config);
                assert_eq!(r.outcome, Some(expected), "Q{n}");
                assert!(r.aborted.is_none());
            }
        }
    }

    #[test]
    fn diamond_is_lost_for_first_player() {
        // frozen from an independent brute-force enumeration
        let s = GameState::new(diamond());
        let r = solve(&s, &SolveConfig::default());
        assert_eq!(r.outcome, Some(Outcome::MoverLoses));
        assert_eq!(r.best_move, None);
        assert_eq!(oracle_solve(&s), Ok(Outcome::MoverLoses));
    }

    #[test]
    fn k2_is_won_by_taking_everything() {
        for k in 1..=9 {
            let s = GameState::new(k2(k));
            let r = solve(&s, &SolveConfig::default());
            assert_eq!(r.outcome, Some(Outcome::MoverWins));
            assert_eq!(r.best_move, Some(Move::new(1, k)));
        }
        let s = GameState::new(k2(5));
        assert_eq!(
            best_move(&s, &SolveConfig::default()),
            Ok(Some(Move::new(1, 5)))
        );
    }

    #[test]
    fn terminal_has_no_best_move() {
        let s = GameState::new(k2(1)).apply_move(Move::new(1, 1)).unwrap();
        let r = solve(&s, &SolveConfig::default());
        assert_eq!(r.outcome, Some(Outcome::MoverLoses));
        assert_eq!(best_move(&s, &SolveConfig::default()), Ok(None));
    }

    #[test]
    fn q3_best_move_leaves_a_lost_position() {
        let s = GameState::new(unit_cube(3).unwrap());
        let mv = best_move(&s, &SolveConfig::default()).unwrap().unwrap();
        assert_eq!(mv.amount, 1);
        assert_eq!(s.graph().label(mv.to).len(), 1);
        let child = s.apply_move(mv).unwrap();
        assert_eq!(
            solve(&child, &SolveConfig::default()).outcome,
            Some(Outcome::MoverLoses)
        );
    }

    #[test]
    fn losing_side_stalls() {
        // P1 on the unit path v1-v2-v3 has one move; on Q2 both moves lose
        let s = GameState::new(unit_path3());
        assert_eq!(
            best_move(&s, &SolveConfig::default()),
            Ok(Some(Move::new(1, 1)))
        );
        let q2 = GameState::new(unit_cube(2).unwrap());
        let mut solver = Solver::new(SolveConfig::default());
        assert_eq!(solver.solve_with_length(&q2), Ok((Outcome::MoverLoses, 4)));
        assert!(solver.best_move(&q2).unwrap().is_some());
    }

    #[test]
    fn limits_abort_without_an_answer() {
        let s = GameState::new(unit_cube(3).unwrap());
        let r = solve(
            &s,
            &SolveConfig {
                node_limit: Some(3),
                ..SolveConfig::default()
            },
        );
        assert_eq!(r.outcome, None);
        assert_eq!(r.aborted, Some(AbortReason::NodeLimit));
        assert!(r.stats.nodes_expanded <= 3);

        let r = solve(
            &s,
            &SolveConfig {
                table_capacity: 2,
                ..SolveConfig::default()
            },
        );
        assert_eq!(r.aborted, Some(AbortReason::TableFull));
        assert_eq!(
            best_move(
                &s,
                &SolveConfig {
                    node_limit: Some(1),
                    ..SolveConfig::default()
                }
            ),
            Err(AbortReason::NodeLimit)
        );
    }

    #[test]
    fn symmetry_on_non_cube_falls_back() {
        let s = GameState::new(diamond());
        let mut solver = Solver::new(sym());
        assert_eq!(solver.solve(&s).outcome, Some(Outcome::MoverLoses));
        assert!(!solver.uses_symmetry());
        let mut solver = Solver::new(sym());
        solver.solve(&GameState::new(unit_cube(3).unwrap()));
        assert!(solver.uses_symmetry());
    }

    #[test]
    fn deterministic_repeat_solves() {
        let s = GameState::new(
            generate_hypercube(CubeSpec {
                n: 2,
                uniform_weight: 2,
            })
            .unwrap()
            .into(),
        );
        let a = solve(&s, &SolveConfig::default());
        let b = solve(&s, &SolveConfig::default());
        assert_eq!((a.outcome, a.best_move), (b.outcome, b.best_move));
    }

    fn reachable(state: &GameState) -> HashSet<(usize, Vec<u32>)> {
        let mut seen = HashSet::new();
        let mut stack = vec![state.clone()];
        while let Some(s) = stack.pop() {
            if seen.insert((s.position(), s.weights().to_vec())) {
                stack.extend(
                    s.legal_moves()
                        .into_iter()
                        .map(|m| s.apply_move(m).unwrap()),
                );
            }
        }
        seen
    }

    #[test]
    fn expansions_bounded_by_reachable_states() {
        for g in [diamond(), unit_cube(3).unwrap(), unit_cube(2).unwrap()] {
            let s = GameState::new(g);
            let r = solve(&s, &SolveConfig::default());
            assert!(r.stats.nodes_expanded as usize <= reachable(&s).len());
        }
    }

    #[test]
    fn table_entries_are_self_consistent() {
        let g = Arc::new(
            generate_hypercube(CubeSpec {
                n: 2,
                uniform_weight: 3,
            })
            .unwrap(),
        );
        for config in [SolveConfig::default(), sym()] {
            let mut solver = Solver::new(config);
            let s = GameState::new(g.clone());
            solver.solve(&s);
            let mut entries = solver.table_states();
            entries.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..1000.min(entries.len()) {
                let (pos, ws, outcome) = entries[rng.random_range(0..entries.len())].clone();
                let state = GameState::from_parts(g.clone(), ws, pos, 0).unwrap();
                let any_losing_child = state.legal_moves().into_iter().any(|m| {
                    solver.solve(&state.apply_move(m).unwrap()).outcome == Some(Outcome::MoverLoses)
                });
                assert_eq!(outcome == Outcome::MoverWins, any_losing_child);
                assert_eq!(oracle_solve(&state).unwrap(), outcome);
            }
        }
    }

    #[test]
    fn q2_weightings_agree_with_oracle() {
        let q2 = unit_cube(2).unwrap();
        let mut p1_wins = 0;
        for code in 0..81u32 {
            let ws: Vec<u32> = (0..4).map(|i| code / 3u32.pow(i) % 3 + 1).collect();
            let g = Arc::new(q2.with_weights(&ws).unwrap());
            let s = GameState::new(g);
            let expected = oracle_solve(&s).unwrap();
            assert_eq!(solve(&s, &SolveConfig::default()).outcome, Some(expected));
            assert_eq!(solve(&s, &sym()).outcome, Some(expected));
            if expected.winner(Player::P1) == Player::P1 {
                p1_wins += 1;
            }
        }
        // frozen from an independent brute-force sweep
        assert_eq!(p1_wins, 57);
    }
}
