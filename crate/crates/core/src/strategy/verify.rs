//! Exhaustive adversarial verification of a one-player strategy.
//!
//! The strategy player's turns are restricted to compliant moves; the
//! adversary may play anything legal. A position is good for the strategy
//! when the adversary is eventually stuck on every line.

use std::sync::Arc;
use std::time::Duration;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{Strategy, StrategyError, StrategyKind};
use crate::game::{GameGraph, GameState, Move, Player};
use crate::hypercube::label_levels;
use crate::solver::{AbortReason, Budget, Keying, SolveConfig, StateKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantifier {
    /// Every compliant move at every strategy turn must win.
    AllCompliant,
    /// Some compliant move at every strategy turn must win.
    ExistsCompliant,
}

impl std::str::FromStr for Quantifier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" | "AllCompliant" => Ok(Quantifier::AllCompliant),
            "exists" | "ExistsCompliant" => Ok(Quantifier::ExistsCompliant),
            other => Err(format!(
                "unknown quantifier {other:?} (expected all or exists)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub kind: StrategyKind,
    pub quantifier: Quantifier,
    /// `false` both on refutation and on abort; see `aborted`.
    pub verified: bool,
    /// Terminal positions reached during the search.
    pub lines_explored: u64,
    pub max_game_length: u32,
    /// Moves from the fresh state to a position where the strategy player is
    /// stuck or has no compliant move. Present iff refuted.
    pub counterexample: Option<Vec<Move>>,
    /// Positions where the odd-cube strategy player stood on level 2 without
    /// a legal level-1 move.
    pub lemma_violations: u64,
    pub max_level_visited: Option<u32>,
    /// Edges crossed at least once anywhere in the search.
    pub edges_touched: Vec<usize>,
    pub nodes_expanded: u64,
    pub table_entries: usize,
    pub elapsed: Duration,
    pub aborted: Option<AbortReason>,
}

struct Verifier<C> {
    compliant: C,
    kind: StrategyKind,
    player: Player,
    quantifier: Quantifier,
    keying: Keying,
    levels: Option<Vec<u32>>,
    memo: FxHashMap<(StateKey, bool), bool>,
    capacity: usize,
    lines: u64,
    max_len: u32,
    lemma_violations: u64,
    max_level: Option<u32>,
    touched: Vec<bool>,
}

impl<C> Verifier<C>
where
    C: FnMut(&GameState) -> Result<Vec<Move>, StrategyError>,
{
    fn note_position(&mut self, state: &GameState) {
        if let Some(levels) = &self.levels {
            let l = levels[state.position()];
            self.max_level = Some(self.max_level.map_or(l, |m| m.max(l)));
        }
    }

    fn strategy_moves(&mut self, state: &GameState) -> Result<Vec<Move>, StrategyError> {
        let result = (self.compliant)(state);
        if self.kind == StrategyKind::P1OddCube
            && self
                .levels
                .as_ref()
                .is_some_and(|l| l[state.position()] == 2)
            && !matches!(&result, Ok(moves) if !moves.is_empty())
        {
            self.lemma_violations += 1;
        }
        result
    }

    /// Whether the strategy player wins from `state` under the quantifier.
    fn wins(&mut self, state: &mut GameState, budget: &mut Budget) -> Result<bool, AbortReason> {
        let strategy_turn = state.to_move() == self.player;
        let key = (self.keying.key(state), strategy_turn);
        if let Some(&w) = self.memo.get(&key) {
            return Ok(w);
        }
        budget.expand()?;
        self.note_position(state);

        let result = if strategy_turn {
            match self.strategy_moves(state) {
                Ok(moves) if !moves.is_empty() => {
                    let all = self.quantifier == Quantifier::AllCompliant;
                    let mut verdict = all;
                    for mv in moves {
                        if self.child_wins(state, mv, budget)? != all {
                            verdict = !all;
                            break;
                        }
                    }
                    verdict
                }
                Ok(_) => {
                    self.leaf(state);
                    false
                }
                // no compliant move counts as a loss for the strategy
                Err(StrategyError::NoCompliantMove { .. }) => false,
                Err(e) => panic!("strategy domain was checked before search: {e}"),
            }
        } else {
            let moves = state.legal_moves();
            if moves.is_empty() {
                self.leaf(state);
            }
            let mut verdict = true;
            for mv in moves {
                if !self.child_wins(state, mv, budget)? {
                    verdict = false;
                    break;
                }
            }
            verdict
        };

        if self.memo.len() >= self.capacity {
            return Err(AbortReason::TableFull);
        }
        self.memo.insert(key, result);
        Ok(result)
    }

    fn child_wins(
        &mut self,
        state: &mut GameState,
        mv: Move,
        budget: &mut Budget,
    ) -> Result<bool, AbortReason> {
        let edge = state.check_move(mv).expect("legal");
        self.touched[edge] = true;
        let undo = state.apply_in_place(mv).expect("legal");
        let r = self.wins(state, budget);
        state.undo(undo);
        r
    }

    fn leaf(&mut self, state: &GameState) {
        self.lines += 1;
        self.max_len = self.max_len.max(state.move_count());
    }

    /// Walks a refuting line using the memoized verdicts.
    fn counterexample(
        &mut self,
        fresh: &GameState,
        budget: &mut Budget,
    ) -> Result<Vec<Move>, AbortReason> {
        let mut state = fresh.clone();
        let mut line = Vec::new();
        loop {
            let candidates = if state.to_move() == self.player {
                match (self.compliant)(&state) {
                    Ok(moves) if !moves.is_empty() => moves,
                    _ => return Ok(line),
                }
            } else {
                state.legal_moves()
            };
            let mut next = None;
            for &mv in &candidates {
                let mut child = state.apply_move(mv).expect("legal");
                if !self.wins(&mut child, budget)? {
                    next = Some(mv);
                    break;
                }
            }
            // with ExistsCompliant every compliant reply loses, so any will do
            let mv = next.unwrap_or(candidates[0]);
            state.apply_in_place(mv).expect("legal");
            line.push(mv);
        }
    }
}

/// Exhaustively checks `kind` on `graph` from its start position.
pub fn verify_strategy(
    graph: &Arc<GameGraph>,
    kind: StrategyKind,
    quantifier: Quantifier,
    config: &SolveConfig,
) -> Result<VerificationReport, StrategyError> {
    let player = kind.player().ok_or(StrategyError::NotVerifiable(kind))?;
    let mut strategy = Strategy::new(kind, graph)?;
    Ok(verify_with(
        graph,
        kind,
        player,
        quantifier,
        config,
        move |s: &GameState| strategy.compliant_moves(s),
    ))
}

/// Verification core, parameterised by the compliance rule of `player`.
pub(crate) fn verify_with<C>(
    graph: &Arc<GameGraph>,
    kind: StrategyKind,
    player: Player,
    quantifier: Quantifier,
    config: &SolveConfig,
    compliant: C,
) -> VerificationReport
where
    C: FnMut(&GameState) -> Result<Vec<Move>, StrategyError>,
{
    let mut verifier = Verifier {
        compliant,
        kind,
        player,
        quantifier,
        keying: Keying::new(graph, config.use_symmetry),
        levels: label_levels(graph),
        memo: FxHashMap::default(),
        capacity: config.table_capacity,
        lines: 0,
        max_len: 0,
        lemma_violations: 0,
        max_level: None,
        touched: vec![false; graph.edge_count()],
    };
    let fresh = GameState::new(graph.clone());
    let mut budget = Budget::new(config);
    let outcome = verifier
        .wins(&mut fresh.clone(), &mut budget)
        .and_then(|won| {
            if won {
                Ok((true, None))
            } else {
                verifier
                    .counterexample(&fresh, &mut budget)
                    .map(|line| (false, Some(line)))
            }
        });
    let (verified, counterexample, aborted) = match outcome {
        Ok((v, c)) => (v, c, None),
        Err(reason) => (false, None, Some(reason)),
    };
    VerificationReport {
        kind,
        quantifier,
        verified,
        lines_explored: verifier.lines,
        max_game_length: verifier.max_len,
        counterexample,
        lemma_violations: verifier.lemma_violations,
        max_level_visited: verifier.max_level,
        edges_touched: (0..graph.edge_count())
            .filter(|&e| verifier.touched[e])
            .collect(),
        nodes_expanded: budget.nodes,
        table_entries: verifier.memo.len(),
        elapsed: budget.started.elapsed(),
        aborted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::{generate_hypercube, truncate_levels, unit_cube, CubeSpec};

    fn run(n: u32, kind: StrategyKind, q: Quantifier) -> VerificationReport {
        verify_strategy(&unit_cube(n).unwrap(), kind, q, &SolveConfig::default()).unwrap()
    }

    #[test]
    fn odd_cube_strategy_holds_on_q3() {
        for q in [Quantifier::AllCompliant, Quantifier::ExistsCompliant] {
            let r = run(3, StrategyKind::P1OddCube, q);
            assert!(r.verified, "{q:?}");
            assert!(r.counterexample.is_none());
            assert_eq!(r.lemma_violations, 0);
            assert_eq!(r.max_level_visited, Some(2));
            assert!(r.lines_explored > 0);
        }
    }

    #[test]
    fn even_cube_strategy_holds_on_q2() {
        let r = run(2, StrategyKind::P2EvenCube, Quantifier::AllCompliant);
        assert!(r.verified);
        assert_eq!(r.max_game_length, 4);
    }

    #[test]
    fn domain_errors() {
        let q2 = unit_cube(2).unwrap();
        assert!(matches!(
            verify_strategy(
                &q2,
                StrategyKind::P1OddCube,
                Quantifier::AllCompliant,
                &SolveConfig::default()
            ),
            Err(StrategyError::WrongDimension { .. })
        ));
        assert!(matches!(
            verify_strategy(
                &q2,
                StrategyKind::RandomLegal,
                Quantifier::AllCompliant,
                &SolveConfig::default()
            ),
            Err(StrategyError::NotVerifiable(_))
        ));
    }

    #[test]
    fn refutation_carries_a_replayable_counterexample() {
        // P1 moving anywhere on Q2 loses: the verifier must refute it
        let q2 = unit_cube(2).unwrap();
        for q in [Quantifier::AllCompliant, Quantifier::ExistsCompliant] {
            let r = verify_with(
                &q2,
                StrategyKind::RandomLegal,
                Player::P1,
                q,
                &SolveConfig::default(),
                |s| Ok(s.legal_moves()),
            );
            assert!(!r.verified);
            assert!(r.aborted.is_none());
            let line = r.counterexample.expect("refuted runs carry a line");
            let end = GameState::replay(q2.clone(), &line).unwrap();
            assert_eq!(end.to_move(), Player::P1);
            assert!(end.is_terminal());
            assert_eq!(end.graph().label(end.position()), "");
        }
    }

    #[test]
    fn heavy_cube_is_out_of_domain() {
        let heavy = Arc::new(
            generate_hypercube(CubeSpec {
                n: 3,
                uniform_weight: 2,
            })
            .unwrap(),
        );
        assert!(matches!(
            verify_strategy(
                &heavy,
                StrategyKind::P1OddCube,
                Quantifier::AllCompliant,
                &SolveConfig::default()
            ),
            Err(StrategyError::NotUnitWeight { .. })
        ));
    }

    #[test]
    fn q5_search_stays_in_the_truncated_cube() {
        let q5 = unit_cube(5).unwrap();
        let kept = truncate_levels(&q5, 2).unwrap();
        let r = run(5, StrategyKind::P1OddCube, Quantifier::ExistsCompliant);
        assert!(r.verified);
        assert_eq!(r.max_level_visited, Some(2));
        for &e in &r.edges_touched {
            let edge = q5.edges()[e];
            assert!(kept.vertex_index(q5.label(edge.u)).is_some());
            assert!(kept.vertex_index(q5.label(edge.v)).is_some());
        }
        assert_eq!(r.edges_touched.len(), kept.edge_count());
    }

    #[test]
    fn symmetry_does_not_change_verdicts() {
        let config = SolveConfig {
            use_symmetry: true,
            ..SolveConfig::default()
        };
        for q in [Quantifier::AllCompliant, Quantifier::ExistsCompliant] {
            let plain = run(3, StrategyKind::P1OddCube, q);
            let reduced =
                verify_strategy(&unit_cube(3).unwrap(), StrategyKind::P1OddCube, q, &config)
                    .unwrap();
            assert_eq!(plain.verified, reduced.verified);
            assert!(reduced.table_entries <= plain.table_entries);
        }
    }

    #[test]
    fn limits_abort() {
        let config = SolveConfig {
            node_limit: Some(5),
            ..SolveConfig::default()
        };
        let r = verify_strategy(
            &unit_cube(3).unwrap(),
            StrategyKind::P1OddCube,
            Quantifier::AllCompliant,
            &config,
        )
        .unwrap();
        assert!(!r.verified);
        assert_eq!(r.aborted, Some(AbortReason::NodeLimit));
        assert!(r.counterexample.is_none());
    }
}
