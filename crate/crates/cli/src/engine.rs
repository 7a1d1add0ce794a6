use graphnim::solver::{SolveConfig, Solver};
use graphnim::strategy::{Strategy, StrategyError, StrategyKind, TieBreak};
use graphnim::{GameGraph, GameState, Move};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The computer opponent of `play` and `serve`.
///
/// `optimal` answers with the solver's best move, which stalls for the
/// longest game when the position is lost. The other kinds defer to their
/// strategy; `random` draws from a seeded generator.
pub struct Engine {
    kind: StrategyKind,
    inner: Inner,
    rng: ChaCha8Rng,
}

enum Inner {
    Solver(Solver),
    Strategy(Strategy),
}

impl Engine {
    pub fn new(
        kind: StrategyKind,
        graph: &GameGraph,
        seed: u64,
        config: SolveConfig,
    ) -> Result<Self, StrategyError> {
        let inner = match kind {
            StrategyKind::SolverOptimal => Inner::Solver(Solver::new(config)),
            _ => Inner::Strategy(Strategy::new(kind, graph)?),
        };
        Ok(Self {
            kind,
            inner,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn reply(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        match &mut self.inner {
            Inner::Solver(solver) => match solver.best_move(state) {
                Ok(Some(mv)) => Ok(mv),
                Ok(None) => Err(StrategyError::Stuck {
                    kind: self.kind,
                    player: state.to_move(),
                }),
                Err(reason) => Err(StrategyError::SolverAborted(reason)),
            },
            Inner::Strategy(strategy) => {
                let tie = match self.kind {
                    StrategyKind::RandomLegal => TieBreak::Seeded(&mut self.rng),
                    _ => TieBreak::Deterministic,
                };
                strategy.next_move(state, tie)
            }
        }
    }
}
