use thiserror::Error;

use crate::game::{GameState, Outcome};

/// Largest total remaining weight the reference solver will accept.
pub const ORACLE_WEIGHT_GUARD: u64 = 30;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("total weight {total} exceeds the reference solver guard of {guard}")]
pub struct OracleRefused {
    pub total: u64,
    pub guard: u64,
}

/// Reference solver: plain recursion over [`GameState::legal_moves`] with no
/// table and no move ordering. Exponential; only for cross-checking.
pub fn oracle_solve(state: &GameState) -> Result<Outcome, OracleRefused> {
    oracle_solve_with_guard(state, ORACLE_WEIGHT_GUARD)
}

pub fn oracle_solve_with_guard(state: &GameState, guard: u64) -> Result<Outcome, OracleRefused> {
    if state.total_weight() > guard {
        return Err(OracleRefused {
            total: state.total_weight(),
            guard,
        });
    }
    Ok(outcome(state))
}

fn outcome(state: &GameState) -> Outcome {
    let wins = state.legal_moves().into_iter().any(|mv| {
        let child = state.apply_move(mv).expect("enumerated moves are legal");
        outcome(&child) == Outcome::MoverLoses
    });
    if wins {
        Outcome::MoverWins
    } else {
        Outcome::MoverLoses
    }
}
