//! Nim on graphs.
//!
//! Two players alternately move a shared piece along the edges of a weighted
//! graph, lowering the weight of each edge they cross by a positive amount.
//! An edge at weight zero can no longer be crossed, and the player who cannot
//! move loses.
//!
//! * [`game`]: rules, states and moves.
//! * [`io`]: the JSON graph document format.
//! * [`hypercube`]: `Q_n` boards with set labels and level utilities.
//! * [`solver`]: memoized negamax, symmetry reduction and a reference solver.
//! * [`strategy`]: cube strategies, their verification, and playouts.

pub mod error;
pub mod game;
pub mod hypercube;
pub mod io;
pub mod solver;
pub mod strategy;

pub use error::{CubeError, GraphError, IllegalMove, LoadError};
pub use game::{Edge, GameGraph, GameState, Move, Outcome, Player, Undo};
