//! Rules of Nim on graphs.
//!
//! A [`GameGraph`] is an immutable simple graph with positive integer edge
//! weights and a start vertex. A [`GameState`] records the remaining weight of
//! every edge, the vertex holding the positional piece, and how many moves have
//! been played. A move crosses an edge incident to the piece and lowers that
//! edge's weight by a positive amount; an edge at weight zero is gone. The
//! player who has no incident edge left to cross loses.
//!
//! The player to move is never stored: P1 moves whenever `move_count` is even.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, IllegalMove};

/// One of the two players. P1 makes the first move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    /// The player on move after `move_count` moves.
    pub fn on_move(move_count: u32) -> Player {
        if move_count.is_multiple_of(2) {
            Player::P1
        } else {
            Player::P2
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::P1 => 0,
            Player::P2 => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::P1 => write!(f, "P1"),
            Player::P2 => write!(f, "P2"),
        }
    }
}

/// Game value from the point of view of the player to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    MoverWins,
    MoverLoses,
}

impl Outcome {
    /// Outcome of the parent when this is the outcome of a child.
    pub fn flip(self) -> Outcome {
        match self {
            Outcome::MoverWins => Outcome::MoverLoses,
            Outcome::MoverLoses => Outcome::MoverWins,
        }
    }

    /// Winner of the game when this outcome belongs to a position where
    /// `mover` is on move.
    pub fn winner(self, mover: Player) -> Player {
        match self {
            Outcome::MoverWins => mover,
            Outcome::MoverLoses => mover.opponent(),
        }
    }
}

/// A move: the vertex to travel to (the option) and the weight to remove
/// from the crossed edge (the choice).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub to: usize,
    pub amount: u32,
}

impl Move {
    pub fn new(to: usize, amount: u32) -> Self {
        Self { to, amount }
    }
}

/// An undirected weighted edge. `u < v` always holds once it belongs to a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u32,
}

impl Edge {
    pub fn other(&self, end: usize) -> usize {
        if end == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// The board: a simple undirected graph with positive initial edge weights
/// and a start vertex.
///
/// Edges are stored in canonical order, ascending by `(min endpoint, max
/// endpoint)`, and per-vertex incidence lists are sorted by neighbour index so
/// that move enumeration is deterministic.
#[derive(Clone, Debug)]
pub struct GameGraph {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    start: usize,
    // vertex -> (neighbour, edge index), ascending by neighbour
    adjacency: Vec<Vec<(usize, usize)>>,
    label_index: HashMap<String, usize>,
}

impl PartialEq for GameGraph {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.vertices == other.vertices
            && self.edges == other.edges
            && self.start == other.start
    }
}

impl Eq for GameGraph {}

impl GameGraph {
    /// Builds and validates a graph. Edges may be given in any order and with
    /// endpoints in either orientation.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize, u32)>,
        start: usize,
    ) -> Result<Self, GraphError> {
        let mut label_index = HashMap::with_capacity(vertices.len());
        for (i, label) in vertices.iter().enumerate() {
            if label_index.insert(label.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(label.clone()));
            }
        }
        let n = vertices.len();
        let label = |i: usize| vertices.get(i).cloned().unwrap_or_else(|| format!("#{i}"));

        let mut list = Vec::new();
        for (u, v, weight) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange {
                    index: u.max(v),
                    count: n,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(label(u)));
            }
            if weight == 0 {
                return Err(GraphError::ZeroWeight {
                    u: label(u),
                    v: label(v),
                });
            }
            list.push(Edge {
                u: u.min(v),
                v: u.max(v),
                weight,
            });
        }
        list.sort_unstable_by_key(|e| (e.u, e.v));
        if let Some(w) = list
            .windows(2)
            .find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v))
        {
            return Err(GraphError::DuplicateEdge {
                u: label(w[0].u),
                v: label(w[0].v),
            });
        }
        if start >= n {
            return Err(GraphError::BadStart {
                index: start,
                count: n,
            });
        }

        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in list.iter().enumerate() {
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        for inc in &mut adjacency {
            inc.sort_unstable();
        }

        Ok(Self {
            name: name.into(),
            vertices,
            edges: list,
            start,
            adjacency,
            label_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// `(neighbour, edge index)` pairs incident to `v`, ascending by neighbour.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let inc = self.adjacency.get(u)?;
        inc.binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| inc[i].1)
    }

    pub fn initial_weights(&self) -> Vec<u32> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| u64::from(e.weight)).sum()
    }

    pub fn max_weight(&self) -> u32 {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }

    /// True when every edge starts at weight one.
    pub fn is_unit(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1)
    }

    /// Same board with `weights` as the initial weights (canonical edge order).
    pub fn with_weights(&self, weights: &[u32]) -> Result<Self, GraphError> {
        assert_eq!(weights.len(), self.edges.len(), "one weight per edge");
        GameGraph::new(
            self.name.clone(),
            self.vertices.clone(),
            self.edges.iter().zip(weights).map(|(e, &w)| (e.u, e.v, w)),
            self.start,
        )
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(n, _) in &self.adjacency[v] {
                if !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Information needed to take back a move applied in place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Undo {
    from: usize,
    edge: usize,
    amount: u32,
}

/// One node of the game tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    graph: Arc<GameGraph>,
    weights: Vec<u32>,
    position: usize,
    move_count: u32,
    total: u64,
}

impl GameState {
    /// Fresh game: piece on the start vertex, every edge at its initial weight.
    pub fn new(graph: Arc<GameGraph>) -> Self {
        let weights = graph.initial_weights();
        let total = graph.total_weight();
        let position = graph.start();
        Self {
            graph,
            weights,
            position,
            move_count: 0,
            total,
        }
    }

    /// Builds an arbitrary state, checking that weights do not exceed their
    /// initial values.
    pub fn from_parts(
        graph: Arc<GameGraph>,
        weights: Vec<u32>,
        position: usize,
        move_count: u32,
    ) -> Result<Self, GraphError> {
        if weights.len() != graph.edge_count() {
            return Err(GraphError::WeightCount {
                expected: graph.edge_count(),
                found: weights.len(),
            });
        }
        if let Some((e, _)) = graph
            .edges()
            .iter()
            .zip(&weights)
            .find(|(e, &w)| w > e.weight)
        {
            return Err(GraphError::WeightAboveInitial {
                u: graph.label(e.u).to_string(),
                v: graph.label(e.v).to_string(),
            });
        }
        if position >= graph.vertex_count() {
            return Err(GraphError::BadStart {
                index: position,
                count: graph.vertex_count(),
            });
        }
        let total = weights.iter().map(|&w| u64::from(w)).sum();
        Ok(Self {
            graph,
            weights,
            position,
            move_count,
            total,
        })
    }

    pub fn graph(&self) -> &Arc<GameGraph> {
        &self.graph
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, edge: usize) -> u32 {
        self.weights[edge]
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn move_count(&self) -> u32 {
        self.move_count
    }

    pub fn to_move(&self) -> Player {
        Player::on_move(self.move_count)
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// Vertices reachable in one move, ascending.
    pub fn options(&self) -> Vec<usize> {
        self.live_incident(self.position).map(|(n, _)| n).collect()
    }

    /// Number of edges still playable at `v`.
    pub fn remaining_degree(&self, v: usize) -> usize {
        self.live_incident(v).count()
    }

    fn live_incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph
            .incident(v)
            .iter()
            .copied()
            .filter(move |&(_, e)| self.weights[e] > 0)
    }

    /// Every legal move, ascending by target vertex then by amount.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = Vec::new();
        for (to, e) in self.live_incident(self.position) {
            moves.extend((1..=self.weights[e]).map(|amount| Move { to, amount }));
        }
        moves
    }

    pub fn is_terminal(&self) -> bool {
        self.live_incident(self.position).next().is_none()
    }

    /// Edge crossed by `mv` if it is legal here.
    pub fn check_move(&self, mv: Move) -> Result<usize, IllegalMove> {
        let edge = self
            .graph
            .edge_between(self.position, mv.to)
            .ok_or(IllegalMove::NoEdge)?;
        let weight = self.weights[edge];
        if weight == 0 {
            return Err(IllegalMove::EdgeRemoved);
        }
        if mv.amount == 0 {
            return Err(IllegalMove::ZeroAmount);
        }
        if mv.amount > weight {
            return Err(IllegalMove::AmountExceedsWeight { weight });
        }
        Ok(edge)
    }

    /// Returns the state after `mv`; `self` is left untouched.
    pub fn apply_move(&self, mv: Move) -> Result<GameState, IllegalMove> {
        let mut next = self.clone();
        next.apply_in_place(mv)?;
        Ok(next)
    }

    /// Applies `mv` to this state, returning what [`GameState::undo`] needs to
    /// restore it. On error the state is unchanged.
    pub fn apply_in_place(&mut self, mv: Move) -> Result<Undo, IllegalMove> {
        let edge = self.check_move(mv)?;
        self.weights[edge] -= mv.amount;
        self.total -= u64::from(mv.amount);
        let from = self.position;
        self.position = mv.to;
        self.move_count += 1;
        Ok(Undo {
            from,
            edge,
            amount: mv.amount,
        })
    }

    pub fn undo(&mut self, undo: Undo) {
        self.weights[undo.edge] += undo.amount;
        self.total += u64::from(undo.amount);
        self.position = undo.from;
        self.move_count -= 1;
    }

    /// Replays `moves` from the fresh state of `graph`.
    pub fn replay(
        graph: Arc<GameGraph>,
        moves: &[Move],
    ) -> Result<GameState, (usize, IllegalMove)> {
        let mut state = GameState::new(graph);
        for (i, &mv) in moves.iter().enumerate() {
            state.apply_in_place(mv).map_err(|e| (i, e))?;
        }
        Ok(state)
    }
}
