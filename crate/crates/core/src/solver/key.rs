//! Packed transposition keys and the coordinate-permutation symmetry of cubes.

use itertools::Itertools;
use smallvec::SmallVec;

use crate::error::CubeError;
use crate::game::{GameGraph, GameState};
use crate::hypercube::{CubeLayout, CubeVertex};

/// Largest cube dimension whose full coordinate-permutation group is used.
pub const SYMMETRY_DIMENSION_CAP: u32 = 7;

/// Position and remaining weights of a state, packed into 64-bit words.
///
/// Word 0 is the position; the remaining words hold the edge weights at a
/// fixed width per edge, never straddling a word boundary. Unit-weight graphs
/// use one bit per edge. The player to move is not part of the key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(SmallVec<[u64; 4]>);

impl StateKey {
    pub fn words(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct KeyEncoder {
    bits: u32,
    per_word: usize,
    words: usize,
    edges: usize,
}

impl KeyEncoder {
    pub fn for_graph(graph: &GameGraph) -> Self {
        let bits = (32 - graph.max_weight().leading_zeros()).max(1);
        let per_word = (64 / bits) as usize;
        let edges = graph.edge_count();
        Self {
            bits,
            per_word,
            words: 1 + edges.div_ceil(per_word),
            edges,
        }
    }

    pub fn bits_per_edge(&self) -> u32 {
        self.bits
    }

    #[inline]
    fn slot(&self, edge: usize) -> (usize, u32) {
        (
            1 + edge / self.per_word,
            (edge % self.per_word) as u32 * self.bits,
        )
    }

    pub fn encode(&self, position: usize, weights: &[u32]) -> StateKey {
        let mut words: SmallVec<[u64; 4]> = SmallVec::from_elem(0, self.words);
        words[0] = position as u64;
        for (e, &w) in weights.iter().enumerate() {
            let (word, shift) = self.slot(e);
            words[word] |= u64::from(w) << shift;
        }
        StateKey(words)
    }

    pub fn encode_state(&self, state: &GameState) -> StateKey {
        self.encode(state.position(), state.weights())
    }

    pub fn decode(&self, key: &StateKey) -> (usize, Vec<u32>) {
        let mask = (1u64 << self.bits) - 1;
        let weights = (0..self.edges)
            .map(|e| {
                let (word, shift) = self.slot(e);
                (key.0[word] >> shift & mask) as u32
            })
            .collect();
        (key.0[0] as usize, weights)
    }
}

/// A coordinate permutation of a cube expressed on vertex and edge indices.
#[derive(Clone, Debug)]
struct Relabeling {
    vertex: Vec<u32>,
    edge: Vec<u32>,
}

/// Coordinate permutations of `Q_n`. Each one fixes the empty-set vertex and
/// preserves levels; applied jointly to position and weights it maps states to
/// states with the same outcome.
#[derive(Clone, Debug)]
pub struct CubeSymmetry {
    relabelings: Vec<Relabeling>,
}

impl CubeSymmetry {
    pub fn new(graph: &GameGraph) -> Result<Self, CubeError> {
        let layout = CubeLayout::detect(graph)?;
        let n = layout.dim();
        if n > SYMMETRY_DIMENSION_CAP {
            return Err(CubeError::SymmetryTooLarge {
                n,
                cap: SYMMETRY_DIMENSION_CAP,
            });
        }
        let relabelings = (0..n as usize)
            .permutations(n as usize)
            .map(|perm| {
                let vertex: Vec<u32> = (0..graph.vertex_count())
                    .map(|i| layout.index(permute(layout.vertex(i), &perm)) as u32)
                    .collect();
                let edge = graph
                    .edges()
                    .iter()
                    .map(|e| {
                        graph
                            .edge_between(vertex[e.u] as usize, vertex[e.v] as usize)
                            .expect("coordinate permutations are automorphisms")
                            as u32
                    })
                    .collect();
                Relabeling { vertex, edge }
            })
            .collect();
        Ok(Self { relabelings })
    }

    pub fn group_order(&self) -> usize {
        self.relabelings.len()
    }

    /// Applies the `index`-th permutation to a state.
    pub fn apply(&self, index: usize, position: usize, weights: &[u32]) -> (usize, Vec<u32>) {
        let r = &self.relabelings[index];
        let mut out = vec![0; weights.len()];
        for (e, &w) in weights.iter().enumerate() {
            out[r.edge[e] as usize] = w;
        }
        (r.vertex[position] as usize, out)
    }

    /// Smallest key over the orbit of `(position, weights)`.
    pub fn canonical_key(
        &self,
        encoder: &KeyEncoder,
        position: usize,
        weights: &[u32],
    ) -> StateKey {
        let mut best: Option<SmallVec<[u64; 4]>> = None;
        let mut words: SmallVec<[u64; 4]> = SmallVec::from_elem(0, encoder.words);
        for r in &self.relabelings {
            let pos = u64::from(r.vertex[position]);
            if best.as_ref().is_some_and(|b| pos > b[0]) {
                continue;
            }
            words.iter_mut().for_each(|w| *w = 0);
            words[0] = pos;
            for (e, &w) in weights.iter().enumerate() {
                let (word, shift) = encoder.slot(r.edge[e] as usize);
                words[word] |= u64::from(w) << shift;
            }
            if best.as_ref().is_none_or(|b| words < *b) {
                best = Some(words.clone());
            }
        }
        StateKey(best.expect("the identity is always a relabeling"))
    }
}

fn permute(v: CubeVertex, perm: &[usize]) -> CubeVertex {
    let bits = perm
        .iter()
        .enumerate()
        .filter(|&(i, _)| v.bits >> i & 1 == 1)
        .fold(0, |acc, (_, &to)| acc | 1 << to);
    CubeVertex::new(bits)
}

/// Canonical key of a state on a generated cube: the minimum packed key over
/// all coordinate permutations.
pub fn canonicalize(state: &GameState) -> Result<StateKey, CubeError> {
    let symmetry = CubeSymmetry::new(state.graph())?;
    let encoder = KeyEncoder::for_graph(state.graph());
    Ok(symmetry.canonical_key(&encoder, state.position(), state.weights()))
}
