//! Hypercube boards.
//!
//! A vertex of `Q_n` is an `n`-bit mask; bit `i` (0-based) is coordinate
//! `i + 1`. Its label is the set of coordinates equal to one, written as the
//! ascending coordinate digits (`""` for the empty set, `"13"`, `"123"`). From
//! dimension 10 upward the coordinates are comma separated (`"1,10"`).
//!
//! Generated graphs list vertices by level (number of coordinates set), then
//! lexicographically by coordinate list, and start on the empty set.

use std::cmp::Reverse;
use std::sync::Arc;

use crate::error::CubeError;
use crate::game::GameGraph;

/// Largest dimension the generator accepts.
pub const DIMENSION_CAP: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeVertex {
    pub bits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl CubeVertex {
    pub fn new(bits: u32) -> Self {
        Self { bits }
    }

    pub fn level(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn parity(self) -> Parity {
        if self.level().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// 1-based coordinates set in this vertex, ascending.
    pub fn coordinates(self) -> impl Iterator<Item = u32> {
        (0..32)
            .filter(move |i| self.bits >> i & 1 == 1)
            .map(|i| i + 1)
    }

    pub fn label(self, n: u32) -> String {
        let coords: Vec<String> = self.coordinates().map(|c| c.to_string()).collect();
        if n >= 10 {
            coords.join(",")
        } else {
            coords.concat()
        }
    }

    /// Parses a label of a `Q_n` vertex. Coordinates must be strictly
    /// ascending and within `1..=n`.
    pub fn parse(label: &str, n: u32) -> Option<CubeVertex> {
        if label.is_empty() {
            return Some(CubeVertex::new(0));
        }
        let coords: Vec<u32> = if n >= 10 {
            label
                .split(',')
                .map(|c| c.parse().ok())
                .collect::<Option<_>>()?
        } else {
            label
                .chars()
                .map(|c| c.to_digit(10))
                .collect::<Option<_>>()?
        };
        let mut bits = 0u32;
        let mut last = 0;
        for c in coords {
            if c <= last || c > n {
                return None;
            }
            bits |= 1 << (c - 1);
            last = c;
        }
        Some(CubeVertex::new(bits))
    }
}

pub fn level(v: CubeVertex) -> u32 {
    v.level()
}

pub fn parity(v: CubeVertex) -> Parity {
    v.parity()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CubeSpec {
    pub n: u32,
    pub uniform_weight: u32,
}

impl CubeSpec {
    pub fn unit(n: u32) -> Self {
        Self {
            n,
            uniform_weight: 1,
        }
    }
}

/// Masks of `Q_n` in canonical vertex order.
pub fn canonical_masks(n: u32) -> Vec<u32> {
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    // Among equal-size sets, lexicographic order of the coordinate lists is
    // descending order of the bit-reversed masks.
    masks.sort_unstable_by_key(|&m| (m.count_ones(), Reverse(m.reverse_bits())));
    masks
}

pub fn generate_hypercube(spec: CubeSpec) -> Result<GameGraph, CubeError> {
    let CubeSpec { n, uniform_weight } = spec;
    if n == 0 {
        return Err(CubeError::ZeroDimension);
    }
    if n > DIMENSION_CAP {
        return Err(CubeError::TooLarge {
            n,
            cap: DIMENSION_CAP,
        });
    }
    if uniform_weight == 0 {
        return Err(CubeError::ZeroWeight);
    }
    let masks = canonical_masks(n);
    let mut index_of = vec![0usize; masks.len()];
    for (i, &m) in masks.iter().enumerate() {
        index_of[m as usize] = i;
    }
    let labels = masks.iter().map(|&m| CubeVertex::new(m).label(n)).collect();
    let edges = (0..1u32 << n).flat_map(|m| {
        let index_of = &index_of;
        (0..n).filter(move |i| m >> i & 1 == 0).map(move |i| {
            (
                index_of[m as usize],
                index_of[(m | 1 << i) as usize],
                uniform_weight,
            )
        })
    });
    let name = if uniform_weight == 1 {
        format!("Q{n}")
    } else {
        format!("Q{n}-w{uniform_weight}")
    };
    Ok(GameGraph::new(name, labels, edges, index_of[0]).expect("generated cubes are valid"))
}

/// Vertex-index to mask correspondence for a graph recognised as a full `Q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeLayout {
    dim: u32,
    masks: Vec<u32>,
    index_of: Vec<usize>,
}

impl CubeLayout {
    /// Recognises `graph` as `Q_n` from its labels and edges: `2^n` vertices
    /// carrying distinct valid labels, `n * 2^(n-1)` edges, each joining
    /// labels that differ in exactly one coordinate.
    pub fn detect(graph: &GameGraph) -> Result<CubeLayout, CubeError> {
        let count = graph.vertex_count();
        if count < 2 || !count.is_power_of_two() {
            return Err(CubeError::NotACube);
        }
        let dim = count.trailing_zeros();
        if dim > DIMENSION_CAP {
            return Err(CubeError::NotACube);
        }
        let mut masks = Vec::with_capacity(count);
        let mut index_of = vec![usize::MAX; count];
        for (i, label) in graph.vertices().iter().enumerate() {
            let v = CubeVertex::parse(label, dim).ok_or(CubeError::NotACube)?;
            if index_of[v.bits as usize] != usize::MAX {
                return Err(CubeError::NotACube);
            }
            index_of[v.bits as usize] = i;
            masks.push(v.bits);
        }
        if graph.edge_count() != dim as usize * (count / 2) {
            return Err(CubeError::NotACube);
        }
        if graph
            .edges()
            .iter()
            .any(|e| (masks[e.u] ^ masks[e.v]).count_ones() != 1)
        {
            return Err(CubeError::NotACube);
        }
        Ok(CubeLayout {
            dim,
            masks,
            index_of,
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn vertex(&self, index: usize) -> CubeVertex {
        CubeVertex::new(self.masks[index])
    }

    pub fn level(&self, index: usize) -> u32 {
        self.masks[index].count_ones()
    }

    pub fn index(&self, v: CubeVertex) -> usize {
        self.index_of[v.bits as usize]
    }
}

/// Cube levels of every vertex of a cube or of a level-truncated cube, read
/// from the labels. `None` when some label is not a set label or some edge
/// does not change exactly one coordinate.
pub fn label_levels(graph: &GameGraph) -> Option<Vec<u32>> {
    let comma = graph.vertices().iter().any(|l| l.contains(','));
    let n = if comma { DIMENSION_CAP } else { 9 };
    let vs: Vec<CubeVertex> = graph
        .vertices()
        .iter()
        .map(|l| CubeVertex::parse(l, n))
        .collect::<Option<_>>()?;
    let ok = graph
        .edges()
        .iter()
        .all(|e| (vs[e.u].bits ^ vs[e.v].bits).count_ones() == 1);
    ok.then(|| vs.iter().map(|v| v.level()).collect())
}

/// Even and odd parity classes, as vertex indices in graph order.
pub fn bipartition(graph: &GameGraph) -> Result<(Vec<usize>, Vec<usize>), CubeError> {
    let layout = CubeLayout::detect(graph)?;
    Ok((0..graph.vertex_count()).partition(|&i| layout.vertex(i).parity() == Parity::Even))
}

/// Induced subgraph on the vertices of level at most `max_level`.
pub fn truncate_levels(graph: &GameGraph, max_level: u32) -> Result<GameGraph, CubeError> {
    let layout = CubeLayout::detect(graph)?;
    let n = layout.dim();
    if max_level > n {
        return Err(CubeError::LevelOutOfRange {
            level: max_level,
            n,
        });
    }
    if max_level == n {
        return Ok(graph.clone());
    }
    if layout.level(graph.start()) > max_level {
        return Err(CubeError::LevelOutOfRange {
            level: max_level,
            n,
        });
    }
    let mut new_index = vec![usize::MAX; graph.vertex_count()];
    let mut labels = Vec::new();
    for (i, slot) in new_index.iter_mut().enumerate() {
        if layout.level(i) <= max_level {
            *slot = labels.len();
            labels.push(graph.label(i).to_string());
        }
    }
    let edges: Vec<_> = graph
        .edges()
        .iter()
        .filter(|e| new_index[e.u] != usize::MAX && new_index[e.v] != usize::MAX)
        .map(|e| (new_index[e.u], new_index[e.v], e.weight))
        .collect();
    Ok(GameGraph::new(
        format!("{}-levels{}", graph.name(), max_level),
        labels,
        edges,
        new_index[graph.start()],
    )
    .expect("induced subgraph of a valid graph is valid"))
}

pub fn unit_cube(n: u32) -> Result<Arc<GameGraph>, CubeError> {
    generate_hypercube(CubeSpec::unit(n)).map(Arc::new)
}
