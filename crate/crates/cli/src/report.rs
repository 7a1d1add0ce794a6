//! JSON and text renderings shared by the commands, the play loop and the
//! session service.

use graphnim::hypercube::label_levels;
use graphnim::{GameGraph, GameState, Move};
use serde_json::{json, Map, Value};

/// Display form of a vertex label; the empty set prints as `∅`.
pub fn show(label: &str) -> &str {
    if label.is_empty() {
        "∅"
    } else {
        label
    }
}

/// Looks up a vertex typed by a user. `∅` and `{}` name the empty label.
pub fn parse_vertex(graph: &GameGraph, text: &str) -> Option<usize> {
    let label = match text {
        "∅" | "{}" => "",
        other => other,
    };
    graph.vertex_index(label)
}

pub fn move_json(graph: &GameGraph, mv: Move) -> Value {
    json!({ "to": graph.label(mv.to), "amount": mv.amount })
}

pub fn moves_json(graph: &GameGraph, moves: &[Move]) -> Value {
    Value::Array(moves.iter().map(|&m| move_json(graph, m)).collect())
}

pub fn state_json(state: &GameState) -> Value {
    let graph = state.graph();
    let edges: Vec<Value> = graph
        .edges()
        .iter()
        .zip(state.weights())
        .map(|(e, &w)| json!({ "u": graph.label(e.u), "v": graph.label(e.v), "w": w }))
        .collect();
    let mut body = json!({
        "vertices": graph.vertices(),
        "edges": edges,
        "position": graph.label(state.position()),
        "moveCount": state.move_count(),
        "toMove": state.to_move(),
        "terminal": state.is_terminal(),
    });
    if let Some(levels) = label_levels(graph) {
        let levels: Map<String, Value> = graph
            .vertices()
            .iter()
            .zip(levels)
            .map(|(label, level)| (label.clone(), level.into()))
            .collect();
        body["levels"] = Value::Object(levels);
    }
    body
}

/// Remaining edges and the piece, one edge per line.
pub fn render_board(state: &GameState) -> String {
    let graph = state.graph();
    let mut text = format!(
        "Δ on {}, {} to move\n",
        show(graph.label(state.position())),
        state.to_move()
    );
    for (e, &w) in graph.edges().iter().zip(state.weights()) {
        if w > 0 {
            text.push_str(&format!(
                "  {}-{} {}\n",
                show(graph.label(e.u)),
                show(graph.label(e.v)),
                w
            ));
        }
    }
    text
}
