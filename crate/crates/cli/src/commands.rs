//! The batch commands: `gen`, `solve`, `verify` and `playouts`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use graphnim::hypercube::{generate_hypercube, truncate_levels, unit_cube, CubeSpec};
use graphnim::io::{load_graph, save_graph};
use graphnim::solver::{SolveConfig, Solver};
use graphnim::strategy::{
    run_playouts, verify_strategy, Quantifier, Strategy, StrategyKind, VerificationReport,
};
use graphnim::{GameGraph, GameState, Player};
use serde_json::json;

use crate::error::CliError;
use crate::report::{move_json, moves_json, show};

pub fn load_graph_file(path: &Path) -> Result<GameGraph, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    load_graph(std::io::BufReader::new(file))
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn solve_config(symmetry: bool, nodes: Option<u64>, time: Option<Duration>) -> SolveConfig {
    SolveConfig {
        use_symmetry: symmetry,
        node_limit: nodes,
        time_limit: time,
        ..SolveConfig::default()
    }
}

pub fn gen(
    cube: u32,
    weight: u32,
    truncate: Option<u32>,
    out_path: &PathBuf,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let mut graph = generate_hypercube(CubeSpec {
        n: cube,
        uniform_weight: weight,
    })?;
    if let Some(level) = truncate {
        graph = truncate_levels(&graph, level)?;
    }
    let file = File::create(out_path)
        .map_err(|e| CliError::environment(format!("cannot write {}: {e}", out_path.display())))?;
    let mut writer = BufWriter::new(file);
    save_graph(&graph, &mut writer)?;
    writer.flush()?;
    writeln!(
        out,
        "wrote {} ({} vertices, {} edges) to {}",
        graph.name(),
        graph.vertex_count(),
        graph.edge_count(),
        out_path.display()
    )?;
    Ok(())
}

/// Solves the fresh state. The report on `out` is deterministic; the elapsed
/// time goes to `timing`.
pub fn solve(
    graph: GameGraph,
    config: SolveConfig,
    out: &mut impl Write,
    timing: &mut impl Write,
) -> Result<(), CliError> {
    let state = GameState::new(Arc::new(graph));
    let mut solver = Solver::new(config);
    let result = solver.solve(&state);
    let graph = state.graph();
    match result.outcome {
        Some(outcome) => writeln!(out, "{} wins", outcome.winner(Player::P1))?,
        None => writeln!(out, "aborted")?,
    }
    let report = json!({
        "graph": graph.name(),
        "outcome": result.outcome,
        "bestMove": result.best_move.map(|m| move_json(graph, m)),
        "nodes": result.stats.nodes_expanded,
        "tableEntries": result.stats.table_entries,
        "symmetry": solver.uses_symmetry(),
        "aborted": result.aborted,
    });
    writeln!(out, "{report}")?;
    writeln!(timing, "elapsed: {:.3?}", result.stats.elapsed)?;
    match result.aborted {
        Some(reason) => Err(CliError::aborted(format!("search aborted: {reason}"))),
        None => Ok(()),
    }
}

fn quantifier_name(q: Quantifier) -> &'static str {
    match q {
        Quantifier::AllCompliant => "all",
        Quantifier::ExistsCompliant => "exists",
    }
}

fn verification_json(
    cube: u32,
    graph: &GameGraph,
    report: &VerificationReport,
) -> serde_json::Value {
    json!({
        "cube": cube,
        "strategy": report.kind.cli_name(),
        "quantifier": quantifier_name(report.quantifier),
        "verified": report.verified,
        "linesExplored": report.lines_explored,
        "maxGameLength": report.max_game_length,
        "lemmaViolations": report.lemma_violations,
        "maxLevelVisited": report.max_level_visited,
        "edgesTouched": report.edges_touched.len(),
        "nodes": report.nodes_expanded,
        "tableEntries": report.table_entries,
        "aborted": report.aborted,
        "counterexample": report.counterexample.as_deref().map(|m| moves_json(graph, m)),
    })
}

pub fn verify(
    cube: u32,
    kind: StrategyKind,
    quantifier: Quantifier,
    config: SolveConfig,
    out: &mut impl Write,
    timing: &mut impl Write,
) -> Result<(), CliError> {
    let graph = unit_cube(cube)?;
    let report = verify_strategy(&graph, kind, quantifier, &config)?;
    let header = format!("{kind} on Q{cube} ({})", quantifier_name(quantifier));
    if report.verified {
        writeln!(
            out,
            "verified: {header}, {} lines explored",
            report.lines_explored
        )?;
    } else if let Some(reason) = report.aborted {
        writeln!(out, "aborted: {header}, {reason}")?;
    } else {
        writeln!(
            out,
            "failed: {header}, {} lines explored",
            report.lines_explored
        )?;
    }
    writeln!(out, "{}", verification_json(cube, &graph, &report))?;
    writeln!(timing, "elapsed: {:.3?}", report.elapsed)?;
    if let Some(reason) = report.aborted {
        return Err(CliError::aborted(format!("verification aborted: {reason}")));
    }
    if let Some(moves) = &report.counterexample {
        writeln!(out, "counterexample:")?;
        let mut state = GameState::new(graph.clone());
        for &mv in moves {
            writeln!(
                out,
                "  {} moves to {} ({})",
                state.to_move(),
                show(graph.label(mv.to)),
                mv.amount
            )?;
            state = state
                .apply_move(mv)
                .map_err(|e| CliError::failed(format!("counterexample does not replay: {e}")))?;
        }
        writeln!(
            out,
            "  {} on move at {} with {} legal moves",
            state.to_move(),
            show(graph.label(state.position())),
            state.legal_moves().len()
        )?;
    }
    if report.verified {
        Ok(())
    } else {
        Err(CliError::failed(format!("{header} refuted")))
    }
}

/// Checks that `kind` can play seat `player` on `graph`.
pub fn check_policy(kind: StrategyKind, player: Player, graph: &GameGraph) -> Result<(), CliError> {
    if let Some(own) = kind.player() {
        if own != player {
            return Err(CliError::usage(format!(
                "{kind} plays for {own}, not {player}"
            )));
        }
    }
    Strategy::new(kind, graph)?;
    Ok(())
}

pub fn playouts(
    cube: u32,
    games: u64,
    seed: u64,
    policies: [StrategyKind; 2],
    out: &mut impl Write,
) -> Result<(), CliError> {
    let graph = unit_cube(cube)?;
    check_policy(policies[0], Player::P1, &graph)?;
    check_policy(policies[1], Player::P2, &graph)?;
    let summaries = run_playouts(&graph, policies, games, seed);
    let mut passed = 0u64;
    let mut stuck = [0u64; 2];
    let mut max_level = None;
    for s in &summaries {
        writeln!(
            out,
            "{}",
            serde_json::to_string(s).expect("summary serializes")
        )?;
        if s.properties_pass {
            passed += 1;
        }
        if let Some(p) = s.stuck_player {
            stuck[p.index()] += 1;
        }
        max_level = max_level.max(s.max_level);
    }
    let summary = json!({
        "cube": cube,
        "games": games,
        "seed": seed,
        "p1": policies[0].cli_name(),
        "p2": policies[1].cli_name(),
        "passed": passed,
        "failed": games - passed,
        "stuckP1": stuck[0],
        "stuckP2": stuck[1],
        "maxLevel": max_level,
    });
    writeln!(out, "{summary}")?;
    if passed == games {
        Ok(())
    } else {
        Err(CliError::failed(format!(
            "{} of {games} playouts failed a property",
            games - passed
        )))
    }
}
