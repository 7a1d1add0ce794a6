//! JSON session service for browser play.
//!
//! Every session sits behind its own mutex and all work on it runs on the
//! blocking pool, so requests to one session are serialized while different
//! sessions proceed in parallel.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use graphnim::io::GraphDoc;
use graphnim::solver::{SolveConfig, Solver};
use graphnim::strategy::{StrategyError, StrategyKind};
use graphnim::{GameGraph, GameState, Move, Outcome};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::Engine;
use crate::error::CliError;
use crate::report::{move_json, moves_json, parse_vertex, state_json};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    HumanVsEngine,
    HotSeat,
}

struct Session {
    mode: Mode,
    state: GameState,
    history: Vec<Move>,
    engine: Engine,
    analyst: Solver,
}

pub struct AppState {
    default_graph: Option<Arc<GameGraph>>,
    solver: SolveConfig,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(default_graph: Option<GameGraph>, solver: SolveConfig) -> Arc<Self> {
        Arc::new(Self {
            default_graph: default_graph.map(Arc::new),
            solver,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        })
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id:?}")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, message)
    }
}

impl From<StrategyError> for ApiError {
    fn from(e: StrategyError) -> Self {
        let status = match e {
            StrategyError::SolverAborted(_) => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::CONFLICT,
        };
        ApiError::new(status, format!("engine cannot move: {e}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

/// Runs `f` on the locked session off the async workers.
async fn with_session<T: Send + 'static>(
    app: &AppState,
    id: &str,
    f: impl FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    let session = app.session(id)?;
    tokio::task::spawn_blocking(move || f(&mut session.lock().expect("session poisoned")))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

impl Session {
    fn view(&self) -> Value {
        let winner = self
            .state
            .is_terminal()
            .then(|| self.state.to_move().opponent());
        json!({
            "mode": self.mode,
            "engine": self.engine.kind().cli_name(),
            "state": state_json(&self.state),
            "toMove": self.state.to_move(),
            "winner": winner,
            "history": moves_json(self.state.graph(), &self.history),
        })
    }

    fn commit(&mut self, mv: Move) {
        self.state = self.state.apply_move(mv).expect("move was checked");
        self.history.push(mv);
    }

    fn engine_reply(&mut self, state: &GameState) -> Result<Option<Move>, ApiError> {
        if state.is_terminal() {
            return Ok(None);
        }
        Ok(Some(self.engine.reply(state)?))
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NewRequest {
    graph: Option<GraphDoc>,
    #[serde(default)]
    mode: Mode,
    engine: Option<String>,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveRequest {
    to: String,
    amount: u32,
}

async fn new_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let request: NewRequest = if body.is_empty() {
        parse_body(&Bytes::from_static(b"{}"))?
    } else {
        parse_body(&body)?
    };
    let graph = match request.graph {
        Some(doc) => Arc::new(
            doc.into_graph()
                .map_err(|e| ApiError::bad_request(format!("invalid graph: {e}")))?,
        ),
        None => app
            .default_graph
            .clone()
            .ok_or_else(|| ApiError::bad_request("no graph given and the server has no default"))?,
    };
    let kind: StrategyKind = match request.engine.as_deref() {
        Some(name) => name.parse().map_err(ApiError::bad_request)?,
        None => StrategyKind::SolverOptimal,
    };
    let engine = Engine::new(kind, &graph, request.seed, app.solver.clone())
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let session = Session {
        mode: request.mode,
        state: GameState::new(graph),
        history: Vec::new(),
        engine,
        analyst: Solver::new(app.solver.clone()),
    };
    let id = app.next_id.fetch_add(1, Ordering::Relaxed).to_string();
    let mut view = session.view();
    view["id"] = json!(id);
    app.sessions
        .lock()
        .expect("session map poisoned")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok(Json(view))
}

async fn get_state(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let view = with_session(&app, &id, |s| Ok(s.view())).await?;
    Ok(Json(with_id(view, &id)))
}

fn with_id(mut view: Value, id: &str) -> Value {
    view["id"] = json!(id);
    view
}

async fn human_move(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let request: MoveRequest = parse_body(&body)?;
    let view = with_session(&app, &id, move |s| {
        let graph = s.state.graph().clone();
        let to = parse_vertex(&graph, &request.to)
            .ok_or_else(|| ApiError::bad_request(format!("no vertex {:?}", request.to)))?;
        let mv = Move::new(to, request.amount);
        if s.state.is_terminal() {
            return Err(ApiError::conflict("game is over"));
        }
        let after = s
            .state
            .apply_move(mv)
            .map_err(|e| ApiError::conflict(format!("illegal: {e}")))?;
        // the reply is computed before anything is committed, so a failing
        // engine leaves the session untouched
        let reply = match s.mode {
            Mode::HumanVsEngine => s.engine_reply(&after)?,
            Mode::HotSeat => None,
        };
        s.commit(mv);
        if let Some(r) = reply {
            s.commit(r);
        }
        let mut view = s.view();
        view["humanMove"] = move_json(&graph, mv);
        view["engineMove"] = reply.map_or(Value::Null, |r| move_json(&graph, r));
        Ok(view)
    })
    .await?;
    Ok(Json(with_id(view, &id)))
}

async fn engine_move(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let view = with_session(&app, &id, |s| {
        let state = s.state.clone();
        let mv = s
            .engine_reply(&state)?
            .ok_or_else(|| ApiError::conflict("game is over"))?;
        s.commit(mv);
        let mut view = s.view();
        view["engineMove"] = move_json(state.graph(), mv);
        Ok(view)
    })
    .await?;
    Ok(Json(with_id(view, &id)))
}

async fn solve_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let body = with_session(&app, &id, |s| {
        let result = s.analyst.solve(&s.state);
        let graph = s.state.graph();
        // in a lost position suggest the move that holds out longest
        let best = match result.outcome {
            Some(Outcome::MoverLoses) => s.analyst.best_move(&s.state).ok().flatten(),
            _ => result.best_move,
        };
        Ok(json!({
            "outcome": result.outcome,
            "toMove": s.state.to_move(),
            "bestMove": best.map(|m| move_json(graph, m)),
            "nodes": result.stats.nodes_expanded,
            "tableEntries": result.stats.table_entries,
            "elapsedMs": result.stats.elapsed.as_secs_f64() * 1000.0,
            "aborted": result.aborted,
        }))
    })
    .await?;
    Ok(Json(body))
}

async fn delete_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    match app
        .sessions
        .lock()
        .expect("session map poisoned")
        .remove(&id)
    {
        Some(_) => StatusCode::NO_CONTENT.into_response(),
        None => ApiError::new(StatusCode::NOT_FOUND, format!("no session {id:?}")).into_response(),
    }
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/new", post(new_session))
        .route("/state/{id}", get(get_state))
        .route("/move/{id}", post(human_move))
        .route("/solve/{id}", get(solve_session))
        .route("/engine-move/{id}", post(engine_move))
        .route("/session/{id}", delete(delete_session))
        .with_state(app)
}

/// Binds `addr` and serves until interrupted.
pub fn serve(
    addr: SocketAddr,
    default_graph: Option<GameGraph>,
    solver: SolveConfig,
    announce: impl FnOnce(SocketAddr),
) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::environment(format!("cannot listen on {addr}: {e}")))?;
        announce(listener.local_addr()?);
        let app = router(AppState::new(default_graph, solver));
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
