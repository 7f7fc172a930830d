//! The JSON HTTP service.
//!
//! Each session sits behind its own lock: mutations and undo take it
//! exclusively and run one at a time in arrival order, reads share it, and
//! different sessions never wait on each other. An optional journal records
//! every accepted operation so a restarted service can replay them.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write as _};
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock as SyncRwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use mutwb_core::exchange::{explore, DecoratedSeed, monomial_budget_from_env, ExploreError, ExploreOptions, Identity};
use mutwb_core::registry::EXAMPLES;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::RwLock;

use crate::state::{SessionState, Source, StepError};

/// Deepest exploration the exchange endpoint accepts.
pub const MAX_EXCHANGE_DEPTH: usize = 12;
const DEFAULT_EXCHANGE_DEPTH: usize = 3;
const DEFAULT_EXCHANGE_VERTICES: usize = 1000;

struct Session {
    state: SessionState,
    undo: Vec<SessionState>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum JournalEntry {
    Create { id: String, source: Source },
    Mutate { id: String, index: usize },
    Undo { id: String },
}

#[derive(Default)]
pub struct Store {
    sessions: SyncRwLock<HashMap<String, Arc<RwLock<Session>>>>,
    journal: Option<Mutex<File>>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    /// A store backed by an append-only journal; existing entries are
    /// replayed first.
    pub fn with_journal(path: &Path) -> std::io::Result<Self> {
        let mut store = Self::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (n, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: JournalEntry = serde_json::from_str(&line).map_err(|e| invalid(n, e))?;
                store.replay(entry).map_err(|e| invalid(n, e))?;
            }
        }
        store.journal = Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?));
        Ok(store)
    }

    fn replay(&self, entry: JournalEntry) -> Result<(), String> {
        let mut sessions = self.sessions.write().expect("lock");
        match entry {
            JournalEntry::Create { id, source } => {
                let state = source.build().map_err(|e| e.to_string())?;
                sessions.insert(id, Arc::new(RwLock::new(Session { state, undo: Vec::new() })));
            }
            JournalEntry::Mutate { id, index } => {
                let s = sessions.get(&id).ok_or("unknown session")?;
                let mut s = s.try_write().expect("no contention during replay");
                let next = s.state.mutate(index).map_err(|e| e.to_string())?;
                let prev = std::mem::replace(&mut s.state, next);
                s.undo.push(prev);
            }
            JournalEntry::Undo { id } => {
                let s = sessions.get(&id).ok_or("unknown session")?;
                let mut s = s.try_write().expect("no contention during replay");
                s.state = s.undo.pop().ok_or("nothing to undo")?;
            }
        }
        Ok(())
    }

    fn record(&self, entry: &JournalEntry) {
        if let Some(j) = &self.journal {
            let mut f = j.lock().expect("journal lock");
            let line = serde_json::to_string(entry).expect("entry serializes");
            if let Err(e) = writeln!(f, "{line}").and_then(|()| f.flush()) {
                eprintln!("journal write failed: {e}");
            }
        }
    }

    fn get(&self, id: &str) -> Option<Arc<RwLock<Session>>> {
        self.sessions.read().expect("lock").get(id).cloned()
    }
}

fn invalid(line: usize, e: impl std::fmt::Display) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, format!("journal line {}: {e}", line + 1))
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/api/examples", get(examples))
        .route("/api/sessions", post(create))
        .route("/api/sessions/{id}", get(read))
        .route("/api/sessions/{id}/mutations", post(mutate))
        .route("/api/sessions/{id}/undo", post(undo))
        .route("/api/sessions/{id}/exchange", get(exchange))
        .with_state(store)
}

pub async fn serve(listener: tokio::net::TcpListener, store: Arc<Store>) -> std::io::Result<()> {
    axum::serve(listener, router(store)).await
}

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, reason: &str, message: impl std::fmt::Display) -> Response {
    json_body(status, json!({"reason": reason, "message": message.to_string()}).to_string())
}

fn unprocessable(message: impl std::fmt::Display) -> Response {
    error(StatusCode::UNPROCESSABLE_ENTITY, "invalid", message)
}

fn not_found(id: &str) -> Response {
    error(StatusCode::NOT_FOUND, "unknown-session", format!("no session {id:?}"))
}

/// `{"id": .., "state": ..}` with the state spliced in verbatim, so its
/// bytes are exactly [`SessionState::render`].
fn session_body(status: StatusCode, id: &str, state: &SessionState) -> Response {
    let id = serde_json::to_string(id).expect("string serializes");
    json_body(status, format!("{{\"id\":{id},\"state\":{}}}", state.render()))
}

async fn examples() -> Response {
    let list: Vec<_> = EXAMPLES.iter().map(|e| json!({"key": e.key, "description": e.description})).collect();
    json_body(StatusCode::OK, serde_json::Value::Array(list).to_string())
}

async fn create(State(store): State<Arc<Store>>, body: Bytes) -> Response {
    let source: Source = match serde_json::from_slice(&body) {
        Ok(s) => s,
        Err(e) => return unprocessable(e),
    };
    let built = tokio::task::spawn_blocking({
        let source = source.clone();
        move || source.build()
    })
    .await
    .expect("task");
    let state = match built {
        Ok(s) => s,
        Err(e) => return unprocessable(e),
    };
    let id = uuid::Uuid::new_v4().simple().to_string();
    let response = session_body(StatusCode::CREATED, &id, &state);
    store.record(&JournalEntry::Create { id: id.clone(), source });
    store.sessions.write().expect("lock").insert(id, Arc::new(RwLock::new(Session { state, undo: Vec::new() })));
    response
}

async fn read(State(store): State<Arc<Store>>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(session) = store.get(&id) else { return not_found(&id) };
    let s = session.read().await;
    session_body(StatusCode::OK, &id, &s.state)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MutationBody {
    /// 1-based.
    index: usize,
}

async fn mutate(State(store): State<Arc<Store>>, UrlPath(id): UrlPath<String>, body: Bytes) -> Response {
    let Some(session) = store.get(&id) else { return not_found(&id) };
    let body: MutationBody = match serde_json::from_slice(&body) {
        Ok(b) => b,
        Err(e) => return unprocessable(e),
    };
    let Some(k) = body.index.checked_sub(1) else { return unprocessable("indices start at 1") };
    let mut guard = session.write_owned().await;
    let step = guard.state.history().len() + 1;
    let current = guard.state.clone();
    let result = tokio::task::spawn_blocking(move || current.mutate(k)).await.expect("task");
    match result {
        Ok(next) => {
            store.record(&JournalEntry::Mutate { id: id.clone(), index: k });
            let prev = std::mem::replace(&mut guard.state, next);
            guard.undo.push(prev);
            session_body(StatusCode::OK, &id, &guard.state)
        }
        Err(e @ StepError::OutOfRange { .. }) => unprocessable(e),
        Err(e @ StepError::Failed(_)) => unprocessable(e),
        Err(e) => json_body(
            StatusCode::CONFLICT,
            json!({"reason": e.reason(), "step": step, "index": k + 1, "message": e.to_string()}).to_string(),
        ),
    }
}

async fn undo(State(store): State<Arc<Store>>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(session) = store.get(&id) else { return not_found(&id) };
    let mut guard = session.write().await;
    match guard.undo.pop() {
        Some(prev) => {
            store.record(&JournalEntry::Undo { id: id.clone() });
            guard.state = prev;
            session_body(StatusCode::OK, &id, &guard.state)
        }
        None => error(StatusCode::CONFLICT, "nothing-to-undo", "the session has no mutations to undo"),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExchangeQuery {
    depth: Option<usize>,
    max_vertices: Option<usize>,
    identity: Option<String>,
}

async fn exchange(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
    query: Result<Query<ExchangeQuery>, axum::extract::rejection::QueryRejection>,
) -> Response {
    let Some(session) = store.get(&id) else { return not_found(&id) };
    let Ok(Query(q)) = query else { return unprocessable("bad query string") };
    let depth = q.depth.unwrap_or(DEFAULT_EXCHANGE_DEPTH);
    if depth > MAX_EXCHANGE_DEPTH {
        return unprocessable(format!("depth must be at most {MAX_EXCHANGE_DEPTH}"));
    }
    let identity = match q.identity.as_deref() {
        None | Some("exact") => Identity::Exact,
        Some("fingerprint") => Identity::Fingerprint,
        Some(other) => return unprocessable(format!("unknown identity {other:?}")),
    };
    let opts = ExploreOptions {
        depth: Some(depth),
        max_vertices: Some(q.max_vertices.unwrap_or(DEFAULT_EXCHANGE_VERTICES)),
        max_monomials: monomial_budget_from_env(),
    };
    let guard = session.read_owned().await;
    // without tracked expressions the current state becomes the root chart
    let root = match guard.state.decorated() {
        Some(d) => d.clone(),
        None => DecoratedSeed::root(guard.state.workbench().clone(), true),
    }
    .with_identity(identity);
    drop(guard);
    let result = tokio::task::spawn_blocking(move || match explore(root, &opts) {
        Ok(g) => Ok(g.to_json()),
        Err(ExploreError::BudgetExceeded { graph, reason }) => {
            let mut v = graph.to_json();
            v["budget_exceeded"] = json!(reason);
            Ok(v)
        }
        Err(ExploreError::Failed(e)) => Err(e),
    })
    .await
    .expect("task");
    match result {
        Ok(v) => json_body(StatusCode::OK, v.to_string()),
        Err(e) => unprocessable(e),
    }
}
