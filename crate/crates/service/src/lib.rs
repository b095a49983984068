//! HTTP facade over the axiom engine: ontology loading and browsing, one
//! editing session per axiom, gated operations, menus, undo/redo and the
//! generated text.
//!
//! Locks are always taken registry first, then session, so loading an
//! ontology (which refreshes every session) cannot deadlock with an edit.

pub mod dto;
mod error;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};
use tower_http::cors::CorsLayer;

use wsml_axiom::codegen::{generate_axiom_text, AxiomNamer, RenderOptions};
use wsml_axiom::engine::{EditMode, EditOp, Editor, Menu};
use wsml_axiom::iri::Iri;
use wsml_axiom::ontology::tree::{registry_tree, TreeNode};
use wsml_axiom::ontology::{OntologyRegistry, OntologyWarehouse};
use wsml_axiom::persist::PersistedAxiom;

pub use dto::{parse_target, GraphStateDto, OntologySummary, OpResponse, SessionDto};
pub use error::ApiError;

type Session = Arc<Mutex<Editor>>;

pub struct AppState {
    registry: RwLock<OntologyRegistry>,
    warehouse: Option<OntologyWarehouse>,
    namer: Mutex<AxiomNamer>,
    sessions: RwLock<HashMap<String, Session>>,
    next_session: AtomicU64,
}

impl AppState {
    pub fn new(registry: OntologyRegistry, warehouse: Option<OntologyWarehouse>) -> Arc<Self> {
        Arc::new(AppState {
            registry: RwLock::new(registry),
            warehouse,
            namer: Mutex::new(AxiomNamer::new()),
            sessions: RwLock::new(HashMap::new()),
            next_session: AtomicU64::new(1),
        })
    }

    async fn session(&self, id: &str) -> Result<Session, ApiError> {
        self.sessions.read().await.get(id).cloned().ok_or_else(|| ApiError::no_session(id))
    }

    async fn open(&self, editor: Editor, reg: &OntologyRegistry) -> SessionDto {
        let id = format!("ax{}", self.next_session.fetch_add(1, Ordering::Relaxed));
        let state = GraphStateDto::build(&editor, reg);
        self.sessions.write().await.insert(id.clone(), Arc::new(Mutex::new(editor)));
        SessionDto { id, state }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/ontologies", get(list_ontologies).post(load_ontology))
        .route("/axioms", post(create_axiom))
        .route("/axioms/restore", post(restore))
        .route("/axioms/{id}", get(get_axiom).delete(delete_axiom))
        .route("/axioms/{id}/ops", post(apply_op))
        .route("/axioms/{id}/undo", post(undo))
        .route("/axioms/{id}/redo", post(redo))
        .route("/axioms/{id}/candidates", get(candidates))
        .route("/axioms/{id}/wsml", get(wsml))
        .route("/axioms/{id}/persist", put(persist))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

fn parse_body<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegistryDto {
    pub loaded: Vec<OntologySummary>,
    pub tree: Vec<TreeNode>,
}

async fn list_ontologies(State(s): State<Arc<AppState>>) -> Json<RegistryDto> {
    let reg = s.registry.read().await;
    Json(RegistryDto { loaded: reg.ontologies().map(OntologySummary::from).collect(), tree: registry_tree(&reg) })
}

#[derive(Debug, Default, Deserialize)]
struct LoadRequest {
    iri: Option<String>,
    path: Option<PathBuf>,
}

async fn load_ontology(State(s): State<Arc<AppState>>, body: Bytes) -> Result<Json<OntologySummary>, ApiError> {
    let req: LoadRequest = parse_body(&body)?;
    let mut reg = s.registry.write().await;
    let iri = match (req.iri, req.path) {
        (Some(iri), _) => {
            let iri = Iri::new(iri);
            match &s.warehouse {
                Some(wh) => reg.load_by_iri(wh, &iri)?,
                None => return Err(wsml_axiom::ontology::OntologyError::NotInWarehouse(iri).into()),
            }
        }
        (None, Some(path)) => reg.load_file(path)?,
        (None, None) => return Err(ApiError::bad_request("give `iri` or `path`")),
    };
    // variables created earlier pick up attributes that just became known
    for session in s.sessions.read().await.values() {
        session.lock().await.apply(&reg, &EditOp::RefreshSlots)?;
    }
    let loaded = reg.ontology(&iri).expect("just loaded");
    Ok(Json(OntologySummary::from(loaded)))
}

#[derive(Debug, Default, Deserialize)]
struct CreateRequest {
    name: Option<String>,
}

async fn create_axiom(State(s): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<SessionDto>), ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let reg = s.registry.read().await;
    let name = {
        let mut namer = s.namer.lock().await;
        match req.name {
            Some(n) => {
                namer.observe(&n);
                n
            }
            None => namer.next_name(),
        }
    };
    Ok((StatusCode::CREATED, Json(s.open(Editor::new(name), &reg).await)))
}

async fn get_axiom(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<GraphStateDto>, ApiError> {
    let reg = s.registry.read().await;
    let session = s.session(&id).await?;
    let e = session.lock().await;
    Ok(Json(GraphStateDto::build(&e, &reg)))
}

async fn delete_axiom(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    match s.sessions.write().await.remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::no_session(&id)),
    }
}

/// `{op, args, revision?}`; `op` is an engine operation name or `set_mode`.
#[derive(Debug, Default, Deserialize)]
struct OpRequest {
    op: String,
    #[serde(default)]
    args: Value,
    revision: Option<u64>,
}

async fn apply_op(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<OpResponse>, ApiError> {
    let req: OpRequest = parse_body(&body)?;
    let reg = s.registry.read().await;
    let session = s.session(&id).await?;
    let mut e = session.lock().await;
    if let Some(seen) = req.revision {
        if seen != e.revision() {
            return Err(ApiError::stale(seen, e.revision()));
        }
    }
    let outcome = if req.op == "set_mode" {
        let mode: EditMode = serde_json::from_value(req.args.get("mode").cloned().unwrap_or(Value::Null))
            .map_err(|x| ApiError::bad_request(format!("bad mode: {x}")))?;
        e.set_mode(mode);
        Default::default()
    } else {
        let value = if req.args.is_null() { json!({ "op": req.op }) } else { json!({ "op": req.op, "args": req.args }) };
        let op: EditOp = serde_json::from_value(value)
            .map_err(|x| ApiError::bad_request(format!("bad operation '{}': {x}", req.op)))?;
        e.apply(&reg, &op)?
    };
    Ok(Json(OpResponse { outcome, state: GraphStateDto::build(&e, &reg) }))
}

async fn history(s: &AppState, id: &str, redo: bool) -> Result<Json<GraphStateDto>, ApiError> {
    let reg = s.registry.read().await;
    let session = s.session(id).await?;
    let mut e = session.lock().await;
    if redo {
        e.redo()?;
    } else {
        e.undo()?;
    }
    Ok(Json(GraphStateDto::build(&e, &reg)))
}

async fn undo(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<GraphStateDto>, ApiError> {
    history(&s, &id, false).await
}

async fn redo(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<GraphStateDto>, ApiError> {
    history(&s, &id, true).await
}

#[derive(Debug, Deserialize)]
struct TargetQuery {
    target: String,
}

async fn candidates(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TargetQuery>,
) -> Result<Json<Menu>, ApiError> {
    let target = parse_target(&q.target).ok_or_else(|| ApiError::bad_request(format!("bad target '{}'", q.target)))?;
    let reg = s.registry.read().await;
    let session = s.session(&id).await?;
    let e = session.lock().await;
    Ok(Json(e.candidates(&reg, &target)))
}

async fn wsml(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let reg = s.registry.read().await;
    let session = s.session(&id).await?;
    let e = session.lock().await;
    let text = generate_axiom_text(e.model(), &reg, RenderOptions::default());
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text))
}

async fn persist(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<PersistedAxiom>, ApiError> {
    let reg = s.registry.read().await;
    let session = s.session(&id).await?;
    let e = session.lock().await;
    let counter = s.namer.lock().await.counter();
    Ok(Json(PersistedAxiom::capture(&e, &reg, counter)))
}

async fn restore(State(s): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<SessionDto>), ApiError> {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let doc = PersistedAxiom::from_json(text)?;
    let mut reg = s.registry.write().await;
    let editor = doc.restore(&mut reg, s.warehouse.as_ref())?;
    {
        let mut namer = s.namer.lock().await;
        namer.observe(&doc.axiom_name);
        if doc.counter > namer.counter() {
            *namer = AxiomNamer::resume(doc.counter);
        }
    }
    let reg = reg.downgrade();
    Ok((StatusCode::CREATED, Json(s.open(editor, &reg).await)))
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/service.md")]
pub mod book_service {}
