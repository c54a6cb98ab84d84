//! HTTP interface over the store, the schema and the query engine.
//!
//! | method | path               | body / response                              |
//! |--------|--------------------|----------------------------------------------|
//! | POST   | `/query`           | `{"q": text}` → `{columns, rows}`            |
//! | POST   | `/statements`      | triples text → `{added, duplicate, errors}`  |
//! | GET    | `/classes`         | class forest `[{iri, label, children}]`      |
//! | GET    | `/resources/{iri}` | triples with that subject, with provenance   |
//! | GET    | `/stats`           | store statistics                             |
//! | GET    | `/schema`          | schema triples, `application/n-triples`      |
//!
//! Errors are `{code, message, position?}` with a matching HTTP status.

mod error;
pub mod json;

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use cris_core::model::{BlankNode, Iri, PrefixMap, Term, Triple};
use cris_core::schema::{closure, is_schema_triple, load_schema_lenient, ClosureTable, Schema};
use cris_core::store::{self, MergeMode, SourceId, Store, StoreError};
use cris_core::syntax::{parse_triples, serialize};
use cris_core::{evaluate, parse_query};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;
use tokio::sync::Mutex;
use tower_http::cors::CorsLayer;
use tracing::{info, warn};

pub use error::ApiError;

pub const DEFAULT_BIND: &str = "127.0.0.1:7878";
pub const DEFAULT_BODY_LIMIT: usize = 8 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("invalid CORS origin {0:?}")]
    BadOrigin(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServerOptions {
    pub cors_origin: Option<String>,
    pub body_limit: usize,
}

impl Default for ServerOptions {
    fn default() -> Self {
        ServerOptions {
            cors_origin: None,
            body_limit: DEFAULT_BODY_LIMIT,
        }
    }
}

/// Store plus the schema derived from it. Replaced wholesale on writes, so
/// readers see either the old or the new version.
struct Engine {
    store: Store,
    schema_triples: BTreeSet<Triple>,
    schema: Schema,
    ct: ClosureTable,
}

impl Engine {
    fn new(store: Store, base: &BTreeSet<Triple>) -> Self {
        let mut schema_triples = base.clone();
        schema_triples.extend(
            store
                .snapshot()
                .triples()
                .filter(|t| is_schema_triple(t))
                .cloned(),
        );
        let (schema, errors) = load_schema_lenient(&schema_triples);
        for e in errors {
            warn!("{e}");
        }
        let ct = closure(&schema);
        Engine {
            store,
            schema_triples,
            schema,
            ct,
        }
    }
}

pub struct AppState {
    engine: RwLock<Arc<Engine>>,
    /// Bundled or configured schema, always present regardless of the store.
    base_schema: BTreeSet<Triple>,
    persist_dir: Option<PathBuf>,
    writer: Mutex<()>,
}

impl AppState {
    /// `base_schema` is served and used for inference next to any schema
    /// triples in the store. With `persist_dir`, every write is saved there
    /// before it becomes visible.
    pub fn new(store: Store, base_schema: Vec<Triple>, persist_dir: Option<PathBuf>) -> Arc<Self> {
        let base_schema: BTreeSet<Triple> = base_schema.into_iter().collect();
        Arc::new(AppState {
            engine: RwLock::new(Arc::new(Engine::new(store, &base_schema))),
            base_schema,
            persist_dir,
            writer: Mutex::new(()),
        })
    }

    fn engine(&self) -> Arc<Engine> {
        self.engine.read().unwrap().clone()
    }

    pub fn store(&self) -> Store {
        self.engine().store.clone()
    }
}

pub fn router(state: Arc<AppState>, options: &ServerOptions) -> Result<Router, ServerError> {
    let mut app = Router::new()
        .route("/query", post(query))
        .route("/statements", post(statements))
        .route("/classes", get(classes))
        .route("/resources/{*iri}", get(resource))
        .route("/stats", get(stats))
        .route("/schema", get(schema))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(
                StatusCode::METHOD_NOT_ALLOWED,
                "METHOD_NOT_ALLOWED",
                "method not allowed",
            )
        })
        .layer(DefaultBodyLimit::max(options.body_limit))
        .with_state(state);
    if let Some(origin) = &options.cors_origin {
        let value =
            HeaderValue::from_str(origin).map_err(|_| ServerError::BadOrigin(origin.clone()))?;
        app = app.layer(
            CorsLayer::new()
                .allow_origin(value)
                .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    Ok(app)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, app: Router) -> Result<(), ServerError> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app).await?;
    Ok(())
}

async fn query(
    State(state): State<Arc<AppState>>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<Value>, ApiError> {
    #[derive(Deserialize)]
    struct Body {
        q: String,
    }
    let body: Body = serde_json::from_slice(&body?)
        .map_err(|e| ApiError::bad_request(format!("expected {{\"q\": string}}: {e}")))?;
    let ast = parse_query(&body.q, &PrefixMap::cerif())?;
    let engine = state.engine();
    let table = evaluate(&ast, &engine.store.snapshot(), &engine.ct);
    Ok(Json(json::table_json(&table)))
}

#[derive(Debug, Deserialize)]
struct StatementParams {
    source: Option<String>,
    mode: Option<String>,
}

fn parse_mode(text: Option<&str>) -> Result<MergeMode, ApiError> {
    match text {
        None | Some("accumulate") => Ok(MergeMode::Accumulate),
        Some("replace") | Some("replace-source") => Ok(MergeMode::ReplaceSource),
        Some(other) => Err(ApiError::bad_request(format!(
            "mode must be accumulate or replace, not {other:?}"
        ))),
    }
}

async fn statements(
    State(state): State<Arc<AppState>>,
    Query(params): Query<StatementParams>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<json::StatementsJson>, ApiError> {
    let body = body?;
    let text =
        std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let source = match params.source.as_deref() {
        None => SourceId::Local,
        Some(s) => {
            SourceId::parse(s).ok_or_else(|| ApiError::bad_request(format!("bad source {s:?}")))?
        }
    };
    let mode = parse_mode(params.mode.as_deref())?;
    // blank labels are scoped per source, so re-posting a body is idempotent
    let parsed = parse_triples(text, &source.to_string());
    let errors = parsed.errors.iter().map(Into::into).collect();
    if parsed.triples.is_empty() && !parsed.errors.is_empty() {
        let mut err = ApiError::new(
            StatusCode::BAD_REQUEST,
            "BAD_TRIPLES",
            format!(
                "no line parsed; first error on line {}: {}",
                parsed.errors[0].line, parsed.errors[0].message
            ),
        );
        err.position = Some(parsed.errors[0].line);
        return Err(err);
    }

    let _writer = state.writer.lock().await;
    let current = state.engine();
    let mut next = current.store.clone();
    let counts = next.merge(&parsed, &source, store::now(), mode);
    if let Some(dir) = &state.persist_dir {
        next.save_dir(dir).map_err(|e: StoreError| {
            ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "STORE_IO", e.to_string())
        })?;
    }
    let schema_changed =
        mode == MergeMode::ReplaceSource || parsed.triples.iter().any(is_schema_triple);
    let engine = if schema_changed {
        Engine::new(next, &state.base_schema)
    } else {
        Engine {
            store: next,
            schema_triples: current.schema_triples.clone(),
            schema: current.schema.clone(),
            ct: current.ct.clone(),
        }
    };
    *state.engine.write().unwrap() = Arc::new(engine);
    Ok(Json(json::StatementsJson {
        added: counts.added,
        duplicate: counts.duplicate,
        errors,
    }))
}

async fn classes(State(state): State<Arc<AppState>>) -> Json<Vec<json::ClassNode>> {
    Json(json::class_tree(&state.engine().schema))
}

async fn resource(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let subject = match id.strip_prefix("_:") {
        Some(label) => BlankNode::new(label).map(Term::Blank),
        None => Iri::new(id.as_str()).map(Term::Iri),
    }
    .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let snap = state.engine().store.snapshot();
    let triples = snap.match_pattern(Some(&subject), None, None);
    if triples.is_empty() {
        return Err(ApiError::not_found(format!(
            "{subject} is not the subject of any triple"
        )));
    }
    let mut sources = BTreeSet::new();
    let rows: Vec<Value> = triples
        .iter()
        .map(|t| {
            let prov = snap.provenance(t).expect("stored triple has provenance");
            sources.extend(prov.iter().map(|(s, _)| s.to_string()));
            json!({
                "subject": json::term_json(t.subject()),
                "predicate": t.predicate().as_str(),
                "object": json::term_json(t.object()),
                "provenance": json::provenance_json(prov),
            })
        })
        .collect();
    Ok(Json(json!({
        "subject": json::term_json(&subject),
        "triples": rows,
        "sources": sources,
    })))
}

async fn stats(State(state): State<Arc<AppState>>) -> Json<json::StatsJson> {
    let engine = state.engine();
    let snap = engine.store.snapshot();
    Json(json::StatsJson {
        instance_triples: snap.triples().filter(|t| !is_schema_triple(t)).count(),
        store: snap.stats(),
        schema_classes: engine.schema.classes.len(),
        schema_properties: engine.schema.properties.len(),
    })
}

async fn schema(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    let body = serialize(&state.engine().schema_triples);
    (
        [(header::CONTENT_TYPE, "application/n-triples; charset=utf-8")],
        body,
    )
}
