//! HTTP service over log skeletons.
//!
//! | Method | Path | Body | Response |
//! |---|---|---|---|
//! | `POST` | `/logs?format=&name=` | log file bytes | `201` with a [`LogHandle`] |
//! | `GET` | `/logs` | | handles in upload order |
//! | `GET` | `/logs/{id}` | | one [`LogHandle`] |
//! | `GET` | `/logs/{id}/skeleton?required=&forbidden=&relations=&activities=&hyper=&format=` | | graph document, DOT text or skeleton JSON |
//! | `POST` | `/logs/{id}/classify` | [`ClassifyRequest`] | verdict list (JSON or TSV report) |
//!
//! The upload format is `xes`, `csv` or `trace-lines`; when absent it is
//! guessed from the extension of `name`, falling back to trace-lines.
//! Errors are `{"error": "..."}` with status 400 (bad input), 404 (unknown
//! id), 413 (upload over the size limit) or 504 (request timeout).
//!
//! Payloads are produced by [`skeleton_document`] and [`classify_document`],
//! which the command line calls too, so both paths give identical bytes.

use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use log_skeleton::ingestion::{write_report, write_report_json, LogFormat};
use log_skeleton::render::document;
use log_skeleton::{ActivityLog, Classifier, ClassifierConfig, FilterSpec, LabeledTrace, LogSkeleton};
use lru::LruCache;
use serde::Deserialize;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

mod error;
pub mod request;
mod store;

pub use error::ApiError;
pub use request::{ClassifyRequest, ReportFormat, SkeletonQuery, SkeletonRequest, TestTrace, TestTraces};
pub use store::{LogHandle, Store, StoreError, StoredLog};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Largest accepted request body.
    pub max_upload_bytes: usize,
    /// Bound on the work of one request; exceeded requests answer 504.
    pub request_timeout: Duration,
    /// Skeletons kept per (log, filter) pair.
    pub cache_capacity: NonZeroUsize,
    pub data_dir: Option<PathBuf>,
    /// Built explorer assets served at `/`.
    pub ui_dir: Option<PathBuf>,
    /// Origin allowed by CORS, for a UI dev server on another port.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            max_upload_bytes: 64 * 1024 * 1024,
            request_timeout: Duration::from_secs(120),
            cache_capacity: NonZeroUsize::new(64).unwrap(),
            data_dir: None,
            ui_dir: None,
            cors_origin: None,
        }
    }
}

/// The text served for a skeleton query on `log`, named `name` in the
/// provenance footer.
pub fn skeleton_document(log: &ActivityLog, name: &str, request: &SkeletonRequest) -> Result<String, ApiError> {
    let skel = LogSkeleton::build(&log.filter(&request.spec)?);
    render_request(&skel, name, request)
}

fn render_request(skel: &LogSkeleton, name: &str, request: &SkeletonRequest) -> Result<String, ApiError> {
    Ok(document(skel, name, &request.spec, &request.view, request.format)?)
}

/// The classification report for `tests` against `log`. `None` when
/// `cancel` was raised before the batch finished.
pub fn classify_document(
    log: &ActivityLog,
    tests: &[LabeledTrace],
    config: ClassifierConfig,
    report: ReportFormat,
    cancel: &AtomicBool,
) -> Result<Option<String>, ApiError> {
    let classifier = Classifier::new(log, config)?;
    let Some(batch) = classifier.classify_batch_cancellable(tests, cancel) else {
        return Ok(None);
    };
    Ok(Some(match report {
        ReportFormat::Json => write_report_json(&batch.verdicts),
        ReportFormat::Tsv => write_report(&batch.verdicts),
    }))
}

type CacheKey = (String, FilterSpec);

pub struct AppState {
    store: Store,
    cache: Mutex<LruCache<CacheKey, Arc<LogSkeleton>>>,
    builds: AtomicUsize,
    config: ServiceConfig,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Result<Self, StoreError> {
        let store = match &config.data_dir {
            Some(dir) => Store::open(dir)?,
            None => Store::in_memory(),
        };
        Ok(AppState {
            store,
            cache: Mutex::new(LruCache::new(config.cache_capacity)),
            builds: AtomicUsize::new(0),
            config,
        })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Skeletons built for skeleton queries so far (cache misses).
    pub fn skeleton_builds(&self) -> usize {
        self.builds.load(Ordering::Relaxed)
    }

    fn skeleton(&self, stored: &StoredLog, spec: &FilterSpec) -> Result<Arc<LogSkeleton>, ApiError> {
        let key = (stored.handle.id.clone(), spec.clone());
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let skel = Arc::new(LogSkeleton::build(&stored.log.filter(spec)?));
        self.builds.fetch_add(1, Ordering::Relaxed);
        self.cache.lock().expect("cache lock").put(key, skel.clone());
        Ok(skel)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let config = state.config.clone();
    let mut app = Router::new()
        .route("/logs", post(upload).get(list_logs))
        .route("/logs/{id}", get(show_log))
        .route("/logs/{id}/skeleton", get(skeleton))
        .route("/logs/{id}/classify", post(classify))
        .layer(DefaultBodyLimit::max(config.max_upload_bytes))
        .with_state(state);
    app = match &config.ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") }),
    };
    if let Some(origin) = &config.cors_origin {
        match HeaderValue::from_str(origin) {
            Ok(origin) => {
                app = app.layer(
                    CorsLayer::new()
                        .allow_origin(origin)
                        .allow_methods([Method::GET, Method::POST])
                        .allow_headers([header::CONTENT_TYPE]),
                )
            }
            Err(_) => tracing::warn!(origin, "ignoring invalid CORS origin"),
        }
    }
    app
}

/// Serves `router` on `listener` until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, router: Router) -> std::io::Result<()> {
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Runs `job` on the blocking pool under the request timeout. The job gets
/// a flag that is raised when the deadline passes.
async fn blocking<T, F>(state: &AppState, job: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&AtomicBool) -> Result<T, ApiError> + Send + 'static,
{
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = cancel.clone();
    let task = tokio::task::spawn_blocking(move || job(&flag));
    let limit = state.config.request_timeout;
    match tokio::time::timeout(limit, task).await {
        Ok(Ok(result)) => result,
        Ok(Err(e)) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("worker failed: {e}"))),
        Err(_) => {
            cancel.store(true, Ordering::Relaxed);
            Err(timeout(limit))
        }
    }
}

fn timeout(limit: Duration) -> ApiError {
    ApiError::new(
        StatusCode::GATEWAY_TIMEOUT,
        format!("request exceeded the {} ms time limit", limit.as_millis()),
    )
}

fn rejected(status: StatusCode, text: String) -> ApiError {
    if status == StatusCode::PAYLOAD_TOO_LARGE {
        ApiError::new(status, text)
    } else {
        ApiError::bad_request(text)
    }
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<StoredLog>, ApiError> {
    state.store.get(id).ok_or_else(|| ApiError::not_found(id))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UploadQuery {
    format: Option<String>,
    name: Option<String>,
}

async fn upload(
    State(state): State<Arc<AppState>>,
    query: Result<Query<UploadQuery>, QueryRejection>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    let Query(query) = query.map_err(|e| rejected(e.status(), e.body_text()))?;
    let body = body.map_err(|e| rejected(e.status(), e.body_text()))?;
    let name = query.name.unwrap_or_else(|| "upload".to_string());
    let format = match &query.format {
        Some(f) => f.parse::<LogFormat>()?,
        None => LogFormat::from_path(std::path::Path::new(&name)),
    };
    let st = state.clone();
    let stored = blocking(&state, move |_| {
        st.store.insert(&name, format, &body).map_err(|e| match e {
            StoreError::Log(e) => ApiError::from(e),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, other.to_string()),
        })
    })
    .await?;
    tracing::info!(id = %stored.handle.id, name = %stored.handle.name, traces = stored.handle.trace_count, "log uploaded");
    Ok((StatusCode::CREATED, Json(stored.handle.clone())).into_response())
}

async fn list_logs(State(state): State<Arc<AppState>>) -> Json<Vec<LogHandle>> {
    Json(state.store.list())
}

async fn show_log(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<LogHandle>, ApiError> {
    Ok(Json(lookup(&state, &id)?.handle.clone()))
}

async fn skeleton(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<SkeletonQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let stored = lookup(&state, &id)?;
    let Query(query) = query.map_err(|e| rejected(e.status(), e.body_text()))?;
    let request = query.resolve()?;
    let content_type = match request.format {
        log_skeleton::render::DocumentFormat::Dot => "text/vnd.graphviz; charset=utf-8",
        _ => "application/json",
    };
    let st = state.clone();
    let text = blocking(&state, move |_| {
        let skel = st.skeleton(&stored, &request.spec)?;
        render_request(&skel, &stored.handle.name, &request)
    })
    .await?;
    Ok(([(header::CONTENT_TYPE, content_type)], text).into_response())
}

async fn classify(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<ClassifyRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let stored = lookup(&state, &id)?;
    let Json(body) = body.map_err(|e| rejected(e.status(), e.body_text()))?;
    let report = body.report;
    let limit = state.config.request_timeout;
    let text = blocking(&state, move |cancel| {
        let tests = body.traces.into_labeled(body.format)?;
        classify_document(&stored.log, &tests, body.config, report, cancel)?.ok_or_else(|| timeout(limit))
    })
    .await?;
    let content_type = match report {
        ReportFormat::Json => "application/json",
        ReportFormat::Tsv => "text/tab-separated-values; charset=utf-8",
    };
    Ok(([(header::CONTENT_TYPE, content_type)], text).into_response())
}
