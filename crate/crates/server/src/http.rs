use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, RawQuery, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use brickvrf::timeseries::parse_timestamp;
use serde::Deserialize;
use tower_http::services::ServeDir;

use crate::service::{ApiError, BaselineRequest, Service};

pub const SPARQL_JSON: &str = "application/sparql-results+json";

fn body(status: u16, content_type: &'static str, text: String) -> Response {
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, content_type)], text).into_response()
}

fn json(status: u16, text: String) -> Response {
    body(status, "application/json", text)
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json(self.status, self.to_json())
    }
}

fn utf8(bytes: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(bytes).map_err(|_| ApiError::new(400, "BadRequest", "body is not UTF-8"))
}

/// Runs CPU-bound service work off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ApiError::new(500, "Internal", e.to_string())))
}

#[derive(Deserialize)]
struct GraphParam {
    graph: Option<String>,
}

async fn upload_model(State(svc): State<Arc<Service>>, Query(q): Query<GraphParam>, bytes: Bytes) -> Response {
    let graph = q.graph.unwrap_or_default();
    let result = blocking(move || {
        let text = utf8(&bytes)?;
        svc.upload_model(&graph, text)
    })
    .await;
    match result {
        Ok(r) => json(200, serde_json::to_string(&r).expect("serializable")),
        Err(e) => e.into_response(),
    }
}

async fn get_model(State(svc): State<Arc<Service>>, Query(q): Query<GraphParam>) -> Response {
    match q.graph.as_deref().and_then(|g| svc.model(g)) {
        Some(m) => body(200, "text/turtle", brickvrf::rdf::serialize_turtle(&m.raw)),
        None => ApiError::new(
            404,
            "UnknownGraph",
            format!("unknown graph <{}>", q.graph.unwrap_or_default()),
        )
        .into_response(),
    }
}

async fn list_graphs(State(svc): State<Arc<Service>>) -> Response {
    json(200, serde_json::to_string(&svc.graphs()).expect("serializable"))
}

#[derive(Deserialize)]
struct QueryParams {
    graph: Option<String>,
    query: Option<String>,
}

fn default_graph(q: &QueryParams, headers: &HeaderMap) -> Option<String> {
    q.graph
        .clone()
        .or_else(|| headers.get("x-graph").and_then(|v| v.to_str().ok()).map(str::to_string))
}

async fn run_query(svc: Arc<Service>, text: String, graph: Option<String>) -> Response {
    match blocking(move || svc.query(&text, graph.as_deref())).await {
        Ok(r) => body(200, SPARQL_JSON, r),
        Err(e) => e.into_response(),
    }
}

async fn post_query(
    State(svc): State<Arc<Service>>,
    Query(q): Query<QueryParams>,
    headers: HeaderMap,
    bytes: Bytes,
) -> Response {
    let graph = default_graph(&q, &headers);
    match utf8(&bytes) {
        Ok(text) => run_query(svc, text.to_string(), graph).await,
        Err(e) => e.into_response(),
    }
}

async fn get_query(State(svc): State<Arc<Service>>, Query(q): Query<QueryParams>, headers: HeaderMap) -> Response {
    let graph = default_graph(&q, &headers);
    match q.query {
        Some(text) => run_query(svc, text, graph).await,
        None => ApiError::new(400, "BadRequest", "the query parameter is required").into_response(),
    }
}

async fn post_data(State(svc): State<Arc<Service>>, bytes: Bytes) -> Response {
    let result = blocking(move || {
        let text = utf8(&bytes)?;
        svc.ingest(text)
    })
    .await;
    match result {
        Ok(report) => {
            let status = if report.rejected > 0 { 207 } else { 200 };
            json(status, serde_json::to_string(&report).expect("serializable"))
        }
        Err(e) => e.into_response(),
    }
}

/// `id` may repeat or hold a comma-separated list; `start`/`end` default to
/// the whole stream.
fn series_params(raw: &str) -> Result<(Vec<String>, i64, i64), ApiError> {
    let mut ids = Vec::new();
    let (mut start, mut end) = (0, i64::MAX);
    for (k, v) in form_urlencoded::parse(raw.as_bytes()) {
        let time = |v: &str| parse_timestamp(v).map_err(|e| ApiError::new(400, "MalformedTimestamp", e.to_string()));
        match k.as_ref() {
            "id" => ids.extend(v.split(',').filter(|s| !s.is_empty()).map(str::to_string)),
            "start" => start = time(&v)?,
            "end" => end = time(&v)?,
            _ => {}
        }
    }
    if ids.is_empty() {
        return Err(ApiError::new(400, "BadRequest", "at least one id is required"));
    }
    Ok((ids, start, end))
}

async fn get_series(State(svc): State<Arc<Service>>, RawQuery(raw): RawQuery) -> Response {
    let result = series_params(raw.as_deref().unwrap_or("")).and_then(|(ids, t0, t1)| svc.series_json(&ids, t0, t1));
    match result {
        Ok(text) => json(200, text),
        Err(e) => e.into_response(),
    }
}

async fn post_baseline(State(svc): State<Arc<Service>>, bytes: Bytes) -> Response {
    let result = blocking(move || {
        let req: BaselineRequest = serde_json::from_slice(&bytes)
            .map_err(|e| ApiError::new(400, "BadRequest", format!("invalid request body: {e}")))?;
        svc.baseline(&req)
    })
    .await;
    match result {
        Ok(text) => json(200, text),
        Err(e) => e.into_response(),
    }
}

async fn healthz(State(svc): State<Arc<Service>>) -> Response {
    json(200, svc.health())
}

pub fn router(svc: Arc<Service>) -> Router {
    let ui_dir = svc.config().ui_dir.clone().unwrap_or_else(|| PathBuf::from("ui"));
    Router::new()
        .route("/model", post(upload_model).get(get_model))
        .route("/graphs", get(list_graphs))
        .route("/query", post(post_query).get(get_query))
        .route("/data", post(post_data))
        .route("/series", get(get_series))
        .route("/analysis/baseline", post(post_baseline))
        .route("/healthz", get(healthz))
        .nest_service("/ui", ServeDir::new(ui_dir).append_index_html_on_directories(true))
        .with_state(svc)
}

pub async fn serve(svc: Arc<Service>) -> std::io::Result<()> {
    let addr = SocketAddr::from(([0, 0, 0, 0], svc.config().port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(svc))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
