//! HTTP query and ingestion API over a [`Store`].

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::NaiveDate;
use serde_json::{json, Value};
use toponym::store::{parse_batch, Filter, Store};

pub const DEFAULT_PAGE_SIZE: usize = 50;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/ingest", post(ingest))
        .route("/tweets", get(tweets))
        .route("/untagged", get(untagged))
        .route("/histogram", get(histogram))
        .route("/health", get(health))
        .with_state(store)
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn bad_request(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

fn date_param(params: &HashMap<String, String>, key: &str) -> Result<Option<NaiveDate>, ApiError> {
    match params.get(key).map(|s| s.trim()).filter(|s| !s.is_empty()) {
        None => Ok(None),
        Some(s) => NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map(Some)
            .map_err(|_| bad_request(format!("`{key}` must be YYYY-MM-DD, got `{s}`"))),
    }
}

/// Filter from `q`, `from` and `to`; other parameters are ignored.
fn filter(params: &HashMap<String, String>) -> Result<Filter, ApiError> {
    let from = date_param(params, "from")?;
    let to = date_param(params, "to")?;
    Filter::new(params.get("q").map(String::as_str), from, to).map_err(|e| bad_request(e.to_string()))
}

fn geojson(body: Value) -> Response {
    (
        [(header::CONTENT_TYPE, "application/geo+json")],
        body.to_string(),
    )
        .into_response()
}

async fn ingest(State(store): State<Arc<Store>>, body: String) -> Result<Response, ApiError> {
    let report = tokio::task::spawn_blocking(move || store.ingest(parse_batch(&body)))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(Json(report).into_response())
}

async fn tweets(
    State(store): State<Arc<Store>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let f = filter(&params)?;
    Ok(geojson(store.snapshot().features(&f)))
}

async fn untagged(
    State(store): State<Arc<Store>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let f = filter(&params)?;
    let number = |key: &str, default: usize| -> Result<usize, ApiError> {
        match params.get(key).filter(|s| !s.is_empty()) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| bad_request(format!("`{key}` must be a positive integer"))),
        }
    };
    let page = number("page", 1)?;
    let page_size = number("page_size", DEFAULT_PAGE_SIZE)?;
    Ok(Json(store.snapshot().untagged(&f, page, page_size)).into_response())
}

async fn histogram(
    State(store): State<Arc<Store>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let f = filter(&params)?;
    let days: Vec<Value> = store
        .snapshot()
        .histogram(&f)
        .into_iter()
        .map(|(day, count)| json!({ "day": day.format("%Y-%m-%d").to_string(), "count": count }))
        .collect();
    Ok(Json(days).into_response())
}

async fn health(State(store): State<Arc<Store>>) -> Response {
    let snap = store.snapshot();
    Json(json!({
        "status": "ok",
        "generation": snap.generation,
        "record_count": snap.len(),
    }))
    .into_response()
}
