//! HTTP/JSON analysis service over the `fdakit` library.
//!
//! Routes:
//!
//! ```text
//! POST /datasets                     JSON or CSV body      -> {id, created_at, summary}
//! GET  /datasets                                           -> [{id, created_at, summary}]
//! GET  /datasets/{id}?max_points=k                         -> dataset JSON
//! POST /analyses/{id}/depth          {method}              -> {method, values}
//! POST /analyses/{id}/boxplot        {factor, prob, depth} -> boxplot statistics
//! POST /analyses/{id}/msplot                               -> MS-plot statistics
//! POST /analyses/{id}/outliergram                          -> outliergram statistics
//! POST /analyses/{id}/smooth         {method, param, ...}  -> {id, summary, ...}
//! POST /analyses/{id}/register       {method, ...}         -> {id, summary, ...}
//! POST /analyses/{id}/fpca           {components, lambda}  -> {id, summary, ...}
//! ```
//!
//! Errors are `{"error": <name>, "message": <text>}` with status 400 for
//! malformed requests, 404 for unknown ids and 422 for numerical failures.

mod analyses;
pub mod store;

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fdakit::io::{parse_csv, parse_json, to_json_value, Dataset};
use fdakit::{ErrorClass, FdaError, Grid, GridSample};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

pub use store::{Handle, Store, Summary};

#[derive(Debug, Default)]
pub struct AppState {
    pub store: Store,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        Self { store }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub name: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, name: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            name: name.to_string(),
            message: message.into(),
        }
    }

    fn schema(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "SchemaError", message)
    }

    fn unknown_dataset(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", format!("no dataset with id {id:?}"))
    }
}

impl From<FdaError> for ApiError {
    fn from(e: FdaError) -> Self {
        let status = match e.class() {
            ErrorClass::Data | ErrorClass::Usage => StatusCode::BAD_REQUEST,
            ErrorClass::Numerical => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.name(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.name, "message": self.message }))).into_response()
    }
}

type Reply = Result<Json<Value>, ApiError>;

/// Parses a JSON request body; an empty body reads as `{}`.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let text = std::str::from_utf8(body).map_err(|_| ApiError::schema("request body is not UTF-8"))?;
    let text = if text.trim().is_empty() { "{}" } else { text };
    serde_json::from_str(text).map_err(|e| ApiError::schema(e.to_string()))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/datasets", post(upload).get(list))
        .route("/datasets/{id}", get(fetch))
        .route("/analyses/{id}/depth", post(analyses::depth))
        .route("/analyses/{id}/boxplot", post(analyses::boxplot))
        .route("/analyses/{id}/msplot", post(analyses::msplot))
        .route("/analyses/{id}/outliergram", post(analyses::outliergram))
        .route("/analyses/{id}/smooth", post(analyses::smooth))
        .route("/analyses/{id}/register", post(analyses::register))
        .route("/analyses/{id}/fpca", post(analyses::fpca))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "NotFound", "no such route") })
        .layer(CorsLayer::permissive())
        .with_state(state)
}

async fn upload(State(state): State<Arc<AppState>>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::schema("request body is not UTF-8"))?;
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_ascii_lowercase();
    let is_json = if content_type.contains("csv") {
        false
    } else {
        content_type.contains("json") || text.trim_start().starts_with('{')
    };
    let dataset = if is_json { parse_json(text)? } else { Dataset::Grid(parse_csv(text)?) };
    let handle = tokio::task::spawn_blocking(move || state.store.insert(dataset))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "InternalError", e.to_string()))??;
    Ok((StatusCode::CREATED, Json(handle)).into_response())
}

async fn list(State(state): State<Arc<AppState>>) -> Json<Vec<Handle>> {
    Json(state.store.list())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FetchQuery {
    max_points: Option<usize>,
}

/// Keeps `k` grid points, evenly spread by index and always including both
/// ends.
fn subsample(sample: &GridSample, k: usize) -> fdakit::Result<GridSample> {
    let m = sample.n_points();
    if k >= m {
        return Ok(sample.clone());
    }
    let mut idx: Vec<usize> = (0..k).map(|i| ((i * (m - 1)) as f64 / (k - 1) as f64).round() as usize).collect();
    idx.dedup();
    let points: Vec<f64> = idx.iter().map(|&j| sample.points()[j]).collect();
    let values = sample.values().select_columns(&idx);
    GridSample::from_matrix(Grid::with_domain(points, sample.domain_range())?, values)?
        .with_names(sample.names().clone())
}

async fn fetch(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<FetchQuery>, QueryRejection>,
) -> Reply {
    let Query(query) = query.map_err(|e| ApiError::schema(e.body_text()))?;
    let entry = state.store.get(&id).ok_or_else(|| ApiError::unknown_dataset(&id))?;
    let Some(k) = query.max_points else {
        return Ok(Json(to_json_value(&entry.dataset)));
    };
    if k < 2 {
        return Err(ApiError::schema("max_points must be at least 2"));
    }
    let reduced = match &*entry.dataset {
        Dataset::Grid(sample) => subsample(sample, k)?,
        Dataset::Basis(sample) => {
            let (a, b) = sample.domain_range();
            let points: Vec<f64> = (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect();
            sample.to_grid(&points)?
        }
    };
    Ok(Json(to_json_value(&Dataset::Grid(reduced))))
}
