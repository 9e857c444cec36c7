//! Axum router over a shared [`Store`].
//!
//! Reads take the store's read lock. Mutations first take a writer mutex,
//! so they run one at a time. Slow work (automatic annotation, training)
//! runs on a blocking thread while readers keep going, and only the commit
//! takes the write lock.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::{Mutex, RwLock};

use tarc_core::evaluation::EvaluationError;

use crate::api::{CorrectionsRequest, ErrorBody, NewBlockRequest, RetrainRequest};
use crate::store::{Store, StoreError};

#[derive(Clone)]
pub struct AppState {
    store: Arc<RwLock<Store>>,
    writer: Arc<Mutex<()>>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        Self { store: Arc::new(RwLock::new(store)), writer: Arc::new(Mutex::new(())) }
    }

    pub fn store(&self) -> Arc<RwLock<Store>> {
        Arc::clone(&self.store)
    }
}

pub struct ApiError(StoreError);

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError(e)
    }
}

impl ApiError {
    fn parts(&self) -> (StatusCode, &'static str) {
        use EvaluationError as E;
        match &self.0 {
            StoreError::UnknownBlock(_) => (StatusCode::NOT_FOUND, "unknown_block"),
            StoreError::NothingNew(_) => (StatusCode::CONFLICT, "nothing_new"),
            StoreError::Evaluation(E::WrongStatus { .. }) => (StatusCode::CONFLICT, "wrong_status"),
            StoreError::Evaluation(E::Exhausted) => (StatusCode::CONFLICT, "exhausted"),
            StoreError::Evaluation(E::UnknownKey(_)) => (StatusCode::UNPROCESSABLE_ENTITY, "unknown_key"),
            StoreError::Evaluation(E::EmptyCorrection(_)) => (StatusCode::UNPROCESSABLE_ENTITY, "empty_correction"),
            StoreError::Evaluation(E::BlockSize) => (StatusCode::UNPROCESSABLE_ENTITY, "block_size"),
            StoreError::Evaluation(E::FoldCount(_) | E::TooFewItems { .. }) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "cv_folds")
            }
            StoreError::Inconsistent(_) => (StatusCode::CONFLICT, "inconsistent"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = self.parts();
        if status.is_server_error() {
            log::error!("{}", self.0);
        }
        (status, Json(ErrorBody { code: code.to_string(), message: self.0.to_string() })).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn join_error(e: tokio::task::JoinError) -> ApiError {
    ApiError(StoreError::Inconsistent(format!("worker task failed: {e}")))
}

async fn list_blocks(State(state): State<AppState>) -> ApiResult<Vec<crate::api::BlockSummary>> {
    Ok(Json(state.store.read().await.list_blocks()))
}

async fn get_block(State(state): State<AppState>, Path(id): Path<u32>) -> ApiResult<crate::api::BlockPayload> {
    Ok(Json(state.store.read().await.payload(id)?))
}

async fn new_block(
    State(state): State<AppState>,
    body: Option<Json<NewBlockRequest>>,
) -> Result<(StatusCode, Json<crate::api::BlockSummary>), ApiError> {
    let size = body.map_or(crate::api::DEFAULT_BLOCK_SIZE, |Json(b)| b.size);
    let _writer = state.writer.lock().await;
    let summary = state.store.write().await.make_block(size)?;
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn auto_block(State(state): State<AppState>, Path(id): Path<u32>) -> ApiResult<crate::api::BlockSummary> {
    let _writer = state.writer.lock().await;
    let (block, model) = state.store.read().await.prepare_auto(id)?;
    let annotated = tokio::task::spawn_blocking(move || block.auto_annotate(model.as_ref()))
        .await
        .map_err(join_error)?
        .map_err(StoreError::from)?;
    Ok(Json(state.store.write().await.commit_auto(annotated)?))
}

async fn post_corrections(
    State(state): State<AppState>,
    Path(id): Path<u32>,
    Json(body): Json<CorrectionsRequest>,
) -> ApiResult<crate::api::BlockSummary> {
    let _writer = state.writer.lock().await;
    Ok(Json(state.store.write().await.post_corrections(id, &body.corrections)?))
}

async fn retrain(
    State(state): State<AppState>,
    body: Option<Json<RetrainRequest>>,
) -> ApiResult<crate::api::ModelSummary> {
    let request = body.map(|Json(b)| b).unwrap_or_default();
    let _writer = state.writer.lock().await;
    let job = state.store.read().await.prepare_retrain(request.cv.map(|c| (c.k, c.seed)))?;
    let trained = tokio::task::spawn_blocking(move || job.run()).await.map_err(join_error)??;
    Ok(Json(state.store.write().await.commit_retrain(trained)?))
}

async fn metrics(State(state): State<AppState>) -> ApiResult<crate::api::Metrics> {
    Ok(Json(state.store.read().await.metrics()))
}

async fn corpus(State(state): State<AppState>) -> Result<Response, ApiError> {
    let tsv = state.store.read().await.export_tsv()?;
    Ok(([(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")], tsv).into_response())
}

/// Routes:
///
/// | method | path                        | body                   | response         |
/// |--------|-----------------------------|------------------------|------------------|
/// | GET    | `/blocks`                   |                        | `[BlockSummary]` |
/// | POST   | `/blocks`                   | `NewBlockRequest`?     | `BlockSummary`   |
/// | GET    | `/blocks/{id}`              |                        | `BlockPayload`   |
/// | POST   | `/blocks/{id}/auto`         |                        | `BlockSummary`   |
/// | POST   | `/blocks/{id}/corrections`  | `CorrectionsRequest`   | `BlockSummary`   |
/// | POST   | `/retrain`                  | `RetrainRequest`?      | `ModelSummary`   |
/// | GET    | `/metrics`                  |                        | `Metrics`        |
/// | GET    | `/corpus`                   |                        | TSV              |
///
/// Errors come back as `ErrorBody` with 404, 409 or 422.
pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/blocks", get(list_blocks).post(new_block))
        .route("/blocks/{id}", get(get_block))
        .route("/blocks/{id}/auto", post(auto_block))
        .route("/blocks/{id}/corrections", post(post_corrections))
        .route("/retrain", post(retrain))
        .route("/metrics", get(metrics))
        .route("/corpus", get(corpus))
        .with_state(state)
}
