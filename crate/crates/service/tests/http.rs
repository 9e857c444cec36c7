use std::collections::BTreeSet;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use tarc_core::corpus::{parse_tsv, TokenRecord, MISSING};
use tarc_core::normalization::ExceptionLexicon;
use tarc_core::transliteration::pairs_from_records;
use tarc_core::TransducerConfig;
use tarc_service::api::{BlockPayload, BlockSummary, ErrorBody, Metrics, ModelSummary};
use tarc_service::{replay, router, AppState, Store};

const SAMPLE: &[u8] = include_bytes!("fixtures/sample.tsv");

fn sample() -> Vec<TokenRecord> {
    parse_tsv(SAMPLE).unwrap()
}

fn app(sentences: u32) -> (tempfile::TempDir, AppState, Router) {
    let dir = tempfile::tempdir().unwrap();
    let records: Vec<TokenRecord> = (1..=sentences)
        .flat_map(|par| sample().into_iter().map(move |r| TokenRecord { par, tra: MISSING.into(), ..r }))
        .collect();
    let seed = pairs_from_records(&sample(), &ExceptionLexicon::seed());
    let store = Store::create(dir.path().join("store"), records, seed, TransducerConfig::default()).unwrap();
    let state = AppState::new(store);
    let app = router(state.clone());
    (dir, state, app)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let builder = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(v) => builder.header("content-type", "application/json").body(Body::from(v.to_string())).unwrap(),
        None => builder.body(Body::empty()).unwrap(),
    };
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    (status, response.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn call_json<T: serde::de::DeserializeOwned>(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, T) {
    let (status, bytes) = call(app, method, uri, body).await;
    let parsed = serde_json::from_slice(&bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&bytes)));
    (status, parsed)
}

async fn error_code(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let (status, body): (StatusCode, ErrorBody) = call_json(app, method, uri, body).await;
    (status, body.code)
}

async fn auto_block(app: &Router, size: usize) -> u32 {
    let (status, made): (_, BlockSummary) = call_json(app, "POST", "/blocks", Some(json!({ "size": size }))).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, _): (_, BlockSummary) = call_json(app, "POST", &format!("/blocks/{}/auto", made.id), None).await;
    assert_eq!(status, StatusCode::OK);
    made.id
}

#[tokio::test]
async fn fresh_store() {
    let (_dir, _state, app) = app(2);
    let (status, blocks): (_, Vec<BlockSummary>) = call_json(&app, "GET", "/blocks", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(blocks.is_empty());
    let (_, metrics): (_, Metrics) = call_json(&app, "GET", "/metrics", None).await;
    assert!(metrics.blocks.is_empty());
    assert_eq!(metrics.training.len(), 1);
}

#[tokio::test]
async fn sample_block_payload() {
    let (_dir, _state, app) = app(1);
    let id = auto_block(&app, 5_000).await;
    let (_, blocks): (_, Vec<BlockSummary>) = call_json(&app, "GET", "/blocks", None).await;
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0].status, tarc_core::BlockStatus::Auto);

    let (status, bytes) = call(&app, "GET", &format!("/blocks/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let payload: BlockPayload = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(payload.rows.len(), 10);
    let tra: Vec<String> = payload.rows.iter().map(|r| r.tra.clone()).collect();
    let gold: Vec<String> = sample().into_iter().map(|r| r.tra).collect();
    assert_eq!(tra, gold);
    // decode(encode(x)) = x at the byte level too
    assert_eq!(serde_json::to_vec(&payload).unwrap(), bytes);
}

#[tokio::test]
async fn not_found_and_conflicts() {
    let (_dir, _state, app) = app(1);
    assert_eq!(error_code(&app, "GET", "/blocks/9", None).await, (StatusCode::NOT_FOUND, "unknown_block".into()));
    assert_eq!(
        error_code(&app, "POST", "/blocks/9/corrections", Some(json!({ "corrections": {} }))).await,
        (StatusCode::NOT_FOUND, "unknown_block".into())
    );
    assert_eq!(error_code(&app, "POST", "/retrain", None).await, (StatusCode::CONFLICT, "nothing_new".into()));

    let (_, made): (_, BlockSummary) = call_json(&app, "POST", "/blocks", None).await;
    assert_eq!(made.size, 10);
    let uri = format!("/blocks/{}/corrections", made.id);
    assert_eq!(
        error_code(&app, "POST", &uri, Some(json!({ "corrections": {} }))).await,
        (StatusCode::CONFLICT, "wrong_status".into())
    );
    assert_eq!(error_code(&app, "POST", "/blocks", None).await, (StatusCode::CONFLICT, "exhausted".into()));

    call(&app, "POST", &format!("/blocks/{}/auto", made.id), None).await;
    assert_eq!(
        error_code(&app, "POST", &uri, Some(json!({ "corrections": { "3fE/150902/5/1": ["x"] } }))).await,
        (StatusCode::UNPROCESSABLE_ENTITY, "unknown_key".into())
    );
    assert_eq!(
        error_code(&app, "POST", &format!("/blocks/{}/auto", made.id), None).await,
        (StatusCode::CONFLICT, "wrong_status".into())
    );
}

#[tokio::test]
async fn correction_round() {
    let (_dir, state, app) = app(4);
    let id = auto_block(&app, 20).await;
    let uri = format!("/blocks/{id}/corrections");

    let (status, summary): (_, BlockSummary) =
        call_json(&app, "POST", &uri, Some(json!({ "corrections": { "3fE/150902/2/7": ["غربه"] } }))).await;
    assert_eq!(status, StatusCode::OK);
    let accuracy = summary.accuracy.unwrap();
    assert_eq!((accuracy.correct, accuracy.total), (11, 12));

    let (_, payload): (_, BlockPayload) = call_json(&app, "GET", &format!("/blocks/{id}"), None).await;
    let changed: Vec<&str> = payload.rows.iter().filter(|r| r.changed).map(|r| r.key.as_str()).collect();
    assert_eq!(changed, vec!["3fE/150902/2/7"]);

    let (_, metrics): (_, Metrics) = call_json(&app, "GET", "/metrics", None).await;
    assert_eq!(metrics.blocks.len(), 1);
    assert_eq!(metrics.blocks[0].accuracy, accuracy);

    let (status, model): (_, ModelSummary) = call_json(&app, "POST", "/retrain", Some(json!({ "cv": { "k": 2 } }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(model.version, 2);
    assert_eq!(model.pairs, model.previous_pairs.unwrap() + 12);
    assert_eq!(error_code(&app, "POST", "/retrain", None).await, (StatusCode::CONFLICT, "nothing_new".into()));

    let (_, metrics): (_, Metrics) = call_json(&app, "GET", "/metrics", None).await;
    assert_eq!(metrics.training.last().unwrap().pairs, model.pairs);
    assert_eq!(metrics.cv.unwrap().seed, 42);

    let (status, tsv) = call(&app, "GET", "/corpus", None).await;
    assert_eq!(status, StatusCode::OK);
    let store = state.store();
    let store = store.read().await;
    assert_eq!(parse_tsv(&tsv).unwrap(), store.records());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_corrections_are_serialized() {
    let (_dir, state, app) = app(2);
    let id = auto_block(&app, 10).await;
    let uri = format!("/blocks/{id}/corrections");
    let candidates: Vec<String> = (0..16).map(|i| format!("كيف{}", "ا".repeat(i + 1))).collect();

    let tasks: Vec<_> = candidates
        .iter()
        .map(|c| {
            let app = app.clone();
            let uri = uri.clone();
            let body = json!({ "corrections": { "3fE/150902/1/1": [c] } });
            tokio::spawn(async move { call(&app, "POST", &uri, Some(body)).await.0 })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }

    let store = state.store();
    let store = store.read().await;
    let audit = store.audit().unwrap();
    let writes: Vec<_> = audit.iter().filter(|e| e.key == "3fE/150902/1/1" && e.kind == tarc_service::store::AuditKind::Correction).collect();
    assert_eq!(writes.len(), 16);
    // each write starts from the previous one: a single serial history
    for pair in writes.windows(2) {
        assert_eq!(pair[0].after, pair[1].before);
    }
    let seen: BTreeSet<&str> = writes.iter().map(|e| e.after.as_str()).collect();
    assert_eq!(seen.len(), 16);
    assert_eq!(store.records()[0].tra, writes.last().unwrap().after);
    assert_eq!(replay(store.initial_records(), &audit).unwrap(), store.records());
    let seqs: Vec<u64> = audit.iter().map(|e| e.seq).collect();
    assert_eq!(seqs, (1..=audit.len() as u64).collect::<Vec<_>>());
}
