use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use mutwb::service::{router, Store};
use serde_json::Value;
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

async fn create(app: &Router, body: &str) -> String {
    let (status, text) = call(app, "POST", "/api/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{text}");
    json(&text)["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn vianna_session() {
    let app = router(Arc::new(Store::new()));
    let id = create(&app, r#"{"example":"vianna-p2"}"#).await;
    let (_, text) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    let state = &json(&text)["state"];
    assert_eq!(state["quiver"]["arrows"], json("[[0,3,0],[0,0,3],[3,0,0]]"));

    let (status, text) = call(&app, "POST", &format!("/api/sessions/{id}/mutations"), Some(r#"{"index":3}"#)).await;
    assert_eq!(status, StatusCode::OK);
    let state = &json(&text)["state"];
    assert_eq!(state["config"]["classes"], json("[[1,-1],[-5,-1],[2,1]]"));
    assert_eq!(state["quiver"]["arrows"], json("[[0,0,3],[6,0,0],[0,3,0]]"));
    assert_eq!(state["history"], json("[3]"));
}

#[tokio::test]
async fn error_codes() {
    let app = router(Arc::new(Store::new()));
    let (status, _) = call(&app, "GET", "/api/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/api/sessions/nope/mutations", Some(r#"{"index":1}"#)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    for bad in [r#"{"example":"nope"}"#, "not json", r#"{"examp":"a2"}"#, "{}"] {
        let (status, _) = call(&app, "POST", "/api/sessions", Some(bad)).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{bad}");
    }

    let id = create(&app, r#"{"config":{"ledger":{"P":[[0,1],[1,0]],"s":[0,0]}}}"#).await;
    let url = format!("/api/sessions/{id}/mutations");
    for bad in [r#"{"index":0}"#, r#"{"index":3}"#, r#"{"k":1}"#, "[]"] {
        let (status, _) = call(&app, "POST", &url, Some(bad)).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{bad}");
    }
    let (status, _) = call(&app, "POST", &url, Some(r#"{"index":2}"#)).await;
    assert_eq!(status, StatusCode::OK);
    let (status, text) = call(&app, "POST", &url, Some(r#"{"index":1}"#)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let body = json(&text);
    assert_eq!(body["reason"], "not-simple");
    assert_eq!(body["step"], 2);

    let (status, text) = call(&app, "POST", &format!("/api/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&text)["state"]["history"], json("[]"));
    let (status, text) = call(&app, "POST", &format!("/api/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(json(&text)["reason"], "nothing-to-undo");
}

#[tokio::test]
async fn character_blocks_irregular_mutations() {
    let app = router(Arc::new(Store::new()));
    // x(v_3) = x_a^-2 x_b^-1 = 1
    let id = create(&app, r#"{"example":"vianna-p2","character":{"a":"1","b":"1"}}"#).await;
    let (status, text) = call(&app, "POST", &format!("/api/sessions/{id}/mutations"), Some(r#"{"index":3}"#)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(json(&text)["reason"], "not-regular");
    let id = create(&app, r#"{"example":"vianna-p2","character":{"a":"2","b":"1/3"}}"#).await;
    let (status, text) = call(&app, "POST", &format!("/api/sessions/{id}/mutations"), Some(r#"{"index":3}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert!(json(&text)["state"]["character"]["a"].is_string());
}

#[tokio::test]
async fn exchange_and_examples() {
    let app = router(Arc::new(Store::new()));
    let (status, text) = call(&app, "GET", "/api/examples", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(json(&text).as_array().unwrap().iter().any(|e| e["key"] == "vianna-p2"));

    let id = create(&app, r#"{"example":"a2"}"#).await;
    let (status, text) = call(&app, "GET", &format!("/api/sessions/{id}/exchange?depth=10"), None).await;
    assert_eq!(status, StatusCode::OK);
    let g = json(&text);
    assert_eq!(g["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(g["complete"], true);
    let (status, _) = call(&app, "GET", &format!("/api/sessions/{id}/exchange?depth=x"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, "GET", &format!("/api/sessions/{id}/exchange?identity=hash"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let id = create(&app, r#"{"example":"vianna-p2","expressions":false}"#).await;
    let (status, text) =
        call(&app, "GET", &format!("/api/sessions/{id}/exchange?depth=4&identity=fingerprint"), None).await;
    assert_eq!(status, StatusCode::OK);
    let g = json(&text);
    let mut counts = [0usize; 5];
    for v in g["vertices"].as_array().unwrap() {
        counts[v["depth"].as_u64().unwrap() as usize] += 1;
    }
    assert_eq!(counts[..2], [1, 3]);
    assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
}

#[tokio::test]
async fn per_session_mutations_are_serialized() {
    let app = router(Arc::new(Store::new()));
    let id = create(&app, r#"{"example":"a3"}"#).await;
    let url = format!("/api/sessions/{id}/mutations");
    let tasks: Vec<_> = (0..12)
        .map(|i| {
            let app = app.clone();
            let url = url.clone();
            tokio::spawn(async move { call(&app, "POST", &url, Some(&format!("{{\"index\":{}}}", i % 3 + 1))).await })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap().0, StatusCode::OK);
    }
    let (_, text) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    assert_eq!(json(&text)["state"]["history"].as_array().unwrap().len(), 12);
    for _ in 0..12 {
        assert_eq!(call(&app, "POST", &format!("/api/sessions/{id}/undo"), None).await.0, StatusCode::OK);
    }
    let fresh = create(&app, r#"{"example":"a3"}"#).await;
    let (_, a) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    let (_, b) = call(&app, "GET", &format!("/api/sessions/{fresh}"), None).await;
    assert_eq!(json(&a)["state"], json(&b)["state"]);
}

#[tokio::test]
async fn journal_replays() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("journal.jsonl");
    let (id, before) = {
        let app = router(Arc::new(Store::with_journal(&path).unwrap()));
        let id = create(&app, r#"{"example":"vianna-p2"}"#).await;
        let url = format!("/api/sessions/{id}/mutations");
        call(&app, "POST", &url, Some(r#"{"index":3}"#)).await;
        call(&app, "POST", &url, Some(r#"{"index":1}"#)).await;
        call(&app, "POST", &format!("/api/sessions/{id}/undo"), None).await;
        let (_, text) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
        (id, text)
    };
    let app = router(Arc::new(Store::with_journal(&path).unwrap()));
    let (status, after) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
}
