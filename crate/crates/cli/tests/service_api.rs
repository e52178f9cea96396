use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use toponym::pipeline::Resources;
use toponym::store::{Store, StoreConfig};
use toponym_cli::service::router;

async fn call(app: &Router, method: &str, uri: &str, body: &str) -> (StatusCode, Option<String>, Value) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_owned())).unwrap();
    let resp = tower::ServiceExt::oneshot(app.clone(), req).await.unwrap();
    let status = resp.status();
    let ctype = resp.headers().get(header::CONTENT_TYPE).map(|v| v.to_str().unwrap().to_owned());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, ctype, serde_json::from_slice(&bytes).unwrap())
}

fn app() -> Router {
    let store = Store::in_memory(Arc::new(Resources::bundled()), StoreConfig::default()).unwrap();
    router(Arc::new(store))
}

const BATCH: &str = r#"[
 {"id":"1","text":"Dengue cases rising in Tamil Nadu","created_at":"2017-09-04T10:00:00Z"},
 {"id":"2","text":"floods near Guwahati, roads closed","created_at":"2017-09-05T08:30:00Z"},
 {"id":"3","text":"stay safe everyone, heavy rain today","created_at":"2017-09-05T09:00:00Z"},
 {"id":"4","text":"no place here at all","created_at":"2017-09-06T09:00:00Z"},
 {"id":"","text":"bad","created_at":"2017-09-06T09:00:00Z"}
]"#;

#[tokio::test]
async fn ingest_then_query() {
    let app = app();
    let (status, _, report) = call(&app, "POST", "/ingest", BATCH).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["accepted"], 4);
    assert_eq!(report["errors"], 1);

    let (status, ctype, fc) = call(&app, "GET", "/tweets", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("application/geo+json"));
    assert_eq!(fc["type"], "FeatureCollection");
    let feature = &fc["features"][0];
    let coords = feature["geometry"]["coordinates"].as_array().unwrap();
    assert!(coords[0].as_f64().unwrap() > coords[1].as_f64().unwrap(), "expected [lon, lat]");

    let (_, _, fc) = call(&app, "GET", "/tweets?q=DENGUE&unknown=1", "").await;
    let ids: Vec<&str> = fc["features"].as_array().unwrap().iter().map(|f| f["properties"]["tweet_id"].as_str().unwrap()).collect();
    assert!(ids.iter().all(|id| *id == "1") && !ids.is_empty());

    let (_, _, page) = call(&app, "GET", "/untagged?page=1&page_size=1", "").await;
    assert_eq!(page["total"], 2);
    assert_eq!(page["items"].as_array().unwrap().len(), 1);

    let (_, _, hist) = call(&app, "GET", "/histogram?from=2017-09-03&to=2017-09-06", "").await;
    let days: Vec<(String, u64)> = hist
        .as_array()
        .unwrap()
        .iter()
        .map(|d| (d["day"].as_str().unwrap().to_owned(), d["count"].as_u64().unwrap()))
        .collect();
    assert_eq!(days.len(), 4);
    assert_eq!(days[0], ("2017-09-03".into(), 0));

    let (_, _, health) = call(&app, "GET", "/health", "").await;
    assert_eq!(health["record_count"], 4);
    assert_eq!(health["generation"], 1);
}

#[tokio::test]
async fn bad_parameters_are_rejected() {
    let app = app();
    for uri in ["/tweets?from=yesterday", "/histogram?from=2017-09-10&to=2017-09-01", "/untagged?page=x"] {
        let (status, _, body) = call(&app, "GET", uri, "").await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}");
        assert!(body["error"].is_string());
    }
}

#[tokio::test]
async fn empty_batch_keeps_generation() {
    let app = app();
    let (_, _, report) = call(&app, "POST", "/ingest", "").await;
    assert_eq!(report["accepted"], 0);
    let (_, _, health) = call(&app, "GET", "/health", "").await;
    assert_eq!(health["generation"], 0);
}
