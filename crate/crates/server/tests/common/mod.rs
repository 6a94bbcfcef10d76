#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use brickvrf::rdf::serialize_turtle;
use brickvrf::vrf::{
    application_meter, application_outside_temperature, generate_application_model, APPLICATION_GRAPH,
};
use brickvrf_server::{Config, Service};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

pub const HOURS: i64 = 240;

pub fn service(data_dir: Option<&Path>) -> Arc<Service> {
    Arc::new(
        Service::open(Config {
            data_dir: data_dir.map(Path::to_path_buf),
            ..Config::default()
        })
        .unwrap(),
    )
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

pub async fn send(app: &Router, method: &str, uri: &str, body: impl Into<String>) -> Reply {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(Body::from(body.into()))
        .unwrap();
    reply(app, req).await
}

pub async fn reply(app: &Router, req: Request<Body>) -> Reply {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let content_type = res
        .headers()
        .get("content-type")
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_string();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        body: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

pub fn encode(s: &str) -> String {
    form_urlencoded::byte_serialize(s.as_bytes()).collect()
}

pub fn application_turtle() -> String {
    serialize_turtle(&generate_application_model())
}

pub fn upload_uri() -> String {
    format!("/model?graph={}", encode(APPLICATION_GRAPH))
}

pub fn hinge(t: f64, base: f64, bp: f64, slope: f64) -> f64 {
    base + slope * (t - bp).max(0.0)
}

/// Hourly outside temperature plus one energy meter per office, as CSV.
pub fn fixture_csv(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("id,time,value\n");
    let out = application_outside_temperature();
    for h in 0..HOURS {
        let t = h * 3600;
        let temp = 14.0 + 14.0 * ((h % 24) as f64 / 24.0 * std::f64::consts::PI).sin() + rng.random_range(-0.5..0.5);
        csv.push_str(&format!("{out},{t},{temp}\n"));
        csv.push_str(&format!(
            "{},{},{}\n",
            application_meter(1),
            t + 120,
            hinge(temp, 2.0, 18.0, 0.5)
        ));
        csv.push_str(&format!(
            "{},{},{}\n",
            application_meter(2),
            t + 120,
            hinge(temp, 3.0, 20.0, 0.9)
        ));
    }
    csv
}

pub fn baseline_body(method: &str) -> String {
    serde_json::json!({
        "graph": APPLICATION_GRAPH,
        "start": 0,
        "end": "1970-01-11T00:00:00Z",
        "interval": 3600,
        "method": method,
    })
    .to_string()
}
