use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use bistable::complexes::DegreeRips;
use bistable::io::{self, AnyBifiltration, MultColumn};
use bistable::metric::Metric;
use bistable_cli::server::{router, Bundle};
use bistable_cli::{module_grid, Global, MultArg};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

/// Eight points on a circle of radius 1 plus one near the center.
const CLOUD: &str = "1,0\n0.7071,0.7071\n0,1\n-0.7071,0.7071\n-1,0\n-0.7071,-0.7071\n0,-1\n0.7071,-0.7071\n0.1,0\n";

fn global() -> Global {
    Global { seed: 0, grid: Some((9, 12)), maxdim: 2, metric: Metric::L2, out: None, mult: MultArg::Auto }
}

fn bundle() -> Arc<Bundle> {
    let cloud = io::read_points_csv(CLOUD.as_bytes(), Metric::L2, MultColumn::Auto).unwrap();
    let bif = AnyBifiltration::Flag(DegreeRips::from_cloud(&cloud).unwrap());
    let grid = module_grid(&global(), &bif, None, (9, 12)).unwrap();
    Arc::new(Bundle::new(bif, 1, grid).unwrap())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    let response = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = response.status();
    (status, response.into_body().collect().await.unwrap().to_bytes().to_vec())
}

#[tokio::test]
async fn module_is_byte_identical() {
    let app = router(Some(bundle()), None);
    let (s1, a) = get(&app, "/module").await;
    let (s2, b) = get(&app, "/module").await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema"], "bistable/1");
    assert_eq!(v["hilbert"]["dims"].as_array().unwrap().len(), 9);
    assert_eq!(v["betti"]["degree"], 1);
}

#[tokio::test]
async fn bad_lines_are_400_with_json() {
    let app = router(Some(bundle()), None);
    for uri in [
        "/barcode",
        "/barcode?angle=abc&offset=1",
        "/barcode?angle=30",
        "/barcode?x1=0.5&y1=0&x2=0.9&y2=1",
        "/barcode?angle=120&offset=0.1",
        "/barcode?x1=1&y1=1&x2=1&y2=1",
        "/barcode?x1=1&y1=0&x2=1&y2=1&angle=10&offset=0",
    ] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}");
        let v: Value = serde_json::from_slice(&body).unwrap();
        assert!(v["error"].is_string() && v["message"].is_string(), "{uri}");
    }
}

#[tokio::test]
async fn missing_bundle_is_404() {
    let app = router(None, None);
    assert_eq!(get(&app, "/module").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/barcode?angle=30&offset=0.1").await.0, StatusCode::NOT_FOUND);
    let (status, body) = get(&app, "/").await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("/module"));
}

#[tokio::test]
async fn static_assets_and_cors() {
    let dir = std::env::temp_dir().join(format!("bistable-assets-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("index.html"), "<p>ui</p>").unwrap();
    let app = router(Some(bundle()), Some(dir));
    let (status, body) = get(&app, "/index.html").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<p>ui</p>");
    assert_eq!(get(&app, "/").await.1, b"<p>ui</p>");

    let request = Request::get("/module").header(header::ORIGIN, "http://localhost:5173").body(Body::empty()).unwrap();
    let response = app.oneshot(request).await.unwrap();
    assert_eq!(response.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN], "*");
}

#[tokio::test]
async fn concurrent_requests_agree() {
    let app = router(Some(bundle()), None);
    let uri = "/barcode?angle=40&offset=0.05";
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move { get(&app, uri).await })
        })
        .collect();
    let mut bodies = Vec::new();
    for h in handles {
        let (status, body) = h.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        bodies.push(body);
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

/// The horizontal line through the lowest density row against the
/// command-line barcode, which goes through the same code path only from
/// a file.
#[tokio::test]
async fn horizontal_barcode_matches_cli() {
    let b = bundle();
    let k_min = *b.grid.k().last().unwrap();
    let app = router(Some(b), None);
    let (status, body) = get(&app, &format!("/barcode?x1={k_min}&y1=0&x2={k_min}&y2=1")).await;
    assert_eq!(status, StatusCode::OK);
    let served: Value = serde_json::from_slice(&body).unwrap();

    let csv: PathBuf = std::env::temp_dir().join(format!("bistable-circle-{}.csv", std::process::id()));
    std::fs::write(&csv, CLOUD).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bistable"))
        .args(["barcode", csv.to_str().unwrap(), "--degree", "1", "--through", &format!("{k_min},0,{k_min},1")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let cli: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(served, cli);
    // the circle's hole is visible at the lowest density
    assert_eq!(served["bars"].as_array().unwrap().len(), 1);
}
