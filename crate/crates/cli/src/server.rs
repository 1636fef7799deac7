//! HTTP service over one immutable module bundle.
//!
//! `GET /module` returns the precomputed Hilbert function and Betti table,
//! `GET /barcode` a fibered barcode along `x1,y1,x2,y2` (two points in
//! `(k, r)` coordinates) or `angle,offset`. Everything else is static assets.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use bistable::complexes::{Bigrade, GridSpec};
use bistable::error::{Error, Result};
use bistable::homology::Line;
use bistable::io::{self, AnyBifiltration};
use serde_json::json;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::{load_module, module_grid, Global};

/// Betti tables are computed on a sub-grid with at most this many lines.
const BETTI_LINES: usize = 20;

pub struct Bundle {
    pub bif: AnyBifiltration,
    pub degree: usize,
    pub grid: GridSpec,
    /// Serialized once so every `/module` response is the same bytes.
    pub module: String,
}

impl Bundle {
    pub fn new(bif: AnyBifiltration, degree: usize, grid: GridSpec) -> Result<Self> {
        let hilbert = bif.as_dyn().hilbert(degree, &grid)?;
        let step = grid.k().len().max(grid.r().len()).div_ceil(BETTI_LINES).max(1);
        let coarse = if step > 1 { grid.subgrid(step)? } else { grid.clone() };
        let betti = bif.as_dyn().betti(degree, &coarse)?;
        let module = json!({
            "schema": io::SCHEMA,
            "degree": degree,
            "hilbert": hilbert.to_json(),
            "betti": betti.to_json(),
        })
        .to_string();
        Ok(Bundle { bif, degree, grid, module })
    }
}

pub fn load_bundle(input: Option<&Path>, g: &Global, degree: usize, r_max: Option<f64>, closed: bool) -> Result<Option<Arc<Bundle>>> {
    let Some(path) = input else { return Ok(None) };
    let bif = load_module(path, g, closed)?;
    let grid = module_grid(g, &bif, r_max, (40, 40))?;
    Ok(Some(Arc::new(Bundle::new(bif, degree, grid)?)))
}

#[derive(Clone)]
struct AppState {
    bundle: Option<Arc<Bundle>>,
}

fn json_error(status: StatusCode, code: &str, message: &str) -> Response {
    let body = crate::error_json(code, message);
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn missing_bundle() -> Response {
    json_error(StatusCode::NOT_FOUND, "NoBundle", "the service was started without a module")
}

async fn module(State(state): State<AppState>) -> Response {
    match &state.bundle {
        Some(b) => ([(header::CONTENT_TYPE, "application/json")], b.module.clone()).into_response(),
        None => missing_bundle(),
    }
}

fn number(params: &HashMap<String, String>, key: &str) -> std::result::Result<Option<f64>, String> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v.trim().parse::<f64>().map(Some).map_err(|_| format!("`{key}` is not a number: `{v}`")),
    }
}

/// The line named by the query string.
pub fn parse_line(params: &HashMap<String, String>) -> std::result::Result<Line, String> {
    let get = |k| number(params, k);
    let two = (get("x1")?, get("y1")?, get("x2")?, get("y2")?);
    let polar = (get("angle")?, get("offset")?);
    let line = match (two, polar) {
        ((Some(x1), Some(y1), Some(x2), Some(y2)), (None, None)) => Line::through(Bigrade::new(x1, y1), Bigrade::new(x2, y2)),
        ((None, None, None, None), (Some(a), Some(o))) => Line::from_angle_offset(a, o),
        _ => return Err("give x1, y1, x2, y2 or angle and offset".into()),
    };
    line.map_err(|e| e.to_string())
}

async fn barcode(
    State(state): State<AppState>,
    query: std::result::Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Response {
    let Some(bundle) = state.bundle.clone() else { return missing_bundle() };
    let Ok(Query(params)) = query else {
        return json_error(StatusCode::BAD_REQUEST, "BadLine", "unreadable query string");
    };
    let line = match parse_line(&params) {
        Ok(l) => l,
        Err(msg) => return json_error(StatusCode::BAD_REQUEST, "BadLine", &msg),
    };
    let computed = tokio::task::spawn_blocking(move || bundle.bif.as_dyn().fibered_barcode(&line, bundle.degree)).await;
    match computed {
        Ok(Ok(bars)) => ([(header::CONTENT_TYPE, "application/json")], bars.to_json().to_string()).into_response(),
        Ok(Err(e @ (Error::NonMonotoneLine | Error::InvalidInput(_)))) => {
            json_error(StatusCode::BAD_REQUEST, e.code(), &e.to_string())
        }
        Ok(Err(e)) => json_error(StatusCode::INTERNAL_SERVER_ERROR, e.code(), &e.to_string()),
        Err(e) => json_error(StatusCode::INTERNAL_SERVER_ERROR, "Internal", &e.to_string()),
    }
}

const INDEX: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>bistable</title></head>
<body>
<h1>bistable</h1>
<p>No UI assets were given. The data endpoints are <a href=\"/module\">/module</a> and
<code>/barcode?angle=&hellip;&amp;offset=&hellip;</code>.</p>
</body></html>
";

async fn index() -> Html<&'static str> {
    Html(INDEX)
}

pub fn router(bundle: Option<Arc<Bundle>>, assets: Option<PathBuf>) -> Router {
    let api = Router::new().route("/module", get(module)).route("/barcode", get(barcode));
    let app = match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(index)),
    };
    app.with_state(AppState { bundle }).layer(CorsLayer::permissive())
}

pub fn serve(bundle: Option<Arc<Bundle>>, host: &str, port: u16, assets: Option<PathBuf>) -> Result<()> {
    let addr: SocketAddr = format!("{host}:{port}").parse().map_err(|_| Error::InvalidInput(format!("bad address {host}:{port}")))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        crate::log(&json!({ "log": "serve", "address": listener.local_addr()?.to_string() }));
        axum::serve(listener, router(bundle, assets)).await?;
        Ok(())
    })
}
