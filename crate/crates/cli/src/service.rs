//! HTTP service over the evaluation engine.
//!
//! Every handler is a pure function of its request and the scenario directory,
//! so requests need no shared mutable state.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use dc_tco_core::scenario::{apply_overrides, sweepable_parameters};
use dc_tco_core::{
    compare, evaluate, load_scenario_value, serde_decimal, sweep, Decimal, Error, ErrorKind, ErrorRecord,
    RoiConvention, Scenario, SweepSpec,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::services::ServeDir;

use crate::{render, source};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Directory of `*.json` scenario documents; bundled fixtures are used without one.
    pub scenario_dir: Option<PathBuf>,
    /// Built dashboard assets served under `/` when the directory exists.
    pub assets_dir: Option<PathBuf>,
}

pub fn router(config: ServiceConfig) -> Router {
    let assets = config.assets_dir.clone().filter(|d| d.is_dir());
    let api = Router::new()
        .route("/api/scenarios", get(list_scenarios))
        .route("/api/parameters", get(list_parameters))
        .route("/api/evaluate", post(evaluate_handler))
        .route("/api/compare", post(compare_handler))
        .route("/api/sweep", post(sweep_handler))
        .route("/api/{*rest}", get(api_not_found).post(api_not_found))
        .with_state(Arc::new(config));
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(api_not_found),
    }
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

/// Error body returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorKind,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_path: Option<String>,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { code: ErrorKind::BadRequest, message: message.into(), field_path: None }
    }

    fn status(&self) -> StatusCode {
        match self.code {
            ErrorKind::BadRequest => StatusCode::BAD_REQUEST,
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let ErrorRecord { code, message, field_path } = err.to_record();
        ApiError { code, message, field_path }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        json_response(status, &self)
    }
}

fn json_response<T: Serialize>(status: StatusCode, body: &T) -> Response {
    let mut response = (status, render::json(body)).into_response();
    response.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json; charset=utf-8"));
    response
}

fn ok<T: Serialize>(body: &T) -> Response {
    json_response(StatusCode::OK, body)
}

type ApiResult = Result<Response, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ApiError {
            code: ErrorKind::BadRequest,
            message: format!("malformed request body: {}", e.inner()),
            field_path: (path != ".").then_some(path),
        }
    })?;
    de.end().map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))?;
    Ok(value)
}

/// A scenario reference: a bundled or directory name, a full document, or a name with overrides.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScenarioRef {
    Name(String),
    Document(Value),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedScenario {
    name: String,
    /// Dotted parameter paths mapped to replacement values.
    #[serde(default)]
    overrides: BTreeMap<String, OverrideValue>,
    #[serde(default)]
    roi_convention: Option<RoiConvention>,
}

#[derive(Debug, Deserialize)]
#[serde(transparent)]
struct OverrideValue(#[serde(with = "serde_decimal")] Decimal);

fn resolve(config: &ServiceConfig, reference: ScenarioRef) -> Result<Scenario, ApiError> {
    match reference {
        ScenarioRef::Name(name) => Ok(source::load_named(&name, config.scenario_dir.as_deref())?),
        ScenarioRef::Document(value) if value.get("facility").is_some() => Ok(load_scenario_value(value)?),
        ScenarioRef::Document(value) => {
            let named: NamedScenario = serde_path_to_error::deserialize(value).map_err(|e| {
                let path = e.path().to_string();
                ApiError {
                    code: ErrorKind::BadRequest,
                    message: format!("malformed scenario reference: {}", e.inner()),
                    field_path: (path != ".").then_some(path),
                }
            })?;
            let mut scenario = source::load_named(&named.name, config.scenario_dir.as_deref())?;
            let overrides: Vec<(String, Decimal)> = named.overrides.into_iter().map(|(k, v)| (k, v.0)).collect();
            scenario = apply_overrides(&scenario, &overrides)?;
            if let Some(convention) = named.roi_convention {
                scenario.economics.roi_convention = convention;
            }
            Ok(scenario)
        }
    }
}

async fn list_scenarios(State(config): State<Arc<ServiceConfig>>) -> ApiResult {
    let dir = config.scenario_dir.clone();
    // Directory reads block; keep them off the async workers.
    let listed = tokio::task::spawn_blocking(move || source::list(dir.as_deref())).await.map_err(|e| ApiError {
        code: ErrorKind::Internal,
        message: e.to_string(),
        field_path: None,
    })?;
    Ok(ok(&listed?))
}

async fn list_parameters() -> Response {
    ok(&sweepable_parameters())
}

async fn evaluate_handler(State(config): State<Arc<ServiceConfig>>, body: Bytes) -> ApiResult {
    let reference: ScenarioRef = parse_body(&body)?;
    let scenario = resolve(&config, reference)?;
    Ok(ok(&evaluate(&scenario)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareRequest {
    scenario: ScenarioRef,
    role_a: String,
    role_b: String,
}

async fn compare_handler(State(config): State<Arc<ServiceConfig>>, body: Bytes) -> ApiResult {
    let request: CompareRequest = parse_body(&body)?;
    let scenario = resolve(&config, request.scenario)?;
    let report = evaluate(&scenario)?;
    Ok(ok(&compare(&report, &request.role_a, &request.role_b)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRequest {
    scenario: ScenarioRef,
    sweep: SweepSpec,
}

async fn sweep_handler(State(config): State<Arc<ServiceConfig>>, body: Bytes) -> ApiResult {
    let request: SweepRequest = parse_body(&body)?;
    let scenario = resolve(&config, request.scenario)?;
    // Sweeps fan out on the rayon pool; do not stall the async workers meanwhile.
    let result = tokio::task::spawn_blocking(move || sweep(&scenario, &request.sweep)).await.map_err(|e| ApiError {
        code: ErrorKind::Internal,
        message: e.to_string(),
        field_path: None,
    })?;
    Ok(ok(&result?))
}

async fn api_not_found() -> ApiError {
    ApiError { code: ErrorKind::NotFound, message: "no such endpoint".into(), field_path: None }
}
