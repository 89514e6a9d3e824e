//! Stateless JSON service.
//!
//! - `POST /api/allocate`: states (inline, a preset id or CSV text) plus
//!   parameters; answers with the same JSON document as `--format json`.
//! - `GET /api/presets`: bundled datasets with status-quo seats.
//! - `GET /api/health`.
//!
//! Errors come back as `{"error": {"code", "message", "details"}}` with
//! 409 for TIE, 422 for INFEASIBLE, 400 for PARSE and INVALID.

use crate::config::{parse_max_cap, parse_scheme_a_base, parse_tie_policy, Method, ScenarioConfig, SchemeChoice};
use crate::dataset::{parse_population_file, PopulationDataset};
use crate::render::report_json;
use crate::report::{run_scenario, ErrorKind, RunError};
use apportion::presets;
use apportion::rational::{parse_rational, Rational};
use apportion::{MemberState, RoundingRule, Target};
use axum::body::Bytes;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateInput {
    name: String,
    population: u64,
    #[serde(default)]
    now_seats: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "type")]
enum SchemeInput {
    #[serde(alias = "a")]
    A {
        cap_fraction: Value,
        /// `minimum-minus-one` (default) or `smallest-fraction`.
        #[serde(default)]
        base: Option<String>,
    },
    #[serde(alias = "b")]
    B,
}

fn default_max() -> Value {
    json!(96)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsInput {
    #[serde(default)]
    base: Option<Value>,
    /// A positive integer, or `null` / `"none"` for no cap.
    #[serde(default = "default_max")]
    max: Value,
    #[serde(default)]
    house: Option<u64>,
    #[serde(default)]
    divisor: Option<Value>,
    #[serde(default)]
    rounding: Option<String>,
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    tie_policy: Option<String>,
    #[serde(default)]
    allow_fractional_base: bool,
    #[serde(default)]
    scheme: Option<SchemeInput>,
}

impl Default for ParamsInput {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("all fields have defaults")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllocateRequest {
    #[serde(default)]
    preset: Option<String>,
    #[serde(default)]
    states: Option<Vec<StateInput>>,
    #[serde(default)]
    csv: Option<String>,
    #[serde(default)]
    params: ParamsInput,
    #[serde(default)]
    acceding: Vec<StateInput>,
}

/// Numbers may arrive as JSON numbers or as strings such as `"11/2"`.
fn rational_field(field: &str, value: &Value) -> Result<Rational, RunError> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(RunError::invalid(format!("{field}: expected a number, found {other}"))),
    };
    parse_rational(&text).map_err(|e| RunError::invalid(format!("{field}: {e}")))
}

fn dataset_of(request: &AllocateRequest) -> Result<PopulationDataset, RunError> {
    let given = [request.preset.is_some(), request.states.is_some(), request.csv.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(RunError::invalid("give exactly one of preset, states or csv"));
    }
    if let Some(id) = &request.preset {
        let preset = presets::by_id(id)
            .ok_or_else(|| RunError::invalid(format!("unknown preset {id:?}")))?;
        return Ok(PopulationDataset::from_preset(&preset));
    }
    if let Some(csv) = &request.csv {
        return Ok(parse_population_file(csv.as_bytes())?.with_label("uploaded CSV"));
    }
    let inputs = request.states.as_deref().unwrap_or_default();
    let mut states = Vec::with_capacity(inputs.len());
    let mut status_quo_seats = BTreeMap::new();
    for input in inputs {
        states.push(MemberState::new(input.name.clone(), input.population)?);
        if let Some(seats) = input.now_seats {
            status_quo_seats.insert(input.name.clone(), seats);
        }
    }
    Ok(PopulationDataset {
        states,
        status_quo_seats,
        source_label: "request".into(),
        snapshot_date: String::new(),
    })
}

fn config_of(request: &AllocateRequest) -> Result<ScenarioConfig, RunError> {
    let p = &request.params;
    let mut config = ScenarioConfig::default();
    if let Some(base) = &p.base {
        config.base = rational_field("base", base)?;
    }
    config.max_cap = match &p.max {
        Value::Null => None,
        Value::String(s) => parse_max_cap(s).map_err(RunError::invalid)?,
        Value::Number(n) => parse_max_cap(&n.to_string()).map_err(RunError::invalid)?,
        other => return Err(RunError::invalid(format!("max: expected a number or null, found {other}"))),
    };
    config.target = match (p.house, &p.divisor) {
        (Some(_), Some(_)) => return Err(RunError::invalid("house and divisor are mutually exclusive")),
        (Some(h), None) => Target::House(h),
        (None, Some(d)) => Target::Divisor(rational_field("divisor", d)?),
        (None, None) => config.target,
    };
    if let Some(rounding) = &p.rounding {
        config.rounding = rounding.parse::<RoundingRule>().map_err(|e| RunError::invalid(e.to_string()))?;
    }
    if let Some(method) = &p.method {
        config.method = method.parse::<Method>().map_err(RunError::invalid)?;
    }
    if let Some(policy) = &p.tie_policy {
        config.tie_policy = parse_tie_policy(policy).map_err(RunError::invalid)?;
    }
    config.allow_fractional_base = p.allow_fractional_base;
    config.scheme = match &p.scheme {
        None => None,
        Some(SchemeInput::B) => Some(SchemeChoice::B),
        Some(SchemeInput::A { cap_fraction, base }) => Some(SchemeChoice::A {
            cap_fraction: rational_field("cap_fraction", cap_fraction)?,
            base: parse_scheme_a_base(base.as_deref().unwrap_or("minimum-minus-one"))
                .map_err(RunError::invalid)?,
        }),
    };
    config.acceding = request
        .acceding
        .iter()
        .map(|s| MemberState::new(s.name.clone(), s.population))
        .collect::<Result<_, _>>()?;
    config.check_dp = true;
    Ok(config)
}

fn status_of(kind: ErrorKind) -> StatusCode {
    match kind {
        ErrorKind::Tie => StatusCode::CONFLICT,
        ErrorKind::Infeasible => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorKind::Parse | ErrorKind::Invalid => StatusCode::BAD_REQUEST,
        ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for RunError {
    fn into_response(self) -> Response {
        (status_of(self.kind), Json(self.to_json())).into_response()
    }
}

/// Runs one allocate request; exposed for callers that want the JSON without
/// going through HTTP.
pub fn handle_allocate(body: &[u8]) -> Result<Value, RunError> {
    let request: AllocateRequest = serde_json::from_slice(body).map_err(|e| RunError {
        kind: ErrorKind::Parse,
        message: format!("malformed request: {e}"),
        details: json!({ "line": e.line(), "column": e.column() }),
    })?;
    let dataset = dataset_of(&request)?;
    let config = config_of(&request)?;
    let report = run_scenario(&config, &dataset)?;
    Ok(report_json(&report))
}

async fn allocate(body: Bytes) -> Result<Json<Value>, RunError> {
    tokio::task::spawn_blocking(move || handle_allocate(&body))
        .await
        .map_err(|e| RunError::new(ErrorKind::Internal, e.to_string()))?
        .map(Json)
}

pub fn presets_json() -> Value {
    let presets: Vec<Value> = presets::all()
        .iter()
        .map(|preset| {
            let dataset = PopulationDataset::from_preset(preset);
            json!({
                "id": preset.id,
                "label": preset.label,
                "source": presets::SOURCE_LABEL,
                "snapshot_date": dataset.snapshot_date,
                "states": dataset.states.iter().map(|s| json!({
                    "name": s.name,
                    "population": s.population,
                    "now_seats": dataset.status_quo_seats.get(&s.name),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "presets": presets })
}

async fn list_presets() -> Json<Value> {
    Json(presets_json())
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn not_found() -> Response {
    let body = RunError::invalid("no such endpoint").to_json();
    (StatusCode::NOT_FOUND, Json(body)).into_response()
}

pub fn router() -> Router {
    Router::new()
        .route("/api/allocate", post(allocate))
        .route("/api/presets", get(list_presets))
        .route("/api/health", get(health))
        .fallback(not_found)
}

pub async fn serve(bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
