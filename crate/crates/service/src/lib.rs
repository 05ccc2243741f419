//! HTTP API over the classifier: one stateless request per computation.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use econreason::corpus::Corpus;
use econreason::qe::{OrderMode, QeConfig};
use econreason::report::{run, Action, ErrorDocument, RunError, Status};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const MAX_SOURCE_BYTES: usize = 64 * 1024;
/// Room for the JSON envelope around a maximal source.
const MAX_BODY_BYTES: usize = 4 * MAX_SOURCE_BYTES;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiConfig {
    /// Seconds; defaults to the server maximum.
    pub timeout: Option<f64>,
    pub order_mode: Option<OrderMode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiRequest {
    pub source: String,
    #[serde(default)]
    pub config: Option<ApiConfig>,
    /// Restricts `possibilities` to one coordinate.
    #[serde(default)]
    pub variable: Option<String>,
}

/// `body` is a result document when `status` is ok, an error document
/// otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiResponse {
    pub status: Status,
    pub body: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleEntry {
    pub id: String,
    pub title: String,
}

#[derive(Clone)]
pub struct AppState {
    pub corpus: Arc<Corpus>,
    pub max_timeout: Duration,
    /// Engine runs currently executing, including ones being cancelled.
    pub in_flight: Arc<AtomicUsize>,
}

impl AppState {
    pub fn new(corpus: Corpus, max_timeout: Duration) -> AppState {
        AppState {
            corpus: Arc::new(corpus),
            max_timeout,
            in_flight: Arc::new(AtomicUsize::new(0)),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/v1/examples", get(list_examples))
        .route("/v1/examples/{id}", get(show_example))
        .route("/v1/analyze", post(|s: State<AppState>, b: Bytes| endpoint(s, b, Endpoint::Analyze)))
        .route(
            "/v1/possibilities",
            post(|s: State<AppState>, b: Bytes| endpoint(s, b, Endpoint::Possibilities)),
        )
        .route("/v1/sufficient", post(|s: State<AppState>, b: Bytes| endpoint(s, b, Endpoint::Sufficient)))
        .route("/v1/space", post(|s: State<AppState>, b: Bytes| endpoint(s, b, Endpoint::Space)))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

async fn list_examples(State(st): State<AppState>) -> Json<Vec<ExampleEntry>> {
    Json(
        st.corpus
            .examples
            .iter()
            .map(|e| ExampleEntry {
                id: e.id.clone(),
                title: e.title.clone(),
            })
            .collect(),
    )
}

async fn show_example(State(st): State<AppState>, Path(id): Path<String>) -> Response {
    match st.corpus.get(&id) {
        Some(e) => e.source.clone().into_response(),
        None => (StatusCode::NOT_FOUND, format!("no example '{id}'")).into_response(),
    }
}

#[derive(Clone, Copy)]
enum Endpoint {
    Analyze,
    Possibilities,
    Sufficient,
    Space,
}

fn http_status(s: Status) -> StatusCode {
    match s {
        Status::Ok => StatusCode::OK,
        Status::BadRequest => StatusCode::BAD_REQUEST,
        Status::ParseError => StatusCode::UNPROCESSABLE_ENTITY,
        Status::ResourceLimit => StatusCode::REQUEST_TIMEOUT,
        Status::InternalError => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

fn respond(status: Status, body: Value) -> Response {
    (http_status(status), Json(ApiResponse { status, body })).into_response()
}

fn failure(e: &RunError) -> Response {
    let doc: ErrorDocument = e.to_document();
    respond(doc.status, serde_json::to_value(doc).expect("serializable"))
}

fn bad_request(msg: impl Into<String>) -> Box<Response> {
    Box::new(failure(&RunError::Usage(msg.into())))
}

/// Sets the cancel flag when dropped, i.e. when the request finishes or the
/// client goes away mid-computation.
struct CancelOnDrop(Arc<AtomicBool>);

impl Drop for CancelOnDrop {
    fn drop(&mut self) {
        self.0.store(true, Ordering::Relaxed);
    }
}

struct InFlight(Arc<AtomicUsize>);

impl Drop for InFlight {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

fn validate(st: &AppState, body: &[u8], ep: Endpoint) -> Result<(ApiRequest, Action, QeConfig), Box<Response>> {
    let req: ApiRequest =
        serde_json::from_slice(body).map_err(|e| bad_request(format!("malformed request: {e}")))?;
    if req.source.len() > MAX_SOURCE_BYTES {
        return Err(bad_request(format!(
            "source is {} bytes; the limit is {MAX_SOURCE_BYTES}",
            req.source.len()
        )));
    }
    let cfg = req.config.clone().unwrap_or_default();
    let timeout = match cfg.timeout {
        None => st.max_timeout,
        Some(t) if t.is_finite() && t > 0.0 && t <= st.max_timeout.as_secs_f64() => Duration::from_secs_f64(t),
        Some(t) => {
            return Err(bad_request(format!(
                "timeout {t} must be positive and at most {} seconds",
                st.max_timeout.as_secs_f64()
            )))
        }
    };
    let action = match ep {
        Endpoint::Analyze => Action::Analyze,
        Endpoint::Possibilities => Action::Possibilities(req.variable.clone().map(|v| vec![v])),
        Endpoint::Sufficient => Action::Sufficient,
        Endpoint::Space => Action::Space,
    };
    if req.variable.is_some() && !matches!(ep, Endpoint::Possibilities) {
        return Err(bad_request("'variable' only applies to possibilities"));
    }
    let qe = QeConfig {
        order_mode: cfg.order_mode.unwrap_or_default(),
        ..QeConfig::default()
    }
    .with_timeout(timeout);
    Ok((req, action, qe))
}

async fn endpoint(State(st): State<AppState>, body: Bytes, ep: Endpoint) -> Response {
    let (req, action, mut cfg) = match validate(&st, &body, ep) {
        Ok(v) => v,
        Err(r) => return *r,
    };
    let cancel = Arc::new(AtomicBool::new(false));
    cfg.cancel = Some(cancel.clone());
    let _guard = CancelOnDrop(cancel);
    st.in_flight.fetch_add(1, Ordering::SeqCst);
    let in_flight = InFlight(st.in_flight.clone());
    let job = tokio::task::spawn_blocking(move || {
        let _in_flight = in_flight;
        run(&req.source, &action, &cfg)
    });
    match job.await {
        Ok(Ok(doc)) => respond(Status::Ok, serde_json::to_value(doc).expect("serializable")),
        Ok(Err(e)) => failure(&e),
        Err(e) => failure(&RunError::Internal(format!("engine task failed: {e}"))),
    }
}
