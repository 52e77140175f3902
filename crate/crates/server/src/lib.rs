//! Stateless HTTP/JSON front end for the lab.
//!
//! Every request is evaluated from scratch; the only shared state is the
//! read-mostly per-k solve cache, which changes speed but never results.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bytes::Bytes;
use delta_lab_core::api::{
    ApiError, ClassicalRequest, EvaluateResponse, CLASSICAL_PATH, DEFAULTS_PATH, EVALUATE_PATH,
};
use delta_lab_core::{analyze, Error, Scenario, SolveCache};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub const BIND_ENV: &str = "DELTA_LAB_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:7878";

pub struct AppState {
    defaults: Scenario,
    cache: SolveCache,
}

impl AppState {
    pub fn new(defaults: Scenario) -> Self {
        Self {
            defaults,
            cache: SolveCache::default(),
        }
    }
}

/// Failure returned by a handler: validation problems map to 400, anything
/// else to 500. The body is always an [`ApiError`].
pub struct HttpError(StatusCode, ApiError);

impl From<Error> for HttpError {
    fn from(err: Error) -> Self {
        let status = if err.is_validation() {
            StatusCode::BAD_REQUEST
        } else {
            StatusCode::INTERNAL_SERVER_ERROR
        };
        HttpError(status, ApiError::from(&err))
    }
}

impl IntoResponse for HttpError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

fn internal(message: String) -> HttpError {
    HttpError(
        StatusCode::INTERNAL_SERVER_ERROR,
        ApiError {
            error: "internal_error".into(),
            message,
            pointer: None,
        },
    )
}

fn body_text(body: &Bytes) -> Result<&str, HttpError> {
    std::str::from_utf8(body).map_err(|e| {
        HttpError::from(Error::Schema {
            pointer: "/".into(),
            message: format!("body is not UTF-8: {e}"),
        })
    })
}

async fn defaults(State(state): State<Arc<AppState>>) -> Json<Scenario> {
    Json(state.defaults.clone())
}

async fn evaluate(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<EvaluateResponse>, HttpError> {
    let scenario = Scenario::from_json_str(body_text(&body)?)?;
    let response = tokio::task::spawn_blocking(move || {
        analyze(&scenario, Some(&state.cache)).map(|a| EvaluateResponse::from(&a))
    })
    .await
    .map_err(|e| internal(format!("evaluation task failed: {e}")))??;
    Ok(Json(response))
}

async fn classical(body: Bytes) -> Result<Response, HttpError> {
    let request = ClassicalRequest::from_json_str(body_text(&body)?)?;
    Ok(Json(request.evaluate()?).into_response())
}

/// `origin` restricts CORS to one origin; `None` allows any.
pub fn cors_layer(origin: Option<&str>) -> Result<CorsLayer, String> {
    let allow = match origin {
        None | Some("*") => AllowOrigin::from(Any),
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o).map_err(|e| format!("invalid CORS origin `{o}`: {e}"))?,
        ),
    };
    Ok(CorsLayer::new()
        .allow_origin(allow)
        .allow_methods(Any)
        .allow_headers(Any))
}

pub fn router(state: Arc<AppState>, cors: CorsLayer) -> Router {
    Router::new()
        .route(DEFAULTS_PATH, get(defaults))
        .route(EVALUATE_PATH, post(evaluate))
        .route(CLASSICAL_PATH, post(classical))
        .layer(cors)
        .with_state(state)
}

/// Bind address from an explicit flag, then `DELTA_LAB_BIND`, then the default.
pub fn resolve_bind(flag: Option<&str>) -> Result<SocketAddr, String> {
    let env = std::env::var(BIND_ENV).ok();
    let text = flag.or(env.as_deref()).unwrap_or(DEFAULT_BIND);
    text.parse()
        .map_err(|e| format!("invalid bind address `{text}`: {e}"))
}

/// Serves until the listener fails or the process receives Ctrl-C.
pub async fn serve(
    listener: tokio::net::TcpListener,
    defaults: Scenario,
    cors: CorsLayer,
) -> std::io::Result<()> {
    let app = router(Arc::new(AppState::new(defaults)), cors);
    tracing::info!(addr = ?listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
