//! A read-only SPARQL protocol endpoint over an in-memory dataset.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{RawQuery, State};
use axum::http::{header, HeaderMap, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::{Deserialize, Serialize};

use crate::algebra::results::{to_json, to_ntriples, JSON_RESULTS, NTRIPLES};
use crate::algebra::{evaluate_query_with, EvalError, EvalOptions, QueryResult, Semantics};
use crate::dataset::{load_manifest, Dataset, LoadError};
use crate::syntax::parse_query;

/// ```toml
/// addr = "127.0.0.1:7878"
/// manifest = "data/manifest.toml"
/// semantics = "set"
/// timeout_ms = 30000
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    #[serde(default = "default_addr")]
    pub addr: String,
    pub manifest: PathBuf,
    #[serde(default)]
    pub semantics: Semantics,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_addr() -> String {
    "127.0.0.1:7878".to_string()
}

fn default_timeout_ms() -> u64 {
    30_000
}

#[derive(Debug, thiserror::Error)]
pub enum EndpointError {
    #[error("invalid endpoint config: {0}")]
    Config(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

impl EndpointConfig {
    /// Reads the config; a relative manifest path is taken relative to the
    /// config file.
    pub fn load(path: &Path) -> Result<Self, EndpointError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EndpointError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: EndpointConfig =
            toml::from_str(&text).map_err(|e| EndpointError::Config(e.to_string()))?;
        if cfg.manifest.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.manifest = dir.join(&cfg.manifest);
            }
        }
        Ok(cfg)
    }
}

struct AppState {
    dataset: Dataset,
    semantics: Semantics,
    timeout: Duration,
}

/// A bound, not yet running, endpoint.
pub struct Endpoint {
    listener: std::net::TcpListener,
    state: Arc<AppState>,
}

impl Endpoint {
    pub fn new(
        dataset: Dataset,
        addr: &str,
        semantics: Semantics,
        timeout: Duration,
    ) -> Result<Self, EndpointError> {
        if timeout.is_zero() {
            return Err(EndpointError::Config("timeout must be positive".into()));
        }
        let listener = std::net::TcpListener::bind(addr).map_err(|source| EndpointError::Bind {
            addr: addr.to_string(),
            source,
        })?;
        listener.set_nonblocking(true)?;
        Ok(Endpoint {
            listener,
            state: Arc::new(AppState {
                dataset,
                semantics,
                timeout,
            }),
        })
    }

    pub fn from_config(cfg: &EndpointConfig) -> Result<Self, EndpointError> {
        let dataset = load_manifest(&cfg.manifest)?;
        Endpoint::new(
            dataset,
            &cfg.addr,
            cfg.semantics,
            Duration::from_millis(cfg.timeout_ms),
        )
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener has an address")
    }

    /// `http://host:port/sparql`
    pub fn url(&self) -> String {
        format!("http://{}/sparql", self.local_addr())
    }

    /// Serves until Ctrl-C.
    pub fn serve(self) -> Result<(), EndpointError> {
        runtime()?.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(self.listener)?;
            axum::serve(listener, router(self.state))
                .with_graceful_shutdown(async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await?;
            Ok(())
        })
    }

    /// Serves on a background thread until the handle is dropped.
    pub fn spawn(self) -> Result<RunningEndpoint, EndpointError> {
        let addr = self.local_addr();
        let rt = runtime()?;
        let (tx, rx) = tokio::sync::oneshot::channel::<()>();
        let handle = std::thread::spawn(move || {
            rt.block_on(async move {
                let listener =
                    tokio::net::TcpListener::from_std(self.listener).expect("listener converts");
                let _ = axum::serve(listener, router(self.state))
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await;
            })
        });
        Ok(RunningEndpoint {
            addr,
            shutdown: Some(tx),
            handle: Some(handle),
        })
    }
}

fn runtime() -> std::io::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build()
}

pub struct RunningEndpoint {
    addr: SocketAddr,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    handle: Option<JoinHandle<()>>,
}

impl RunningEndpoint {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}/sparql", self.addr)
    }
}

impl Drop for RunningEndpoint {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sparql", get(handle).post(handle))
        .with_state(state)
}

fn form_value(encoded: &[u8], key: &str) -> Option<String> {
    form_urlencoded::parse(encoded)
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.into_owned())
}

fn text(status: StatusCode, body: impl Into<String>) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        body.into(),
    )
        .into_response()
}

async fn handle(
    State(state): State<Arc<AppState>>,
    method: Method,
    RawQuery(raw): RawQuery,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    let query = if method == Method::GET {
        raw.and_then(|q| form_value(q.as_bytes(), "query"))
    } else {
        let ct = headers
            .get(header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .unwrap_or("");
        let mime = ct.split(';').next().unwrap_or("").trim();
        match mime {
            "application/sparql-query" => match String::from_utf8(body.to_vec()) {
                Ok(s) => Some(s),
                Err(_) => return text(StatusCode::BAD_REQUEST, "query is not valid UTF-8"),
            },
            "application/x-www-form-urlencoded" => form_value(&body, "query"),
            _ => {
                return text(
                    StatusCode::UNSUPPORTED_MEDIA_TYPE,
                    format!("unsupported content type `{ct}`"),
                )
            }
        }
    };
    let Some(query) = query else {
        return text(StatusCode::BAD_REQUEST, "missing `query` parameter");
    };
    let q = match parse_query(&query, None) {
        Ok(q) => q,
        Err(e) => return text(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let timeout = state.timeout;
    let result = tokio::task::spawn_blocking(move || {
        let opts = EvalOptions {
            semantics: state.semantics,
            deadline: Some(Instant::now() + state.timeout),
            ..EvalOptions::default()
        };
        evaluate_query_with(&q, &state.dataset, &opts)
    })
    .await;
    match result {
        Ok(Ok(QueryResult::Graph(triples))) => (
            StatusCode::OK,
            [(header::CONTENT_TYPE, NTRIPLES)],
            to_ntriples(&triples),
        )
            .into_response(),
        Ok(Ok(r)) => {
            let json = to_json(&r).expect("SELECT and ASK results have a JSON form");
            (
                StatusCode::OK,
                [(header::CONTENT_TYPE, JSON_RESULTS)],
                json.to_string(),
            )
                .into_response()
        }
        Ok(Err(EvalError::Timeout)) => text(
            StatusCode::SERVICE_UNAVAILABLE,
            format!("query evaluation exceeded {} ms", timeout.as_millis()),
        ),
        Ok(Err(e)) => text(StatusCode::BAD_REQUEST, e.to_string()),
        Err(e) => text(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}
