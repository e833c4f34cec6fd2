//! Local HTTP service for running sessions from a browser console.
//!
//! Configuration comes from the environment: `TASEP_DATA_DIR` for the event
//! logs, `TASEP_ADDR` for the bind address (loopback by default) and
//! `TASEP_CONSOLE_DIR` for optional static console assets.

mod api;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;
use tower_http::services::{ServeDir, ServeFile};

pub use api::{router, ApiError, AppState};
pub use store::{SessionHandle, Store, StoreError};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8420";
pub const DEFAULT_DATA_DIR: &str = "tasep-data";

#[derive(Clone, Debug)]
pub struct Config {
    pub data_dir: PathBuf,
    pub addr: SocketAddr,
    pub console_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("TASEP_ADDR `{0}` is not a socket address")]
    Addr(String),
}

impl Config {
    pub fn from_env() -> Result<Self, ConfigError> {
        let addr = std::env::var("TASEP_ADDR").unwrap_or_else(|_| DEFAULT_ADDR.to_string());
        Ok(Self {
            data_dir: std::env::var_os("TASEP_DATA_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR)),
            addr: addr.parse().map_err(|_| ConfigError::Addr(addr))?,
            console_dir: std::env::var_os("TASEP_CONSOLE_DIR").map(PathBuf::from),
        })
    }
}

/// Router over an opened store, serving console assets when configured.
pub fn app(store: Store, console_dir: Option<PathBuf>) -> Router {
    let api = router(Arc::new(store));
    match console_dir {
        Some(dir) => {
            let index = dir.join("index.html");
            api.fallback_service(ServeDir::new(dir).fallback(ServeFile::new(index)))
        }
        None => api,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Open the store and serve until Ctrl-C.
pub async fn serve(config: Config) -> Result<(), ServeError> {
    let store = Store::open(&config.data_dir)?;
    let sessions = store.handles().await.len();
    let listener = tokio::net::TcpListener::bind(config.addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.addr,
            source,
        })?;
    eprintln!(
        "tasep service on http://{} (data {}, {sessions} session(s) restored)",
        listener.local_addr()?,
        config.data_dir.display()
    );
    axum::serve(listener, app(store, config.console_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
