//! HTTP review service over a flat-file lexicon, edit log and review queue.

pub mod api;
pub mod store;

use std::net::SocketAddr;

pub use api::{router, AppState};
pub use store::{Store, StoreError};

/// Environment variable naming the listen address.
pub const LISTEN_ENV: &str = "ZHWN_LISTEN";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

/// The listen address from [`LISTEN_ENV`], else [`DEFAULT_LISTEN`].
pub fn listen_addr() -> Result<SocketAddr, std::net::AddrParseError> {
    std::env::var(LISTEN_ENV).unwrap_or_else(|_| DEFAULT_LISTEN.to_string()).parse()
}

/// Serves `app` until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, app: axum::Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
