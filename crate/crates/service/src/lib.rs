//! HTTP service for the block annotation loop: cut a block from the corpus,
//! annotate it with the current model, take an annotator's corrections,
//! retrain, and report how accuracy moves from block to block.
//!
//! State lives in a plain directory (see [`store`]); the corpus TSV stays the
//! canonical artifact and every transcription change is in an append-only
//! audit log.

pub mod api;
pub mod http;
pub mod store;

use std::net::SocketAddr;

pub use http::{router, AppState};
pub use store::{replay, AuditEntry, Store, StoreError};

/// Loopback by default: the service has no authentication.
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

/// Serves `store` until Ctrl-C.
pub async fn serve(store: Store, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
