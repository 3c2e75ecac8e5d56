//! HTTP service around the RAT engines: accounts, the JSON API, the live
//! channel, the two stores and the operator tooling.

pub mod api;
pub mod auth;
pub mod config;
pub mod error;
pub mod export;
pub mod extract;
pub mod seed;
pub mod state;
pub mod store;
pub mod users;
pub mod views;
pub mod ws;

pub use config::Config;
pub use state::{AppState, Clock};

/// Binds and serves until ctrl-c.
pub async fn serve(config: Config) -> anyhow::Result<()> {
    let bind = config.bind.clone();
    let state = AppState::open(config, Clock::System)?;
    let app = api::router(state);
    let listener = tokio::net::TcpListener::bind(&bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
