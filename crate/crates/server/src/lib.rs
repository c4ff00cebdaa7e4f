//! HTTP service and command-line plumbing around the `podgen` engine:
//! a data directory of stories and generated podcasts, the podcast API,
//! interaction-event logging and a mock provider server.

pub mod api;
pub mod events;
pub mod mock_provider;
pub mod settings;
pub mod store;

pub use api::{router, AppState};
pub use settings::Settings;
pub use store::DataDir;
