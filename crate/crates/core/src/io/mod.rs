//! Config files, CSV logs and run manifests.

pub mod config;
pub mod export;
pub mod manifest;

pub use config::{load_config, ConfigDoc};
pub use export::{format_float, read_logs, write_logs, LOG_FILES};
pub use manifest::RunManifest;
