//! Command-line driver: configuration, verification suites and report emission.

pub mod anchors;
pub mod app;
pub mod config;
pub mod error;
pub mod report;
pub mod suites;

pub use app::run_cli;
pub use error::CliError;
