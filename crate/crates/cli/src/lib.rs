//! Configuration, suite dispatch and report files behind the `voa` binary.

pub mod config;
pub mod lab;
pub mod output;
pub mod suites;

pub use config::{ConfigError, RunConfig, Suite};
pub use suites::{build, exit_code, verify, Built, RunError};
