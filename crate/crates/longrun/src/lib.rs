//! Longest-run lack-of-fit test for univariate regression.
//!
//! The exact distribution theory lives in [`longrun_core`]; this crate adds
//! CSV ingestion, a shared table cache, test reports and the `longrun`
//! command-line tool.

pub mod cache;
pub mod cli;
mod error;
pub mod ingest;
pub mod render;
pub mod report;

pub use error::CliError;
pub use report::{run_test, Decision, TestConfig, TestReport};

pub use longrun_core as core;
