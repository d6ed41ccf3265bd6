//! Command-line surface and file formats for the estimator in `bagus-core`.
//!
//! Every run resolves its parameters (flags over config file over the
//! `BAGUS_SEED` environment variable over defaults), writes its outputs under
//! `--out`, and records everything in a `run-manifest.json` that can replay
//! the run byte-identically via `--from-manifest`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod errors;
pub mod io;
pub mod manifest;
pub mod report;
pub mod runner;

pub const SCHEMA: &str = "bagus/v1";
