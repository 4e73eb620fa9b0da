//! Experiment driver for `mcergo-core`: JSON configuration, the built-in
//! chain corpus, the scaling / certify / hitmix / couple runs, and their
//! CSV, JSON and SVG outputs.

pub mod config;
pub mod corpus;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod runs;
pub mod svg;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use runs::{execute, run, RunOutput};
