//! Run configuration, file formats, reports and the acceptance suite behind
//! the `tree-harmonic` binary.

pub mod commands;
pub mod config;
pub mod formats;
pub mod report;
pub mod suite;

pub use config::{RunConfig, Tolerances};
pub use report::{Report, ReportSet};
pub use suite::run_suite;
