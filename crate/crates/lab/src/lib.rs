//! Experiments, report formats and the command line around `unsieved-core`.
//!
//! Every experiment is described by an [`ExperimentConfig`] and produces a
//! [`Report`] that echoes the full configuration, so a report can be
//! regenerated byte for byte from its own config.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod sets;

pub use config::{ExperimentConfig, Format};
pub use error::{LabError, LabResult};
pub use experiments::{run, EXPERIMENTS};
pub use report::{Report, Status};
