//! Experiment runner for trapped-ring walk survival studies.
//!
//! An [`ExperimentSpec`] describes a sweep of ensemble cells. The
//! [`runner`] evaluates every cell on a worker pool, fits the survival
//! curves and writes one CSV and one JSON record per cell.

pub mod output;
pub mod parallel;
pub mod presets;
pub mod runner;
pub mod spec;

pub use spec::{ExperimentSpec, SpecError};

/// Version string embedded in every metadata record.
pub const CODE_VERSION: &str = concat!("trapwalk ", env!("CARGO_PKG_VERSION"));
