//! Experiment runner and file formats for `gni-core`: configuration files,
//! built-in presets, multi-start studies, CSV traces, JSON summaries and SVG
//! convergence plots.

pub mod config;
pub mod error;
pub mod presets;
pub mod study;
pub mod svg;
pub mod trace_csv;

pub use config::{Document, ExperimentConfig, PlotQuantity};
pub use error::{Error, Result};
pub use study::{run_study, Study, StudySummary};
