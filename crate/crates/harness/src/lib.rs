//! Batch experiments over the wiretap-commit toolkit: JSON configuration,
//! seeded runs and CSV/JSON result tables. The `wtc` binary is a thin
//! command-line layer over this crate.

pub mod config;
mod error;
pub mod run;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat, Plan};
pub use error::{HarnessError, Result};
pub use run::{run_capacity_grid, run_experiment, run_plan};
pub use table::{Cell, Column, ColumnType, ResultTable};
