//! Experiment configs, JSON/CSV reports, and the `mmult` command line.

pub mod cli;
pub mod commands;
pub mod config;
pub mod report;
pub mod table_io;

pub use commands::{run_command, COMMANDS};
pub use config::{ExperimentConfig, GroupKind};
pub use report::{Assertion, Report, ReportBody, TableRow};
pub use table_io::{
    emit_graded_family, emit_multiplier_table, parse_graded_family, parse_graded_family_str, parse_multiplier_table,
    parse_multiplier_table_str,
};
