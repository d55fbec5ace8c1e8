//! Batch verification driver: configurations, suites and reports.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{preset, Config, ConfigError, PartialConfig, PRESETS};
pub use report::{emit, Format, Record, Report, Status, Verdict};
pub use suites::{run, RunOptions, Suite};
