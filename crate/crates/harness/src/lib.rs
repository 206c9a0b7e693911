//! Batch experiments for `qimp`: configs, exact runs, line-delimited records and reports.

pub mod config;
pub mod corpus;
pub mod error;
pub mod record;
pub mod report;
pub mod runner;
pub mod selftest;
pub mod sweep;

pub use config::{ExperimentConfig, SchemeConfig};
pub use error::{HarnessError, Result};
pub use record::{ExperimentRecord, Measured};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QIMP_OUT_DIR";

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
}
