//! Batch front-end for `pervglue`: the `.space` file format, reports and
//! the commands behind the `pervglue` binary.

pub mod commands;
pub mod report;
pub mod spacefile;

pub use commands::{run, Command};
pub use report::{ReportDoc, Verdict, REPORT_DIR_ENV};
