//! Command-line front end for sparse continuous pairwise MRF learning: file formats,
//! hyperparameter files, run reports, thread-pool plumbing and the subcommands.

pub mod cli;
pub mod commands;
pub mod config;
pub mod io;
pub mod metrics;
pub mod parallel;
pub mod report;

use std::fmt;

/// Invalid invocation or configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit code for a failed command: 2 for usage and configuration errors, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let usage = err.chain().any(|e| {
        e.downcast_ref::<UsageError>().is_some() || matches!(e.downcast_ref::<mrf_core::Error>(), Some(mrf_core::Error::Config(_)))
    });
    if usage {
        2
    } else {
        1
    }
}
