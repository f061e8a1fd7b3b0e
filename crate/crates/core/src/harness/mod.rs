//! Experiment harness: crash-safe JSONL run logs, the batch runner, and
//! the pass-rate metrics computed from the logs.

mod log;
mod metrics;
mod runner;

pub use log::{
    read_log, LoadedLog, LogLine, LogSink, RunLog, RunRecord, TheoremResult, SCHEMA_VERSION,
};
pub use metrics::{aggregate_by_domain, cumulative_pass_rate, PassRate, ReportRow, ReportTable};
pub use runner::{run_experiment, RunOptions, RunSummary};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How proof attempts are produced: the full revision pipeline, or
/// independent history-free resamples with the same budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dream,
    Repeated,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dream => "dream",
            Method::Repeated => "repeated",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dream" => Ok(Method::Dream),
            "repeated" => Ok(Method::Repeated),
            other => Err(format!("unknown method `{other}` (dream|repeated)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("run log {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("run log {path} line {line}: {source}")]
    Parse {
        path: String,
        line: usize,
        source: serde_json::Error,
    },
    #[error("run log {path}: first line must be a meta record")]
    MissingMeta { path: String },
    #[error("pass rate over an empty record set is undefined")]
    EmptyLog,
}
