//! JSONL run log: one meta line, then one line per attempt as it happens
//! and one result line per finished theorem. Every line is flushed on
//! write, so a crash loses at most the line in flight; reading tolerates a
//! log whose tail was interrupted mid-theorem.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::orchestrator::{AttemptRecord, AttemptSink, ProofResult};
use crate::schedule::Mode;
use crate::theorem::Theorem;
use crate::verifier::VerdictStatus;

use super::{HarnessError, Method};

pub const SCHEMA_VERSION: u32 = 1;

/// One proof attempt, as logged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub theorem_id: String,
    pub domain: String,
    pub method: Method,
    /// 1-based attempt index.
    pub revision: usize,
    pub verdict_status: VerdictStatus,
    pub mode: Mode,
    pub timestamp: String,
}

/// One finished theorem, as logged. Its presence is what `--resume` keys
/// on: a theorem with attempts but no result line was interrupted and runs
/// again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremResult {
    pub theorem_id: String,
    pub domain: String,
    pub method: Method,
    pub solved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solved_at_revision: Option<usize>,
    pub revisions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
    pub wall_time_ms: u64,
    pub timestamp: String,
}

impl TheoremResult {
    pub fn from_proof_result(result: &ProofResult, method: Method) -> TheoremResult {
        TheoremResult {
            theorem_id: result.theorem_id.clone(),
            domain: result.domain.clone(),
            method,
            solved: result.solved,
            solved_at_revision: result.solved_at_revision,
            revisions: result.attempts.len(),
            aborted: result.aborted.clone(),
            wall_time_ms: result.wall_time_ms,
            timestamp: now_rfc3339(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    Meta {
        schema_version: u32,
        method: Method,
        started_at: String,
    },
    Attempt(RunRecord),
    Result(TheoremResult),
}

pub(crate) fn now_rfc3339() -> String {
    chrono::Utc::now()
        .to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Append-only writer. One exclusive lock serializes all writers.
pub struct RunLog {
    path: PathBuf,
    writer: Mutex<BufWriter<File>>,
}

impl RunLog {
    /// Starts a fresh log, truncating any existing file.
    pub fn create(path: &Path, method: Method) -> Result<RunLog, HarnessError> {
        Self::open(path, method, true)
    }

    /// Opens for appending; writes the meta line only when the file is new
    /// or empty.
    pub fn append(path: &Path, method: Method) -> Result<RunLog, HarnessError> {
        Self::open(path, method, false)
    }

    fn open(path: &Path, method: Method, truncate: bool) -> Result<RunLog, HarnessError> {
        let io_err = |source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(io_err)?;
            }
        }
        let mut options = OpenOptions::new();
        options.create(true).write(true);
        if truncate {
            options.truncate(true);
        } else {
            options.append(true);
        }
        let file = options.open(path).map_err(io_err)?;
        let fresh = file.metadata().map_err(io_err)?.len() == 0;
        let log = RunLog {
            path: path.to_path_buf(),
            writer: Mutex::new(BufWriter::new(file)),
        };
        if fresh {
            log.write_line(&LogLine::Meta {
                schema_version: SCHEMA_VERSION,
                method,
                started_at: now_rfc3339(),
            })
            .map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(log)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn write_line(&self, line: &LogLine) -> std::io::Result<()> {
        let text = serde_json::to_string(line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let mut writer = self.writer.lock().expect("log writer lock");
        writer.write_all(text.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()
    }

    pub fn record_attempt(&self, record: &RunRecord) -> std::io::Result<()> {
        self.write_line(&LogLine::Attempt(record.clone()))
    }

    pub fn record_result(&self, result: &TheoremResult) -> std::io::Result<()> {
        self.write_line(&LogLine::Result(result.clone()))
    }
}

/// Bridges the prover's attempt stream into the run log.
pub struct LogSink<'a> {
    pub log: &'a RunLog,
    pub method: Method,
}

impl AttemptSink for LogSink<'_> {
    fn record(&self, theorem: &Theorem, attempt: &AttemptRecord) -> std::io::Result<()> {
        self.log.record_attempt(&RunRecord {
            theorem_id: theorem.id.clone(),
            domain: theorem.domain.clone(),
            method: self.method,
            revision: attempt.revision,
            verdict_status: attempt.verdict.status,
            mode: attempt.mode,
            timestamp: now_rfc3339(),
        })
    }
}

/// A parsed log. Attempts are deduplicated on (theorem, method, revision)
/// and results on (theorem, method), keeping the last occurrence, so a
/// resumed run that re-ran an interrupted theorem supersedes the partial
/// records.
#[derive(Debug, Clone)]
pub struct LoadedLog {
    pub schema_version: u32,
    pub method: Method,
    pub attempts: Vec<RunRecord>,
    pub results: Vec<TheoremResult>,
}

impl LoadedLog {
    /// Ids of theorems whose result line made it to the log.
    pub fn completed_ids(&self) -> impl Iterator<Item = &str> {
        self.results.iter().map(|r| r.theorem_id.as_str())
    }
}

pub fn read_log(path: &Path) -> Result<LoadedLog, HarnessError> {
    let file = File::open(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut meta: Option<(u32, Method)> = None;
    let mut attempts: Vec<RunRecord> = Vec::new();
    let mut attempt_index: BTreeMap<(String, Method, usize), usize> = BTreeMap::new();
    let mut results: Vec<TheoremResult> = Vec::new();
    let mut result_index: BTreeMap<(String, Method), usize> = BTreeMap::new();

    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: LogLine =
            serde_json::from_str(&line).map_err(|source| HarnessError::Parse {
                path: path.display().to_string(),
                line: i + 1,
                source,
            })?;
        match parsed {
            LogLine::Meta {
                schema_version,
                method,
                ..
            } => {
                if meta.is_none() {
                    meta = Some((schema_version, method));
                }
            }
            LogLine::Attempt(record) => {
                if meta.is_none() {
                    return Err(HarnessError::MissingMeta {
                        path: path.display().to_string(),
                    });
                }
                let key = (record.theorem_id.clone(), record.method, record.revision);
                match attempt_index.get(&key) {
                    Some(&at) => attempts[at] = record,
                    None => {
                        attempt_index.insert(key, attempts.len());
                        attempts.push(record);
                    }
                }
            }
            LogLine::Result(result) => {
                if meta.is_none() {
                    return Err(HarnessError::MissingMeta {
                        path: path.display().to_string(),
                    });
                }
                let key = (result.theorem_id.clone(), result.method);
                match result_index.get(&key) {
                    Some(&at) => results[at] = result,
                    None => {
                        result_index.insert(key, results.len());
                        results.push(result);
                    }
                }
            }
        }
    }

    let (schema_version, method) = meta.ok_or_else(|| HarnessError::MissingMeta {
        path: path.display().to_string(),
    })?;
    Ok(LoadedLog {
        schema_version,
        method,
        attempts,
        results,
    })
}
