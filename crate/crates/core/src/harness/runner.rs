//! Batch experiment driver: a shared work queue of theorems, one prover per
//! worker thread, all appending to one run log.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::orchestrator::Prover;
use crate::theorem::Theorem;

use super::log::{read_log, LogSink, RunLog, TheoremResult};
use super::{HarnessError, Method};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub method: Method,
    /// Worker threads; revisions within a theorem stay sequential.
    pub parallel: usize,
    /// Skip theorems whose result line is already in the log, appending to
    /// it instead of starting over.
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            method: Method::Dream,
            parallel: 1,
            resume: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub attempted: usize,
    pub solved: usize,
    pub aborted: usize,
    /// Theorems skipped because the log already holds their result.
    pub skipped: usize,
}

pub fn run_experiment(
    prover: &Prover,
    theorems: &[Theorem],
    log_path: &Path,
    options: &RunOptions,
) -> Result<RunSummary, HarnessError> {
    let completed: BTreeSet<String> = if options.resume && log_path.exists() {
        read_log(log_path)?
            .completed_ids()
            .map(str::to_string)
            .collect()
    } else {
        BTreeSet::new()
    };
    let log = if options.resume {
        RunLog::append(log_path, options.method)?
    } else {
        RunLog::create(log_path, options.method)?
    };

    let pending: Vec<&Theorem> = theorems
        .iter()
        .filter(|t| !completed.contains(&t.id))
        .collect();
    let skipped = theorems.len() - pending.len();

    let next = AtomicUsize::new(0);
    let solved = AtomicUsize::new(0);
    let aborted = AtomicUsize::new(0);
    let write_error: Mutex<Option<std::io::Error>> = Mutex::new(None);
    let workers = options.parallel.clamp(1, pending.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let sink = LogSink {
                    log: &log,
                    method: options.method,
                };
                loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(theorem) = pending.get(i) else {
                        break;
                    };
                    let result = match options.method {
                        Method::Dream => prover.prove(theorem, &sink),
                        Method::Repeated => prover.prove_repeated(theorem, &sink),
                    };
                    if result.solved {
                        solved.fetch_add(1, Ordering::SeqCst);
                    }
                    if result.aborted.is_some() {
                        aborted.fetch_add(1, Ordering::SeqCst);
                    }
                    let line = TheoremResult::from_proof_result(&result, options.method);
                    if let Err(e) = log.record_result(&line) {
                        let mut slot = write_error.lock().expect("write error slot");
                        slot.get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = write_error.into_inner().expect("write error slot").take() {
        return Err(HarnessError::Io {
            path: log_path.display().to_string(),
            source: e,
        });
    }
    Ok(RunSummary {
        attempted: pending.len(),
        solved: solved.load(Ordering::SeqCst),
        aborted: aborted.load(Ordering::SeqCst),
        skipped,
    })
}
