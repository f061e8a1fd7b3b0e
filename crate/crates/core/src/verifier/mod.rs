//! Proof verification: verdict model, checker-output parsing, placeholder
//! scanning, and the two backends (external checker subprocess, scripted
//! rule-table mock).
//!
//! All backends funnel through [`finalize_verdict`], which owns the verdict
//! invariant: a proof passes exactly when the checker exited successfully,
//! no error or warning diagnostics remain, and (in strict mode) no proof
//! placeholder survives outside comments and string literals.

pub mod diagnostics;
pub mod lean;
pub mod mock;
pub mod placeholder;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use diagnostics::{parse_checker_output, ParsedOutput};
pub use lean::{CommandVerifier, CommandVerifierConfig};
pub use mock::{MockOutcome, MockRule, MockVerifier};
pub use placeholder::scan_placeholders;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// Which stage produced a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticOrigin {
    /// Parsed from checker output.
    Checker,
    /// Found by the local placeholder scan.
    PlaceholderScan,
    /// Synthesized when the checker was killed at the deadline.
    Timeout,
}

/// Column numbering used by whoever reported the diagnostic. Columns are
/// recorded exactly as reported; this flag says how to read them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnConvention {
    ZeroBased,
    OneBased,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// 1-based source line.
    pub line: usize,
    /// As reported; interpret via `column_convention`.
    pub column: usize,
    pub column_convention: ColumnConvention,
    pub severity: Severity,
    pub message: String,
    pub origin: DiagnosticOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Sorted by (line, column); ties keep input order.
    pub diagnostics: Vec<Diagnostic>,
    /// Checker output lines that carried no parseable diagnostic.
    pub residual: Vec<String>,
    pub raw_output: String,
    pub raw_output_limit: usize,
    pub raw_output_truncated: bool,
    pub duration_ms: u64,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == VerdictStatus::Pass
    }

    pub fn timed_out(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.origin == DiagnosticOrigin::Timeout)
    }
}

/// Strict mode is the proving default; tolerant mode exists for dataset
/// construction, where statements deliberately end in `sorry`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    /// Placeholders fail the proof even when the checker accepts it.
    Strict,
    /// No placeholder scan; `declaration uses 'sorry'` warnings are dropped.
    Tolerant,
}

#[derive(Debug, Error)]
pub enum VerifierError {
    #[error("could not start checker `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("checker scratch space: {0}")]
    Io(#[from] std::io::Error),
    #[error("verifier configuration: {0}")]
    Config(String),
}

pub trait Verifier: Send + Sync {
    /// Stable identifier used in logs.
    fn id(&self) -> &str;

    /// Checks one complete source file. Environment failures (cannot spawn,
    /// cannot write scratch files) are `Err`; a failing proof — including a
    /// timeout — is an `Ok` verdict.
    fn verify(&self, source: &str, mode: VerifyMode) -> Result<Verdict, VerifierError>;
}

fn is_sorry_usage_warning(diagnostic: &Diagnostic) -> bool {
    diagnostic.severity == Severity::Warning
        && diagnostic.message.contains("declaration uses 'sorry'")
}

/// Builds the final verdict from backend facts. Applies the mode (placeholder
/// scan in strict, sorry-warning filter in tolerant), sorts diagnostics, caps
/// raw output, and derives the status.
pub fn finalize_verdict(
    source: &str,
    mode: VerifyMode,
    exit_success: bool,
    mut parsed: ParsedOutput,
    raw_output: String,
    raw_output_limit: usize,
    duration_ms: u64,
) -> Verdict {
    match mode {
        VerifyMode::Tolerant => {
            parsed.diagnostics.retain(|d| !is_sorry_usage_warning(d));
        }
        VerifyMode::Strict => {
            for hit in scan_placeholders(source) {
                parsed.diagnostics.push(Diagnostic {
                    line: hit.line,
                    column: hit.column,
                    column_convention: ColumnConvention::OneBased,
                    severity: Severity::Error,
                    message: format!(
                        "proof placeholder `{}` outside comments and strings",
                        hit.word
                    ),
                    origin: DiagnosticOrigin::PlaceholderScan,
                });
            }
        }
    }
    parsed.diagnostics.sort_by_key(|d| (d.line, d.column));

    let raw_output_truncated = raw_output.len() > raw_output_limit;
    let raw_output = if raw_output_truncated {
        let mut end = raw_output_limit;
        while !raw_output.is_char_boundary(end) {
            end -= 1;
        }
        raw_output[..end].to_string()
    } else {
        raw_output
    };

    let status = if exit_success && parsed.diagnostics.is_empty() {
        VerdictStatus::Pass
    } else {
        VerdictStatus::Fail
    };
    Verdict {
        status,
        diagnostics: parsed.diagnostics,
        residual: parsed.residual,
        raw_output,
        raw_output_limit,
        raw_output_truncated,
        duration_ms,
    }
}
