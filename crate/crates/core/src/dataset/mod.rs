//! Dataset construction: TPTP problems in, one verified theorem file out,
//! plus the manifest that indexes a finished dataset.
//!
//! The pipeline is three steps — translate (model), post-process (split
//! context from conjecture, placeholder body), optimize (model-proposed
//! context reduction, accepted only if it still compiles) — with the
//! placeholder-tolerant verifier as the gate after each one.

pub mod tptp;

mod manifest;
mod optimize;
mod pipeline;
mod postprocess;
mod translate;

pub use manifest::{Manifest, ManifestEntry, ValidationReport};
pub use optimize::optimize_context;
pub use pipeline::{convert_dir, convert_file, ConvertOptions, ConvertReport};
pub use postprocess::postprocess;
pub use translate::translate_problem;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::GatewayError;
use crate::theorem::Theorem;
use crate::verifier::VerifierError;

/// How a theorem file came to be. Travels with the theorem so reviewers can
/// trace any file back to its TPTP source and conversion history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tptp_name: String,
    pub translation_attempts: usize,
    pub verified: bool,
    pub optimized: bool,
    /// Proof body that post-processing replaced with the placeholder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archived_body: Option<String>,
    /// Why a proposed context reduction was not taken.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize_rejection: Option<String>,
    /// Rendered diagnostics from the last failed check when `verified` is
    /// false.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub last_diagnostics: Vec<String>,
}

impl Provenance {
    pub fn new(tptp_name: impl Into<String>) -> Provenance {
        Provenance {
            tptp_name: tptp_name.into(),
            translation_attempts: 0,
            verified: false,
            optimized: false,
            archived_body: None,
            optimize_rejection: None,
            last_diagnostics: Vec::new(),
        }
    }
}

/// One dataset entry: the theorem, the import lines its context opens with,
/// and its conversion record. This is what gets serialized to each per-theorem
/// JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeanProblem {
    pub theorem: Theorem,
    pub imports: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Tptp(#[from] tptp::TptpError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
    /// The translated file does not have the shape post-processing needs
    /// (exactly one theorem declaration with a `:=` body); routed to manual
    /// review rather than retried.
    #[error("structure: {0}")]
    Structure(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

/// Renders a verdict's failure evidence for retry prompts and provenance
/// records: one line per diagnostic, falling back to residual checker lines,
/// then to raw output.
pub(crate) fn render_failure(verdict: &crate::verifier::Verdict) -> Vec<String> {
    if !verdict.diagnostics.is_empty() {
        verdict
            .diagnostics
            .iter()
            .map(|d| {
                format!(
                    "line {}, col {}: {}: {}",
                    d.line,
                    d.column,
                    match d.severity {
                        crate::verifier::Severity::Error => "error",
                        crate::verifier::Severity::Warning => "warning",
                    },
                    d.message
                )
            })
            .collect()
    } else if !verdict.residual.is_empty() {
        verdict.residual.clone()
    } else if !verdict.raw_output.trim().is_empty() {
        vec![verdict.raw_output.trim().to_string()]
    } else {
        vec!["checker failed without diagnostics".to_string()]
    }
}
