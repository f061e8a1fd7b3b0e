//! The formal problem unit every other module operates on: a context of
//! definitions and axioms plus a conjecture statement awaiting a proof.

use serde::{Deserialize, Serialize};

/// Where a theorem came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremOrigin {
    /// Converted from a TPTP problem file.
    TptpRevised,
    /// Hand-collected and hand-translated.
    Manual,
}

/// A formal first-order theorem to prove.
///
/// `context_source` holds everything the conjecture depends on (imports,
/// type declarations, axiom definitions) as proof-assistant source;
/// `conjecture_source` holds the single theorem declaration, its body a
/// placeholder until a proof is found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem {
    pub id: String,
    /// Category label, e.g. `FLD1` or `GEO6`.
    pub domain: String,
    pub context_source: String,
    pub conjecture_source: String,
    pub origin: TheoremOrigin,
}

impl Theorem {
    /// Full source as the checker sees it, minus the proof: context then
    /// conjecture, separated by a blank line.
    pub fn full_source(&self) -> String {
        if self.context_source.trim().is_empty() {
            self.conjecture_source.clone()
        } else {
            format!(
                "{}\n\n{}",
                self.context_source.trim_end(),
                self.conjecture_source
            )
        }
    }

    /// Text of the problem as shown to the model. With `strip_axioms` set
    /// the context is withheld so the model must recall background facts
    /// itself; the verifier always compiles against the full context.
    pub fn prompt_text(&self, strip_axioms: bool) -> String {
        if strip_axioms || self.context_source.trim().is_empty() {
            self.conjecture_source.clone()
        } else {
            format!(
                "{}\n\n{}",
                self.context_source.trim_end(),
                self.conjecture_source
            )
        }
    }

    /// The source handed to the verifier for a candidate proof: always the
    /// full context, then the model's theorem-with-proof in place of the
    /// bare conjecture.
    pub fn with_proof(&self, proof: &str) -> String {
        if self.context_source.trim().is_empty() {
            proof.to_string()
        } else {
            format!("{}\n\n{}", self.context_source.trim_end(), proof)
        }
    }
}
