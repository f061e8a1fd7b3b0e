//! Sub-proposition error feedback.
//!
//! Failed proofs are fed back to the model with checker diagnostics inlined
//! as comment lines directly under the lines they blame, the model adds
//! comments naming the defeated sub-propositions, and an analysis pass over
//! the annotated history produces the insight that steers the next attempt.
//!
//! Everything inserted here is a line starting exactly with the comment
//! prefix, and inserted lines never contain newlines, so removing all
//! prefix-lines recovers the original proof byte-for-byte (provided the
//! original had no prefix-lines of its own — [`strip_alignment`] is applied
//! to model output at capture time to guarantee that).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::gateway::{extract_code_block, Gateway, GatewayError, PromptRole, PromptVars};
use crate::verifier::{Diagnostic, Severity};

pub const DEFAULT_COMMENT_PREFIX: &str = "-- [DREAM]";

/// A failed proof with sub-proposition annotations, as kept in the revision
/// history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedProof {
    pub text: String,
    /// Comment lines the model added beyond the inlined diagnostics.
    pub annotation_count: usize,
    /// Comment lines carrying aligned diagnostics; validation guarantees all
    /// of them survive in `text`.
    pub error_comment_count: usize,
    /// True when the model's annotation failed validation twice and the
    /// plain error-aligned source was kept instead.
    pub fallback: bool,
}

/// Analysis of the failures so far, used to steer the next refinement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Insight {
    pub text: String,
    /// SHA-256 of the exact history text the analysis saw (after any
    /// elision), so runs can prove what the insight was based on.
    pub inputs_digest: String,
    /// Annotated attempts dropped to fit the character budget.
    pub elided_attempts: usize,
}

/// Inserts one comment line per diagnostic immediately after the source line
/// it blames. Diagnostics on the same line appear in (column, input) order;
/// diagnostics pointing outside the source attach after the last line with a
/// range note. Messages are flattened to one line.
pub fn align_errors(source: &str, diagnostics: &[Diagnostic], prefix: &str) -> String {
    let lines: Vec<&str> = source.split('\n').collect();
    // A trailing newline yields one empty final segment; it is not a line.
    let content_lines = match lines.last() {
        Some(&"") => lines.len() - 1,
        _ => lines.len(),
    };

    let mut in_range: Vec<Vec<&Diagnostic>> = vec![Vec::new(); content_lines];
    let mut out_of_range: Vec<&Diagnostic> = Vec::new();
    for diagnostic in diagnostics {
        if diagnostic.line >= 1 && diagnostic.line <= content_lines {
            in_range[diagnostic.line - 1].push(diagnostic);
        } else {
            out_of_range.push(diagnostic);
        }
    }
    for bucket in &mut in_range {
        bucket.sort_by_key(|d| d.column);
    }

    let comment = |d: &Diagnostic, note: &str| {
        let severity = match d.severity {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        };
        let message = d.message.replace(['\n', '\r'], " ");
        format!(
            "{prefix} {severity}(line {}, col {}): {message}{note}",
            d.line, d.column
        )
    };

    let mut out: Vec<String> = Vec::with_capacity(lines.len() + diagnostics.len());
    for (i, line) in lines.iter().take(content_lines).enumerate() {
        out.push((*line).to_string());
        for d in &in_range[i] {
            out.push(comment(d, ""));
        }
        if i + 1 == content_lines {
            for d in &out_of_range {
                out.push(comment(d, " (reported line is outside the source)"));
            }
        }
    }
    if content_lines == 0 {
        for d in &out_of_range {
            out.push(comment(d, " (reported line is outside the source)"));
        }
    }
    if lines.last() == Some(&"") {
        out.push(String::new());
    }
    out.join("\n")
}

/// Removes every line starting with `prefix`. Inverse of [`align_errors`]
/// and of any well-formed annotation pass.
pub fn strip_alignment(text: &str, prefix: &str) -> String {
    let lines: Vec<&str> = text
        .split('\n')
        .filter(|line| !line.starts_with(prefix))
        .collect();
    lines.join("\n")
}

pub fn count_prefix_lines(text: &str, prefix: &str) -> usize {
    text.split('\n').filter(|line| line.starts_with(prefix)).count()
}

/// An annotation is valid when deleting its comment lines reproduces the
/// error-aligned input's own non-comment lines exactly (nothing reworded,
/// reordered, added, or dropped) and every comment line the aligner inserted
/// survives in order. The model may only add comments, never lose an error.
pub fn validate_annotation(candidate: &str, aligned: &str, prefix: &str) -> bool {
    if strip_alignment(candidate, prefix) != strip_alignment(aligned, prefix) {
        return false;
    }
    let mut kept = candidate.split('\n').filter(|line| line.starts_with(prefix));
    aligned
        .split('\n')
        .filter(|line| line.starts_with(prefix))
        .all(|inserted| kept.by_ref().any(|line| line == inserted))
}

/// Asks the model to annotate an error-aligned proof, validating that it
/// only added comment lines. One corrective retry; if that also fails, the
/// plain aligned source is kept so the pipeline never loses the error
/// feedback itself.
pub fn annotate_subpropositions(
    gateway: &Gateway,
    aligned: &str,
    prefix: &str,
) -> Result<AnnotatedProof, GatewayError> {
    let mut vars = PromptVars::new();
    vars.insert("aligned_source".to_string(), aligned.to_string());
    vars.insert("comment_prefix".to_string(), prefix.to_string());

    let base_count = count_prefix_lines(aligned, prefix);
    for attempt in 0..2 {
        if attempt == 1 {
            vars.insert(
                "aligned_source".to_string(),
                format!(
                    "{aligned}\n{prefix} NOTE: your previous annotation modified non-comment \
                     lines; reproduce every non-comment line unchanged"
                ),
            );
        }
        let response = gateway.ask(PromptRole::AnnotateSubpropositions, &vars)?;
        let candidate = extract_code_block(&response.text).code;
        if validate_annotation(&candidate, aligned, prefix) {
            let added = count_prefix_lines(&candidate, prefix).saturating_sub(base_count);
            return Ok(AnnotatedProof {
                text: candidate,
                annotation_count: added,
                error_comment_count: base_count,
                fallback: false,
            });
        }
    }
    Ok(AnnotatedProof {
        text: aligned.to_string(),
        annotation_count: 0,
        error_comment_count: base_count,
        fallback: true,
    })
}

/// The rendered history plus provenance for the insight built on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedHistory {
    pub text: String,
    pub elided_attempts: usize,
}

/// Joins annotated attempts oldest-first (so the newest sits right above the
/// model's continuation point). When the total exceeds `char_budget`, whole
/// attempts are elided oldest-first and a note says how many.
pub fn render_history(attempts: &[AnnotatedProof], char_budget: usize) -> RenderedHistory {
    fn render(attempts: &[AnnotatedProof], first_index: usize, elided: usize) -> String {
        let mut blocks = Vec::with_capacity(attempts.len() + 1);
        if elided > 0 {
            blocks.push(format!("[{elided} earlier attempt(s) elided to fit the budget]"));
        }
        for (offset, attempt) in attempts.iter().enumerate() {
            blocks.push(format!(
                "### Attempt {}\n{}",
                first_index + offset,
                attempt.text
            ));
        }
        blocks.join("\n\n")
    }

    let mut skip = 0;
    loop {
        let text = render(&attempts[skip..], skip + 1, skip);
        if text.chars().count() <= char_budget || skip == attempts.len() {
            return RenderedHistory {
                text,
                elided_attempts: skip,
            };
        }
        skip += 1;
    }
}

/// Runs the failure analysis over an already rendered history. Split out so
/// a caller that also feeds the history into the next proof prompt analyzes
/// exactly the text it will send.
pub fn analyze_rendered(
    gateway: &Gateway,
    theorem_text: &str,
    history: &RenderedHistory,
) -> Result<Insight, GatewayError> {
    let mut vars = PromptVars::new();
    vars.insert("theorem".to_string(), theorem_text.to_string());
    vars.insert("annotated_history".to_string(), history.text.clone());
    let response = gateway.ask(PromptRole::AnalyzeFailures, &vars)?;

    let mut hasher = Sha256::new();
    hasher.update(history.text.as_bytes());
    Ok(Insight {
        text: response.text.trim().to_string(),
        inputs_digest: format!("{:x}", hasher.finalize()),
        elided_attempts: history.elided_attempts,
    })
}

/// Renders the annotated history and runs the failure analysis over it.
pub fn analyze_failures(
    gateway: &Gateway,
    theorem_text: &str,
    attempts: &[AnnotatedProof],
    char_budget: usize,
) -> Result<Insight, GatewayError> {
    let history = render_history(attempts, char_budget);
    analyze_rendered(gateway, theorem_text, &history)
}
