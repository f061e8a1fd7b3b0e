//! Step one: model-translate a TPTP problem into a Lean 4 draft.
//!
//! The retry loop re-sends the original prompt with the failed check's
//! diagnostics appended, so the model sees what broke. Retries carry a
//! per-attempt salt: two retries may otherwise end up with byte-identical
//! prompts (same diagnostics twice in a row) and the response cache would
//! hand back the same broken translation forever.

use crate::gateway::{
    extract_code_block, render_prompt, vars, Decoding, Gateway, ModelRequest, PromptRole,
};
use crate::theorem::{Theorem, TheoremOrigin};
use crate::verifier::{Verifier, VerifyMode};

use super::tptp::{serialize_annotated, TptpProblem};
use super::{render_failure, DatasetError, LeanProblem, Provenance};

/// Translates one problem. The returned draft holds the whole translated
/// file in `conjecture_source`; [`super::postprocess`] separates context
/// from conjecture afterwards. `verified=false` with `translation_attempts
/// == max_attempts` means the budget ran out — the caller decides whether
/// that goes to a review queue or the bin.
pub fn translate_problem(
    gateway: &Gateway,
    verifier: &dyn Verifier,
    problem: &TptpProblem,
    name: &str,
    domain: &str,
    max_attempts: usize,
) -> Result<LeanProblem, DatasetError> {
    if max_attempts == 0 {
        return Err(DatasetError::Invalid(
            "translation needs at least one attempt".to_string(),
        ));
    }
    let conjectures: Vec<_> = problem.conjectures().collect();
    if conjectures.len() != 1 {
        return Err(DatasetError::Invalid(format!(
            "`{name}` has {} conjectures, expected exactly 1",
            conjectures.len()
        )));
    }

    let axioms_text = problem
        .axioms()
        .map(serialize_annotated)
        .collect::<Vec<_>>()
        .join("\n");
    let axioms_text = if axioms_text.is_empty() {
        "(none)".to_string()
    } else {
        axioms_text
    };
    let conjecture_text = serialize_annotated(conjectures[0]);

    let base = render_prompt(
        PromptRole::TranslateTptp,
        &vars([
            ("axioms", axioms_text.as_str()),
            ("conjecture", conjecture_text.as_str()),
        ]),
    )?;

    let mut previous_failure: Option<Vec<String>> = None;
    let mut last_code = String::new();
    let mut last_diagnostics = Vec::new();
    for attempt in 1..=max_attempts {
        let user = match &previous_failure {
            None => base.user.clone(),
            Some(lines) => format!(
                "{}\n\nPrevious attempt failed with:\n{}",
                base.user.trim_end(),
                lines.join("\n")
            ),
        };
        let request = ModelRequest {
            role: PromptRole::TranslateTptp,
            system: base.system.clone(),
            user,
            decoding: Decoding::for_role(PromptRole::TranslateTptp),
            salt: (attempt > 1).then(|| format!("{name}:translate-{attempt}")),
        };
        let response = gateway.invoke(&request)?;
        let code = extract_code_block(&response.text).code;
        let verdict = verifier.verify(&code, VerifyMode::Tolerant)?;
        if verdict.passed() {
            return Ok(draft(name, domain, code, attempt, true, Vec::new()));
        }
        let failure = render_failure(&verdict);
        previous_failure = Some(failure.clone());
        last_diagnostics = failure;
        last_code = code;
    }
    Ok(draft(
        name,
        domain,
        last_code,
        max_attempts,
        false,
        last_diagnostics,
    ))
}

fn draft(
    name: &str,
    domain: &str,
    code: String,
    attempts: usize,
    verified: bool,
    last_diagnostics: Vec<String>,
) -> LeanProblem {
    LeanProblem {
        theorem: Theorem {
            id: name.to_string(),
            domain: domain.to_string(),
            context_source: String::new(),
            conjecture_source: code,
            origin: TheoremOrigin::TptpRevised,
        },
        imports: Vec::new(),
        provenance: Provenance {
            translation_attempts: attempts,
            verified,
            last_diagnostics,
            ..Provenance::new(name)
        },
    }
}
