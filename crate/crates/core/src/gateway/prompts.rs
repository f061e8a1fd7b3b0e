//! Prompt templates and rendering.
//!
//! Templates live as plain text files under `prompts/` and are compiled into
//! the binary. Each file holds the system text, a `---USER---` separator
//! line, and the user text. Placeholders are `{lower_snake_case}` names;
//! substituted values are inserted verbatim and never rescanned, so braces in
//! proof sources cannot re-trigger substitution.

use std::collections::BTreeMap;

use super::{GatewayError, PromptRole};

pub type PromptVars = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub system: String,
    pub user: String,
}

const PROPOSE_AXIOMS: &str = include_str!("../../prompts/propose_axioms.txt");
const SYNTHESIZE_AXIOM: &str = include_str!("../../prompts/synthesize_axiom.txt");
const PROPOSE_STRATEGY: &str = include_str!("../../prompts/propose_strategy.txt");
const GENERATE_PROOF_INITIAL: &str = include_str!("../../prompts/generate_proof_initial.txt");
const GENERATE_PROOF_STRATEGY: &str = include_str!("../../prompts/generate_proof_strategy.txt");
const GENERATE_PROOF_REFINE: &str = include_str!("../../prompts/generate_proof_refine.txt");
const ANNOTATE_SUBPROPOSITIONS: &str = include_str!("../../prompts/annotate_subpropositions.txt");
const ANALYZE_FAILURES: &str = include_str!("../../prompts/analyze_failures.txt");
const TRANSLATE_TPTP: &str = include_str!("../../prompts/translate_tptp.txt");
const OPTIMIZE_CONTEXT: &str = include_str!("../../prompts/optimize_context.txt");

const USER_SEPARATOR: &str = "---USER---";

/// Picks the template text for a role. `GenerateProof` has three variants
/// selected by which inputs the caller supplied: a strategy (diversified
/// attempt), an insight (refinement of earlier failures), or neither (first
/// attempt).
fn template_for(role: PromptRole, vars: &PromptVars) -> &'static str {
    match role {
        PromptRole::ProposeAxioms => PROPOSE_AXIOMS,
        PromptRole::SynthesizeAxiom => SYNTHESIZE_AXIOM,
        PromptRole::ProposeStrategy => PROPOSE_STRATEGY,
        PromptRole::GenerateProof => {
            if vars.contains_key("strategy") {
                GENERATE_PROOF_STRATEGY
            } else if vars.contains_key("insight") {
                GENERATE_PROOF_REFINE
            } else {
                GENERATE_PROOF_INITIAL
            }
        }
        PromptRole::AnnotateSubpropositions => ANNOTATE_SUBPROPOSITIONS,
        PromptRole::AnalyzeFailures => ANALYZE_FAILURES,
        PromptRole::TranslateTptp => TRANSLATE_TPTP,
        PromptRole::OptimizeContext => OPTIMIZE_CONTEXT,
    }
}

/// Variables that must carry actual content when present; an empty value is
/// a caller bug, not a renderable prompt.
fn must_be_nonempty(role: PromptRole, name: &str) -> bool {
    matches!(
        (role, name),
        (PromptRole::AnalyzeFailures, "annotated_history")
            | (PromptRole::GenerateProof, "annotated_history")
            | (PromptRole::AnnotateSubpropositions, "aligned_source")
    )
}

fn substitute(role: PromptRole, template: &str, vars: &PromptVars) -> Result<String, GatewayError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = match after.find('}') {
            Some(i) => i,
            None => {
                out.push('{');
                rest = after;
                continue;
            }
        };
        let name = &after[..close];
        let is_placeholder = !name.is_empty()
            && name.chars().next().unwrap().is_ascii_lowercase()
            && name
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if is_placeholder {
            let value = vars.get(name).ok_or_else(|| GatewayError::MissingVariable {
                role,
                variable: name.to_string(),
            })?;
            if value.trim().is_empty() && must_be_nonempty(role, name) {
                return Err(GatewayError::EmptyVariable {
                    role,
                    variable: name.to_string(),
                });
            }
            out.push_str(value);
        } else {
            out.push('{');
            out.push_str(name);
            out.push('}');
        }
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Renders the system and user halves of a role's template over `vars`.
pub fn render_prompt(role: PromptRole, vars: &PromptVars) -> Result<RenderedPrompt, GatewayError> {
    let template = template_for(role, vars);
    let (system, user) = match template.split_once(&format!("{USER_SEPARATOR}\n")) {
        Some((s, u)) => (s, u),
        None => ("", template),
    };
    Ok(RenderedPrompt {
        system: substitute(role, system, vars)?.trim().to_string(),
        user: substitute(role, user, vars)?.trim().to_string(),
    })
}

/// Convenience for building a [`PromptVars`] map from pairs.
pub fn vars<const N: usize>(pairs: [(&str, &str); N]) -> PromptVars {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
