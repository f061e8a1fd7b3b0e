//! Step three: model-proposed context reduction.
//!
//! The proposal is accepted only when (a) every non-blank proposed line is
//! one of the original context's lines, in order — the model may delete,
//! never rewrite — and (b) the reduced file still checks. Anything else,
//! including a gateway failure, degrades to the unoptimized problem with
//! the rejection reason recorded.

use crate::gateway::{extract_code_block, vars, Gateway, PromptRole};
use crate::verifier::{Verifier, VerifyMode};

use super::LeanProblem;

fn is_line_subsequence(reduced: &str, original: &str) -> bool {
    let mut candidates = original.split('\n');
    'lines: for line in reduced.split('\n').filter(|l| !l.trim().is_empty()) {
        for candidate in candidates.by_ref() {
            if candidate == line {
                continue 'lines;
            }
        }
        return false;
    }
    true
}

fn rejected(problem: &LeanProblem, reason: String) -> LeanProblem {
    let mut out = problem.clone();
    out.provenance.optimized = false;
    out.provenance.optimize_rejection = Some(reason);
    out
}

pub fn optimize_context(
    gateway: &Gateway,
    verifier: &dyn Verifier,
    problem: &LeanProblem,
) -> LeanProblem {
    if !problem.provenance.verified {
        return rejected(problem, "skipped: problem is not verified".to_string());
    }
    let response = match gateway.ask(
        PromptRole::OptimizeContext,
        &vars([
            ("context", problem.theorem.context_source.as_str()),
            ("conjecture", problem.theorem.conjecture_source.as_str()),
        ]),
    ) {
        Ok(r) => r,
        Err(e) => return rejected(problem, format!("gateway: {e}")),
    };
    let reduced = extract_code_block(&response.text).code;
    let reduced = if reduced.trim().is_empty() {
        String::new()
    } else {
        format!("{}\n", reduced.trim_end())
    };

    if !is_line_subsequence(&reduced, &problem.theorem.context_source) {
        return rejected(
            problem,
            "proposal is not a line subsequence of the original context".to_string(),
        );
    }

    let mut candidate = problem.clone();
    candidate.theorem.context_source = reduced;
    candidate.imports = candidate
        .theorem
        .context_source
        .split('\n')
        .filter(|l| l.trim_start().starts_with("import "))
        .map(|l| l.trim().to_string())
        .collect();

    match verifier.verify(&candidate.theorem.full_source(), VerifyMode::Tolerant) {
        Ok(verdict) if verdict.passed() => {
            candidate.provenance.optimized = true;
            candidate.provenance.optimize_rejection = None;
            candidate
        }
        Ok(_) => rejected(
            problem,
            "reduced context no longer checks".to_string(),
        ),
        Err(e) => rejected(problem, format!("verifier: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::Provenance;
    use super::*;
    use crate::gateway::ScriptedBackend;
    use crate::theorem::{Theorem, TheoremOrigin};
    use crate::verifier::mock::{MockMatcher, MockVerifierConfig};
    use crate::verifier::{MockOutcome, MockRule, MockVerifier};

    const CONTEXT: &str = "import A\n\naxiom needed : Prop\naxiom unused : Prop\n";

    fn verified_problem() -> LeanProblem {
        LeanProblem {
            theorem: Theorem {
                id: "T1".into(),
                domain: "GEO6".into(),
                context_source: CONTEXT.to_string(),
                conjecture_source: "theorem t : needed := sorry".into(),
                origin: TheoremOrigin::TptpRevised,
            },
            imports: vec!["import A".into()],
            provenance: Provenance {
                translation_attempts: 1,
                verified: true,
                ..Provenance::new("GEO001+1")
            },
        }
    }

    fn needs_axiom_verifier() -> MockVerifier {
        MockVerifier::new(MockVerifierConfig {
            rules: vec![MockRule {
                name: "needs-axiom".into(),
                matcher: MockMatcher::Contains("axiom needed : Prop".into()),
                outcome: MockOutcome::Pass,
            }],
            default_outcome: MockOutcome::Fail {
                diagnostics: Vec::new(),
            },
        })
        .unwrap()
    }

    fn gateway_replying(reply: &str) -> (Arc<ScriptedBackend>, Gateway) {
        let backend = Arc::new(ScriptedBackend::from_pairs([("OptimizeContext:*", reply)]));
        let gateway = Gateway::new(backend.clone());
        (backend, gateway)
    }

    #[test]
    fn verifying_subset_is_accepted() {
        let (_, gateway) = gateway_replying("```lean\nimport A\n\naxiom needed : Prop\n```");
        let out = optimize_context(&gateway, &needs_axiom_verifier(), &verified_problem());
        assert!(out.provenance.optimized);
        assert_eq!(
            out.theorem.context_source,
            "import A\n\naxiom needed : Prop\n"
        );
        assert_eq!(out.imports, vec!["import A"]);
        assert!(out.provenance.optimize_rejection.is_none());
    }

    #[test]
    fn dropping_a_needed_axiom_is_rejected() {
        let (_, gateway) = gateway_replying("```lean\nimport A\n\naxiom unused : Prop\n```");
        let original = verified_problem();
        let out = optimize_context(&gateway, &needs_axiom_verifier(), &original);
        assert!(!out.provenance.optimized);
        assert_eq!(out.theorem.context_source, original.theorem.context_source);
        assert!(out
            .provenance
            .optimize_rejection
            .as_deref()
            .unwrap()
            .contains("no longer checks"));
    }

    #[test]
    fn echoed_context_is_accepted_byte_identical() {
        let reply = format!("```lean\n{CONTEXT}```");
        let (_, gateway) = gateway_replying(&reply);
        let out = optimize_context(&gateway, &needs_axiom_verifier(), &verified_problem());
        assert!(out.provenance.optimized);
        assert_eq!(out.theorem.context_source, CONTEXT);
    }

    #[test]
    fn rewritten_lines_are_rejected_even_if_they_check() {
        let (_, gateway) =
            gateway_replying("```lean\naxiom needed : Prop\naxiom invented : Prop\n```");
        let out = optimize_context(&gateway, &MockVerifier::accept_all(), &verified_problem());
        assert!(!out.provenance.optimized);
        assert!(out
            .provenance
            .optimize_rejection
            .as_deref()
            .unwrap()
            .contains("line subsequence"));
    }

    #[test]
    fn reordered_lines_are_rejected() {
        let (_, gateway) =
            gateway_replying("```lean\naxiom unused : Prop\naxiom needed : Prop\n```");
        let out = optimize_context(&gateway, &MockVerifier::accept_all(), &verified_problem());
        assert!(!out.provenance.optimized);
    }

    #[test]
    fn gateway_failure_degrades_to_the_original() {
        let backend = Arc::new(ScriptedBackend::from_pairs([("GenerateProof:1", "x")]));
        let gateway = Gateway::new(backend);
        let original = verified_problem();
        let out = optimize_context(&gateway, &MockVerifier::accept_all(), &original);
        assert!(!out.provenance.optimized);
        assert_eq!(out.theorem, original.theorem);
        assert!(out
            .provenance
            .optimize_rejection
            .as_deref()
            .unwrap()
            .starts_with("gateway:"));
    }

    #[test]
    fn unverified_problems_are_skipped() {
        let mut problem = verified_problem();
        problem.provenance.verified = false;
        let (backend, gateway) = gateway_replying("```lean\n```");
        let out = optimize_context(&gateway, &MockVerifier::accept_all(), &problem);
        assert!(!out.provenance.optimized);
        assert!(backend.requests().is_empty());
    }
}
