//! The revision loop: one theorem in, a complete attempt trail out.
//!
//! [`Prover::prove`] runs the full pipeline — cold attempt, refinement over
//! annotated failures, and strategy diversification from the axiom tree at
//! the scheduled revisions. [`Prover::prove_repeated`] is the independent
//! resampling baseline: the same number of attempts, each a history-free
//! cold prompt.
//!
//! `prove*` never returns an error. Environment failures (backend gave up,
//! checker would not start, the attempt log is unwritable) stop the loop and
//! land in [`ProofResult::aborted`] with the revision that hit them; the
//! attempts that did run are always preserved, and every attempt is handed
//! to the [`AttemptSink`] before the loop continues, so a crash loses at
//! most the attempt in flight.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::axiom_tree::{parse_numbered_list, AxiomTree, LeafRequest, TreeParams};
use crate::feedback::{
    align_errors, analyze_rendered, annotate_subpropositions, render_history, strip_alignment,
    AnnotatedProof, Insight, DEFAULT_COMMENT_PREFIX,
};
use crate::gateway::{extract_code_block, Gateway, PromptRole, PromptVars};
use crate::schedule::{Mode, Schedule};
use crate::theorem::Theorem;
use crate::verifier::{Verdict, Verifier, VerifyMode};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub tree: TreeParams,
    #[serde(default = "default_comment_prefix")]
    pub comment_prefix: String,
    /// Character budget for the annotated history fed to analysis and
    /// refinement prompts; older attempts are elided first.
    #[serde(default = "default_history_char_budget")]
    pub history_char_budget: usize,
    /// Per-theorem wall clock budget. Checked between revisions.
    #[serde(default = "default_wall_budget_ms")]
    pub wall_budget_ms: u64,
    /// Withhold the context axioms from prompts (never from the verifier).
    #[serde(default)]
    pub strip_axioms: bool,
}

fn default_comment_prefix() -> String {
    DEFAULT_COMMENT_PREFIX.to_string()
}

fn default_history_char_budget() -> usize {
    20_000
}

fn default_wall_budget_ms() -> u64 {
    30 * 60 * 1000
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            schedule: Schedule::default(),
            tree: TreeParams::default(),
            comment_prefix: default_comment_prefix(),
            history_char_budget: default_history_char_budget(),
            wall_budget_ms: default_wall_budget_ms(),
            strip_axioms: false,
        }
    }
}

/// Everything that happened at one revision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub revision: usize,
    pub mode: Mode,
    /// The candidate proof, alignment comments stripped.
    pub proof: String,
    pub verdict: Verdict,
    /// Strategy text followed at a diversified attempt.
    pub strategy: Option<String>,
    /// First-level axiom indices behind the strategy's synthesized premise.
    pub leaf_combination: Option<Vec<usize>>,
    /// Failure analysis consumed by this attempt (refinements only).
    pub insight: Option<Insight>,
    /// Annotated form of this attempt's failure, as entered into history.
    pub annotated: Option<AnnotatedProof>,
    /// Model reply carried no code fence; the whole reply was taken.
    pub unfenced: bool,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofResult {
    pub theorem_id: String,
    pub domain: String,
    pub solved: bool,
    pub solved_at_revision: Option<usize>,
    pub attempts: Vec<AttemptRecord>,
    /// Environment failure that ended the run early, with its revision.
    pub aborted: Option<String>,
    pub tree_warnings: Vec<String>,
    pub wall_time_ms: u64,
}

/// Receives each attempt as soon as it is complete, before the loop moves
/// on, so partial progress survives a crash.
pub trait AttemptSink: Sync {
    fn record(&self, theorem: &Theorem, attempt: &AttemptRecord) -> std::io::Result<()>;
}

pub struct NullSink;

impl AttemptSink for NullSink {
    fn record(&self, _theorem: &Theorem, _attempt: &AttemptRecord) -> std::io::Result<()> {
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum RunKind {
    /// Full pipeline: feedback, analysis, diversification.
    Pipeline,
    /// Independent history-free attempts (the resampling baseline).
    Repeated,
}

struct AttemptOutput {
    proof: String,
    verdict: Verdict,
    strategy: Option<String>,
    leaf_combination: Option<Vec<usize>>,
    insight: Option<Insight>,
    unfenced: bool,
}

pub struct Prover<'a> {
    gateway: &'a Gateway,
    verifier: &'a dyn Verifier,
    config: &'a SessionConfig,
}

impl<'a> Prover<'a> {
    pub fn new(gateway: &'a Gateway, verifier: &'a dyn Verifier, config: &'a SessionConfig) -> Self {
        Prover {
            gateway,
            verifier,
            config,
        }
    }

    pub fn prove(&self, theorem: &Theorem, sink: &dyn AttemptSink) -> ProofResult {
        self.run(theorem, sink, RunKind::Pipeline)
    }

    pub fn prove_repeated(&self, theorem: &Theorem, sink: &dyn AttemptSink) -> ProofResult {
        self.run(theorem, sink, RunKind::Repeated)
    }

    fn run(&self, theorem: &Theorem, sink: &dyn AttemptSink, kind: RunKind) -> ProofResult {
        let started = Instant::now();
        let budget = Duration::from_millis(self.config.wall_budget_ms);
        let max_revisions = self.config.schedule.max_revisions;
        let prefix = &self.config.comment_prefix;

        let mut result = ProofResult {
            theorem_id: theorem.id.clone(),
            domain: theorem.domain.clone(),
            solved: false,
            solved_at_revision: None,
            attempts: Vec::new(),
            aborted: None,
            tree_warnings: Vec::new(),
            wall_time_ms: 0,
        };
        let mut history: Vec<AnnotatedProof> = Vec::new();
        let mut tree: Option<AxiomTree> = None;

        for r in 1..=max_revisions {
            if started.elapsed() >= budget {
                result.aborted = Some(format!(
                    "wall budget of {} ms exhausted before revision {r}",
                    self.config.wall_budget_ms
                ));
                break;
            }
            let attempt_started = Instant::now();
            let (mode, salt) = match kind {
                RunKind::Pipeline => (self.config.schedule.mode_for(r), None),
                RunKind::Repeated => (
                    Mode::Initial,
                    Some(format!("{}:attempt-{r}", theorem.id)),
                ),
            };

            let output = match self.attempt_revision(
                theorem,
                r,
                mode,
                &history,
                &mut tree,
                &mut result.tree_warnings,
                salt,
            ) {
                Ok(output) => output,
                Err(reason) => {
                    result.aborted = Some(format!("revision {r}: {reason}"));
                    break;
                }
            };
            let passed = output.verdict.passed();

            // Failed pipeline attempts enter the annotated history; the last
            // revision's failure has no next attempt to inform, so skip its
            // annotation calls.
            let mut annotation = None;
            let mut abort_after_record = None;
            if !passed && kind == RunKind::Pipeline && r < max_revisions {
                let aligned = align_errors(&output.proof, &output.verdict.diagnostics, prefix);
                match annotate_subpropositions(self.gateway, &aligned, prefix) {
                    Ok(annotated) => {
                        history.push(annotated.clone());
                        annotation = Some(annotated);
                    }
                    Err(e) => {
                        abort_after_record =
                            Some(format!("revision {r}: annotating failed attempt: {e}"));
                    }
                }
            }

            let attempt = AttemptRecord {
                revision: r,
                mode,
                proof: output.proof,
                verdict: output.verdict,
                strategy: output.strategy,
                leaf_combination: output.leaf_combination,
                insight: output.insight,
                annotated: annotation,
                unfenced: output.unfenced,
                wall_time_ms: attempt_started.elapsed().as_millis() as u64,
            };
            if let Err(e) = sink.record(theorem, &attempt) {
                result.attempts.push(attempt);
                result.aborted = Some(format!("revision {r}: recording attempt: {e}"));
                break;
            }
            result.attempts.push(attempt);

            if let Some(reason) = abort_after_record {
                result.aborted = Some(reason);
                break;
            }
            if passed {
                result.solved = true;
                result.solved_at_revision = Some(r);
                break;
            }
        }
        result.wall_time_ms = started.elapsed().as_millis() as u64;
        result
    }

    #[allow(clippy::too_many_arguments)]
    fn attempt_revision(
        &self,
        theorem: &Theorem,
        r: usize,
        mode: Mode,
        history: &[AnnotatedProof],
        tree: &mut Option<AxiomTree>,
        tree_warnings: &mut Vec<String>,
        salt: Option<String>,
    ) -> Result<AttemptOutput, String> {
        let theorem_text = theorem.prompt_text(self.config.strip_axioms);
        let mut vars = PromptVars::new();
        vars.insert("theorem".to_string(), theorem_text.clone());

        let mut strategy = None;
        let mut leaf_combination = None;
        let mut insight_used = None;

        match mode {
            Mode::Initial => {}
            Mode::Diversify => {
                if tree.is_none() {
                    *tree = Some(self.build_tree(&theorem_text, tree_warnings)?);
                }
                let tree = tree.as_mut().expect("just built");
                let leaf = match tree.next() {
                    Some(LeafRequest::Fresh { combination }) => {
                        let axiom =
                            self.synthesize_leaf(&theorem_text, tree.axioms_for(&combination))?;
                        tree.record_leaf(combination, axiom).clone()
                    }
                    Some(LeafRequest::Reuse { leaf }) => leaf,
                    None => {
                        tree_warnings.push(format!(
                            "revision {r}: no axioms available to diversify; attempting without a strategy"
                        ));
                        // Fall through to a plain cold prompt.
                        return self.generate_and_verify(theorem, vars, None, None, None, salt);
                    }
                };
                let mut sv = PromptVars::new();
                sv.insert("theorem".to_string(), theorem_text.clone());
                sv.insert("second_level_axiom".to_string(), leaf.axiom.clone());
                let reply = self
                    .gateway
                    .ask(PromptRole::ProposeStrategy, &sv)
                    .map_err(|e| e.to_string())?;
                let strategy_text = reply.text.trim().to_string();
                vars.insert("strategy".to_string(), strategy_text.clone());
                strategy = Some(strategy_text);
                leaf_combination = Some(leaf.combination);
            }
            Mode::Refine => {
                let rendered = render_history(history, self.config.history_char_budget);
                let insight = analyze_rendered(self.gateway, &theorem_text, &rendered)
                    .map_err(|e| e.to_string())?;
                vars.insert("insight".to_string(), insight.text.clone());
                vars.insert("annotated_history".to_string(), rendered.text);
                insight_used = Some(insight);
            }
        }

        self.generate_and_verify(theorem, vars, strategy, leaf_combination, insight_used, salt)
    }

    fn build_tree(
        &self,
        theorem_text: &str,
        tree_warnings: &mut Vec<String>,
    ) -> Result<AxiomTree, String> {
        let mut vars = PromptVars::new();
        vars.insert("theorem".to_string(), theorem_text.to_string());
        vars.insert("m_min".to_string(), self.config.tree.m_min.to_string());
        vars.insert("m_max".to_string(), self.config.tree.m_max.to_string());
        let reply = self
            .gateway
            .ask(PromptRole::ProposeAxioms, &vars)
            .map_err(|e| e.to_string())?;
        let axioms = parse_numbered_list(&reply.text);
        let tree = AxiomTree::new(axioms, &self.config.tree);
        tree_warnings.extend(tree.warnings().iter().cloned());
        Ok(tree)
    }

    fn synthesize_leaf(
        &self,
        theorem_text: &str,
        selected: Vec<&str>,
    ) -> Result<String, String> {
        let listed: String = selected
            .iter()
            .enumerate()
            .map(|(i, axiom)| format!("{}. {axiom}", i + 1))
            .collect::<Vec<_>>()
            .join("\n");
        let mut vars = PromptVars::new();
        vars.insert("theorem".to_string(), theorem_text.to_string());
        vars.insert("axioms".to_string(), listed);
        let reply = self
            .gateway
            .ask(PromptRole::SynthesizeAxiom, &vars)
            .map_err(|e| e.to_string())?;
        Ok(reply.text.trim().to_string())
    }

    fn generate_and_verify(
        &self,
        theorem: &Theorem,
        vars: PromptVars,
        strategy: Option<String>,
        leaf_combination: Option<Vec<usize>>,
        insight: Option<Insight>,
        salt: Option<String>,
    ) -> Result<AttemptOutput, String> {
        let response = self
            .gateway
            .ask_salted(PromptRole::GenerateProof, &vars, salt)
            .map_err(|e| e.to_string())?;
        let extracted = extract_code_block(&response.text);
        // Capture-time sanitization: a model that parrots feedback comments
        // back must not be able to poison the strip round-trip.
        let proof = strip_alignment(&extracted.code, &self.config.comment_prefix);
        let verdict = self
            .verifier
            .verify(&theorem.with_proof(&proof), VerifyMode::Strict)
            .map_err(|e| e.to_string())?;
        Ok(AttemptOutput {
            proof,
            verdict,
            strategy,
            leaf_combination,
            insight,
            unfenced: extracted.unfenced,
        })
    }
}
