//! Headless toolkit for iterative first-order theorem proving with a model
//! in the loop: a revision pipeline that diversifies proof strategies
//! through a combinatorial axiom tree and refines failures through
//! sub-proposition error feedback, plus the dataset construction and
//! evaluation harness around it.

pub mod axiom_tree;
pub mod config;
pub mod dataset;
pub mod feedback;
pub mod gateway;
pub mod harness;
pub mod orchestrator;
pub mod schedule;
pub mod theorem;
pub mod verifier;

pub use axiom_tree::{binomial, combinations, AxiomTree, TreeParams};
pub use config::{ConfigError, RunConfig};
pub use dataset::{LeanProblem, Manifest, Provenance};
pub use feedback::{align_errors, strip_alignment, AnnotatedProof, Insight};
pub use gateway::{Backend, Gateway, ModelRequest, ModelResponse, PromptRole};
pub use harness::{run_experiment, Method, PassRate, RunOptions, RunSummary};
pub use orchestrator::{AttemptRecord, AttemptSink, NullSink, ProofResult, Prover, SessionConfig};
pub use schedule::{Mode, Schedule};
pub use theorem::{Theorem, TheoremOrigin};
pub use verifier::{Diagnostic, Verdict, VerdictStatus, Verifier, VerifyMode};
