//! Scripted verifier for hermetic runs.
//!
//! A rule table maps source patterns to canned outcomes: the first matching
//! rule decides, and sources matching nothing get the configurable default
//! (reject, out of the box). Canned failures are rendered into checker-style
//! raw output and then parsed through the same path the real adapter uses,
//! so mock verdicts exercise the full pipeline.

use std::path::Path;
use std::time::Instant;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{
    finalize_verdict, parse_checker_output, ColumnConvention, Severity, Verdict, VerifierError,
    Verifier, VerifyMode,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockMatcher {
    /// Matches when the source equals the pattern byte-for-byte.
    Exact(String),
    /// Matches when the source contains the pattern.
    Contains(String),
    /// Matches when the regex finds a match anywhere in the source.
    Regex(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CannedDiagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockOutcome {
    Pass,
    Fail { diagnostics: Vec<CannedDiagnostic> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MockRule {
    pub name: String,
    pub matcher: MockMatcher,
    pub outcome: MockOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MockVerifierConfig {
    #[serde(default)]
    pub rules: Vec<MockRule>,
    #[serde(default = "default_reject")]
    pub default_outcome: MockOutcome,
}

fn default_reject() -> MockOutcome {
    MockOutcome::Fail {
        diagnostics: vec![CannedDiagnostic {
            line: 1,
            column: 1,
            severity: Severity::Error,
            message: "no mock rule matched this source".to_string(),
        }],
    }
}

pub struct MockVerifier {
    id: String,
    config: MockVerifierConfig,
    compiled: Vec<Option<Regex>>,
}

impl MockVerifier {
    pub fn new(config: MockVerifierConfig) -> Result<MockVerifier, VerifierError> {
        let compiled = config
            .rules
            .iter()
            .map(|rule| match &rule.matcher {
                MockMatcher::Regex(pattern) => Regex::new(pattern).map(Some).map_err(|e| {
                    VerifierError::Config(format!("rule `{}`: bad regex: {e}", rule.name))
                }),
                _ => Ok(None),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MockVerifier {
            id: "mock".to_string(),
            config,
            compiled,
        })
    }

    pub fn from_path(path: &Path) -> Result<MockVerifier, VerifierError> {
        let text = std::fs::read_to_string(path)?;
        let config: MockVerifierConfig = serde_json::from_str(&text)
            .map_err(|e| VerifierError::Config(format!("{}: {e}", path.display())))?;
        let mut verifier = MockVerifier::new(config)?;
        verifier.id = format!("mock:{}", path.display());
        Ok(verifier)
    }

    /// Accept-everything table; handy for tests that only exercise the
    /// placeholder gate.
    pub fn accept_all() -> MockVerifier {
        MockVerifier::new(MockVerifierConfig {
            rules: vec![MockRule {
                name: "accept-all".to_string(),
                matcher: MockMatcher::Regex(".?".to_string()),
                outcome: MockOutcome::Pass,
            }],
            default_outcome: MockOutcome::Pass,
        })
        .expect("static regex compiles")
    }

    fn outcome_for(&self, source: &str) -> &MockOutcome {
        for (rule, compiled) in self.config.rules.iter().zip(&self.compiled) {
            let matched = match &rule.matcher {
                MockMatcher::Exact(pattern) => source == pattern,
                MockMatcher::Contains(pattern) => source.contains(pattern),
                MockMatcher::Regex(_) => {
                    compiled.as_ref().expect("compiled with rule").is_match(source)
                }
            };
            if matched {
                return &rule.outcome;
            }
        }
        &self.config.default_outcome
    }
}

impl Verifier for MockVerifier {
    fn id(&self) -> &str {
        &self.id
    }

    fn verify(&self, source: &str, mode: VerifyMode) -> Result<Verdict, VerifierError> {
        let started = Instant::now();
        let (exit_success, raw_output) = match self.outcome_for(source) {
            MockOutcome::Pass => (true, String::new()),
            MockOutcome::Fail { diagnostics } => {
                let rendered: String = diagnostics
                    .iter()
                    .map(|d| {
                        let severity = match d.severity {
                            Severity::Error => "error",
                            Severity::Warning => "warning",
                        };
                        format!("Mock.lean:{}:{}: {severity}: {}\n", d.line, d.column, d.message)
                    })
                    .collect();
                (false, rendered)
            }
        };
        let parsed = parse_checker_output(&raw_output, ColumnConvention::OneBased);
        Ok(finalize_verdict(
            source,
            mode,
            exit_success,
            parsed,
            raw_output,
            65536,
            started.elapsed().as_millis() as u64,
        ))
    }
}
