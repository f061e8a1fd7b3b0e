//! External checker adapter.
//!
//! Runs a configured command (a Lean toolchain invocation in practice)
//! against the candidate source. Each compile gets its own scratch
//! directory; the source is written there and the command template's
//! `{file}` / `{root}` slots are filled in. Checker output goes to files
//! rather than pipes so a chatty compiler can never deadlock the poll loop,
//! which waits with `try_wait` and kills the child at the deadline, turning
//! the overrun into a synthetic timeout diagnostic instead of an error.

use std::fs::File;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{
    finalize_verdict, parse_checker_output, ColumnConvention, Diagnostic, DiagnosticOrigin,
    ParsedOutput, Severity, Verdict, Verifier, VerifierError, VerifyMode,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommandVerifierConfig {
    /// Program and arguments; `{file}` expands to the candidate source path,
    /// `{root}` to the project root.
    pub command: Vec<String>,
    /// Working directory for the checker (a Lean project root). Defaults to
    /// the scratch directory.
    #[serde(default)]
    pub root: Option<PathBuf>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "default_raw_output_limit")]
    pub raw_output_limit: usize,
    #[serde(default = "default_column_convention")]
    pub column_convention: ColumnConvention,
    /// Retain each compile's scratch directory instead of deleting it; the
    /// kept path is announced on stderr.
    #[serde(default)]
    pub keep_artifacts: bool,
}

fn default_timeout_ms() -> u64 {
    300_000
}

fn default_raw_output_limit() -> usize {
    65536
}

fn default_column_convention() -> ColumnConvention {
    // Lean 4 counts columns from zero.
    ColumnConvention::ZeroBased
}

impl Default for CommandVerifierConfig {
    fn default() -> Self {
        CommandVerifierConfig {
            command: vec![
                "lake".to_string(),
                "env".to_string(),
                "lean".to_string(),
                "{file}".to_string(),
            ],
            root: None,
            timeout_ms: default_timeout_ms(),
            raw_output_limit: default_raw_output_limit(),
            column_convention: default_column_convention(),
            keep_artifacts: false,
        }
    }
}

pub struct CommandVerifier {
    id: String,
    config: CommandVerifierConfig,
}

impl CommandVerifier {
    pub fn new(id: impl Into<String>, config: CommandVerifierConfig) -> Result<Self, VerifierError> {
        if config.command.is_empty() {
            return Err(VerifierError::Config("checker command is empty".into()));
        }
        Ok(CommandVerifier {
            id: id.into(),
            config,
        })
    }

    fn substitute(&self, arg: &str, file: &str, root: &str) -> String {
        arg.replace("{file}", file).replace("{root}", root)
    }
}

impl Verifier for CommandVerifier {
    fn id(&self) -> &str {
        &self.id
    }

    fn verify(&self, source: &str, mode: VerifyMode) -> Result<Verdict, VerifierError> {
        let started = Instant::now();
        let scratch = tempfile::Builder::new()
            .prefix("dream-verify-")
            .tempdir()?;
        let source_path = scratch.path().join("Proof.lean");
        std::fs::write(&source_path, source)?;
        let stdout_path = scratch.path().join("stdout.log");
        let stderr_path = scratch.path().join("stderr.log");

        let file_slot = source_path.display().to_string();
        let root_dir = self
            .config
            .root
            .clone()
            .unwrap_or_else(|| scratch.path().to_path_buf());
        let root_slot = root_dir.display().to_string();

        let program = self.substitute(&self.config.command[0], &file_slot, &root_slot);
        let mut command = Command::new(&program);
        for arg in &self.config.command[1..] {
            command.arg(self.substitute(arg, &file_slot, &root_slot));
        }
        command
            .current_dir(&root_dir)
            .stdin(std::process::Stdio::null())
            .stdout(File::create(&stdout_path)?)
            .stderr(File::create(&stderr_path)?);

        let mut child = command.spawn().map_err(|source| VerifierError::Spawn {
            command: program.clone(),
            source,
        })?;

        let deadline = started + Duration::from_millis(self.config.timeout_ms);
        let (exit_success, timed_out) = loop {
            match child.try_wait()? {
                Some(status) => break (status.success(), false),
                None if Instant::now() >= deadline => {
                    let _ = child.kill();
                    let _ = child.wait();
                    break (false, true);
                }
                None => std::thread::sleep(Duration::from_millis(25)),
            }
        };
        let duration_ms = started.elapsed().as_millis() as u64;

        let mut raw_output = std::fs::read_to_string(&stdout_path).unwrap_or_default();
        let stderr_text = std::fs::read_to_string(&stderr_path).unwrap_or_default();
        if !stderr_text.is_empty() {
            if !raw_output.is_empty() && !raw_output.ends_with('\n') {
                raw_output.push('\n');
            }
            raw_output.push_str(&stderr_text);
        }

        if self.config.keep_artifacts {
            let kept = scratch.keep();
            eprintln!("kept verification artifacts in {}", kept.display());
        }

        let mut parsed: ParsedOutput =
            parse_checker_output(&raw_output, self.config.column_convention);
        if timed_out {
            parsed.diagnostics.push(Diagnostic {
                line: 1,
                column: 1,
                column_convention: ColumnConvention::OneBased,
                severity: Severity::Error,
                message: format!(
                    "verification killed after exceeding {} ms",
                    self.config.timeout_ms
                ),
                origin: DiagnosticOrigin::Timeout,
            });
        }

        Ok(finalize_verdict(
            source,
            mode,
            exit_success,
            parsed,
            raw_output,
            self.config.raw_output_limit,
            duration_ms,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::VerdictStatus;

    fn shell(script: &str, timeout_ms: u64) -> CommandVerifier {
        CommandVerifier::new(
            "test-checker",
            CommandVerifierConfig {
                command: vec!["sh".to_string(), "-c".to_string(), script.to_string()],
                root: None,
                timeout_ms,
                raw_output_limit: 65536,
                column_convention: ColumnConvention::ZeroBased,
                keep_artifacts: false,
            },
        )
        .unwrap()
    }

    const CLEAN: &str = "theorem t : True := trivial\n";

    #[test]
    fn successful_exit_with_no_output_passes() {
        let verdict = shell("exit 0", 5000).verify(CLEAN, VerifyMode::Strict).unwrap();
        assert!(verdict.passed());
        assert!(!verdict.raw_output_truncated);
    }

    #[test]
    fn checker_errors_are_parsed_from_stdout() {
        let verdict = shell("echo 'Proof.lean:1:6: error: boom'; exit 1", 5000)
            .verify(CLEAN, VerifyMode::Strict)
            .unwrap();
        assert_eq!(verdict.status, VerdictStatus::Fail);
        assert_eq!(verdict.diagnostics.len(), 1);
        assert_eq!(verdict.diagnostics[0].line, 1);
        assert_eq!(verdict.diagnostics[0].column, 6);
        assert_eq!(verdict.diagnostics[0].message, "boom");
    }

    #[test]
    fn stderr_is_captured_after_stdout() {
        let verdict = shell(
            "echo 'building'; echo 'Proof.lean:2:0: error: bad' >&2; exit 1",
            5000,
        )
        .verify(CLEAN, VerifyMode::Strict)
        .unwrap();
        assert_eq!(verdict.diagnostics.len(), 1);
        assert!(verdict.residual.contains(&"building".to_string()));
        assert!(verdict.raw_output.contains("building\n"));
    }

    #[test]
    fn file_slot_points_at_the_written_source() {
        let verdict = shell("cat {file}", 5000).verify(CLEAN, VerifyMode::Strict).unwrap();
        assert!(verdict.passed());
        assert!(verdict.raw_output.contains("theorem t : True := trivial"));
    }

    #[test]
    fn root_slot_defaults_to_the_scratch_directory() {
        let verdict = shell("test -d {root} && test -f {root}/Proof.lean", 5000)
            .verify(CLEAN, VerifyMode::Strict)
            .unwrap();
        assert!(verdict.passed());
    }

    #[test]
    fn overrunning_checker_is_killed_and_reported_as_timeout() {
        let started = Instant::now();
        let verdict = shell("sleep 30", 200).verify(CLEAN, VerifyMode::Strict).unwrap();
        assert!(started.elapsed() < Duration::from_secs(10));
        assert_eq!(verdict.status, VerdictStatus::Fail);
        assert!(verdict.timed_out());
        assert!(verdict.diagnostics[0].message.contains("200 ms"));
    }

    #[test]
    fn missing_checker_binary_is_a_spawn_error() {
        let verifier = CommandVerifier::new(
            "absent",
            CommandVerifierConfig {
                command: vec!["dream-no-such-binary".to_string(), "{file}".to_string()],
                ..CommandVerifierConfig::default()
            },
        )
        .unwrap();
        match verifier.verify(CLEAN, VerifyMode::Strict) {
            Err(VerifierError::Spawn { command, .. }) => {
                assert_eq!(command, "dream-no-such-binary")
            }
            other => panic!("expected spawn error, got {other:?}"),
        }
    }

    #[test]
    fn placeholder_in_source_fails_even_when_the_checker_is_happy() {
        let verdict = shell("exit 0", 5000)
            .verify("theorem t : True := by\n  sorry\n", VerifyMode::Strict)
            .unwrap();
        assert_eq!(verdict.status, VerdictStatus::Fail);
        assert_eq!(verdict.diagnostics[0].origin, DiagnosticOrigin::PlaceholderScan);
    }

    #[test]
    fn raw_output_cap_is_enforced() {
        let verifier = CommandVerifier::new(
            "noisy",
            CommandVerifierConfig {
                command: vec![
                    "sh".to_string(),
                    "-c".to_string(),
                    "yes noise | head -n 2000".to_string(),
                ],
                root: None,
                timeout_ms: 5000,
                raw_output_limit: 512,
                column_convention: ColumnConvention::ZeroBased,
                keep_artifacts: false,
            },
        )
        .unwrap();
        let verdict = verifier.verify(CLEAN, VerifyMode::Strict).unwrap();
        assert!(verdict.raw_output_truncated);
        assert_eq!(verdict.raw_output.len(), 512);
        assert_eq!(verdict.raw_output_limit, 512);
    }

    #[test]
    fn keep_artifacts_retains_the_scratch_directory() {
        let verifier = CommandVerifier::new(
            "keeper",
            CommandVerifierConfig {
                command: vec!["sh".to_string(), "-c".to_string(), "echo {root}".to_string()],
                keep_artifacts: true,
                ..CommandVerifierConfig::default()
            },
        )
        .unwrap();
        let verdict = verifier.verify(CLEAN, VerifyMode::Strict).unwrap();
        let scratch = std::path::Path::new(verdict.raw_output.trim());
        assert!(
            scratch.join("Proof.lean").is_file(),
            "scratch {} should survive the verdict",
            scratch.display()
        );
        assert_eq!(
            std::fs::read_to_string(scratch.join("Proof.lean")).unwrap(),
            CLEAN
        );
        std::fs::remove_dir_all(scratch).unwrap();
    }

    #[test]
    fn empty_command_is_rejected_at_construction() {
        let err = CommandVerifier::new(
            "empty",
            CommandVerifierConfig {
                command: Vec::new(),
                ..CommandVerifierConfig::default()
            },
        )
        .err()
        .unwrap();
        assert!(err.to_string().contains("empty"));
    }
}
