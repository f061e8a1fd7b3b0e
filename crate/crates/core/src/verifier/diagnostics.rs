//! Checker output parsing.
//!
//! Headers follow the `file:line:col: severity: message` shape Lean and
//! similar checkers print. Indented or plain lines after a header continue
//! its message; a blank line ends the continuation. Lines that look like a
//! header but carry an unknown severity, `info:` reports, and stray prose
//! all land in `residual` so nothing the checker said is lost.

use regex::Regex;
use std::sync::OnceLock;

use super::{ColumnConvention, Diagnostic, DiagnosticOrigin, Severity};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedOutput {
    pub diagnostics: Vec<Diagnostic>,
    pub residual: Vec<String>,
}

fn header_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(?P<file>[^:\s][^:]*):(?P<line>\d+):(?P<col>\d+):\s*(?P<sev>[A-Za-z]+):\s?(?P<msg>.*)$")
            .unwrap()
    })
}

/// Parses raw checker output. `convention` records how the checker counts
/// columns; values are stored exactly as printed.
pub fn parse_checker_output(text: &str, convention: ColumnConvention) -> ParsedOutput {
    let mut out = ParsedOutput::default();
    // Index into out.diagnostics of the header still accepting continuations.
    let mut open: Option<usize> = None;

    for line in text.lines() {
        if line.trim().is_empty() {
            open = None;
            continue;
        }
        if let Some(caps) = header_re().captures(line) {
            let parsed_line: Option<usize> = caps["line"].parse().ok();
            let parsed_col: Option<usize> = caps["col"].parse().ok();
            let severity = match &caps["sev"] {
                "error" => Some(Severity::Error),
                "warning" => Some(Severity::Warning),
                _ => None,
            };
            match (parsed_line, parsed_col, severity) {
                (Some(l), Some(c), Some(severity)) => {
                    out.diagnostics.push(Diagnostic {
                        line: l,
                        column: c,
                        column_convention: convention,
                        severity,
                        message: caps["msg"].to_string(),
                        origin: DiagnosticOrigin::Checker,
                    });
                    open = Some(out.diagnostics.len() - 1);
                }
                _ => {
                    // Header-shaped but not a diagnostic we understand
                    // (`info:`, custom severities, absurd numbers).
                    out.residual.push(line.to_string());
                    open = None;
                }
            }
            continue;
        }
        match open {
            Some(i) => {
                let message = &mut out.diagnostics[i].message;
                message.push('\n');
                message.push_str(line);
            }
            None => out.residual.push(line.to_string()),
        }
    }
    out
}
