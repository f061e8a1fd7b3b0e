//! Step two: turn a raw translated file into a context/conjecture pair.
//!
//! The conjecture keeps exactly one theorem declaration whose body is the
//! placeholder; every other declaration moves to the context, and the
//! configured import block goes on top, deduplicated. Applying the step to
//! its own output changes nothing.

use crate::theorem::Theorem;
use crate::verifier::{Verifier, VerifyMode};

use super::{render_failure, DatasetError, LeanProblem};

/// Keywords that can open a top-level declaration. Used to find where the
/// theorem ends when other declarations trail it.
const DECL_KEYWORDS: &[&str] = &[
    "import",
    "theorem",
    "lemma",
    "example",
    "axiom",
    "def",
    "abbrev",
    "constant",
    "variable",
    "variables",
    "universe",
    "universes",
    "open",
    "namespace",
    "end",
    "section",
    "structure",
    "inductive",
    "class",
    "instance",
    "noncomputable",
    "mutual",
    "set_option",
    "attribute",
    "macro",
    "notation",
    "infix",
    "infixl",
    "infixr",
    "prefix",
    "postfix",
    "syntax",
];

const THEOREM_KEYWORDS: &[&str] = &["theorem", "lemma"];

#[derive(Clone, Copy, PartialEq)]
enum LexState {
    Code,
    LineComment,
    Block(u32),
    Str,
}

/// Lexical facts about a source string: which lines begin in plain code
/// (outside block comments and strings), and the byte offsets of `:=`
/// tokens at bracket depth zero.
struct SourceScan {
    line_in_code: Vec<bool>,
    assign_sites: Vec<usize>,
}

impl SourceScan {
    fn line_starts_in_code(&self, line: usize) -> bool {
        self.line_in_code.get(line).copied().unwrap_or(true)
    }
}

fn scan_source(source: &str) -> SourceScan {
    let mut line_in_code = Vec::new();
    let mut assign_sites = Vec::new();
    let mut state = LexState::Code;
    let mut depth: u32 = 0;
    let mut at_line_start = true;
    let mut chars = source.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if at_line_start {
            line_in_code.push(state == LexState::Code);
            at_line_start = false;
        }
        if c == '\n' {
            if state == LexState::LineComment {
                state = LexState::Code;
            }
            at_line_start = true;
            continue;
        }
        match state {
            LexState::Code => match c {
                '-' if matches!(chars.peek(), Some((_, '-'))) => {
                    chars.next();
                    state = LexState::LineComment;
                }
                '/' if matches!(chars.peek(), Some((_, '-'))) => {
                    chars.next();
                    state = LexState::Block(1);
                }
                '"' => state = LexState::Str,
                '(' | '[' | '{' | '⟨' => depth += 1,
                ')' | ']' | '}' | '⟩' => depth = depth.saturating_sub(1),
                ':' if depth == 0 && matches!(chars.peek(), Some((_, '='))) => {
                    chars.next();
                    assign_sites.push(i);
                }
                _ => {}
            },
            LexState::LineComment => {}
            LexState::Block(n) => match c {
                '/' if matches!(chars.peek(), Some((_, '-'))) => {
                    chars.next();
                    state = LexState::Block(n + 1);
                }
                '-' if matches!(chars.peek(), Some((_, '/'))) => {
                    chars.next();
                    state = if n == 1 {
                        LexState::Code
                    } else {
                        LexState::Block(n - 1)
                    };
                }
                _ => {}
            },
            LexState::Str => match c {
                '\\' => {
                    chars.next();
                }
                '"' => state = LexState::Code,
                _ => {}
            },
        }
    }
    SourceScan {
        line_in_code,
        assign_sites,
    }
}

fn leading_word(line: &str) -> Option<&str> {
    if line.starts_with(char::is_whitespace) || line.is_empty() {
        return None;
    }
    let end = line
        .find(|c: char| !(c.is_alphanumeric() || c == '_'))
        .unwrap_or(line.len());
    (end > 0).then(|| &line[..end])
}

fn is_decl_start(line: &str) -> bool {
    if line.starts_with("@[") {
        return true;
    }
    leading_word(line).is_some_and(|w| DECL_KEYWORDS.contains(&w))
}

fn is_theorem_start(line: &str) -> bool {
    leading_word(line).is_some_and(|w| THEOREM_KEYWORDS.contains(&w))
}

/// Line indices (0-based) of top-level theorem declarations, skipping lines
/// that begin inside a block comment or string.
pub(crate) fn theorem_decl_lines(source: &str) -> Vec<usize> {
    let scan = scan_source(source);
    source
        .split('\n')
        .enumerate()
        .filter(|(i, line)| scan.line_starts_in_code(*i) && is_theorem_start(line))
        .map(|(i, _)| i)
        .collect()
}

fn normalized_import(line: &str) -> Option<String> {
    let trimmed = line.trim();
    trimmed.starts_with("import ").then(|| trimmed.to_string())
}

pub fn postprocess(
    draft: &LeanProblem,
    required_imports: &[String],
    verifier: &dyn Verifier,
) -> Result<LeanProblem, DatasetError> {
    let whole = draft.theorem.full_source();
    let scan = scan_source(&whole);
    let lines: Vec<&str> = whole.split('\n').collect();

    let theorem_lines: Vec<usize> = lines
        .iter()
        .enumerate()
        .filter(|(i, line)| scan.line_starts_in_code(*i) && is_theorem_start(line))
        .map(|(i, _)| i)
        .collect();
    if theorem_lines.len() != 1 {
        return Err(DatasetError::Structure(format!(
            "`{}`: found {} theorem declarations, expected exactly 1",
            draft.theorem.id,
            theorem_lines.len()
        )));
    }
    let start = theorem_lines[0];
    let end = (start + 1..lines.len())
        .find(|&i| scan.line_starts_in_code(i) && is_decl_start(lines[i]))
        .unwrap_or(lines.len());

    let theorem_text = lines[start..end].join("\n");
    let context_lines: Vec<&str> = lines[..start]
        .iter()
        .chain(lines[end..].iter())
        .copied()
        .collect();

    // Import block: configured lines first, then whatever the draft already
    // had, first occurrence wins.
    let mut imports: Vec<String> = Vec::new();
    for line in required_imports
        .iter()
        .map(|l| l.trim().to_string())
        .chain(context_lines.iter().filter_map(|l| normalized_import(l)))
    {
        if !line.is_empty() && !imports.contains(&line) {
            imports.push(line);
        }
    }

    let mut decls: Vec<&str> = context_lines
        .into_iter()
        .filter(|l| normalized_import(l).is_none())
        .collect();
    while decls.first().is_some_and(|l| l.trim().is_empty()) {
        decls.remove(0);
    }
    while decls.last().is_some_and(|l| l.trim().is_empty()) {
        decls.pop();
    }

    let theorem_scan = scan_source(&theorem_text);
    let site = *theorem_scan.assign_sites.first().ok_or_else(|| {
        DatasetError::Structure(format!(
            "`{}`: theorem declaration has no `:=` body",
            draft.theorem.id
        ))
    })?;
    let head = theorem_text[..site].trim_end();
    let body = theorem_text[site + 2..].trim();
    let archived_body = if body == "sorry" {
        draft.provenance.archived_body.clone()
    } else {
        Some(body.to_string())
    };
    let conjecture_source = format!("{head} := sorry");

    let mut context_source = String::new();
    if !imports.is_empty() {
        context_source.push_str(&imports.join("\n"));
    }
    if !decls.is_empty() {
        if !context_source.is_empty() {
            context_source.push_str("\n\n");
        }
        context_source.push_str(&decls.join("\n"));
    }
    if !context_source.is_empty() {
        context_source.push('\n');
    }

    let theorem = Theorem {
        id: draft.theorem.id.clone(),
        domain: draft.theorem.domain.clone(),
        context_source,
        conjecture_source,
        origin: draft.theorem.origin,
    };
    let verdict = verifier.verify(&theorem.full_source(), VerifyMode::Tolerant)?;
    let mut provenance = draft.provenance.clone();
    provenance.verified = verdict.passed();
    provenance.archived_body = archived_body;
    provenance.last_diagnostics = if verdict.passed() {
        Vec::new()
    } else {
        render_failure(&verdict)
    };
    Ok(LeanProblem {
        theorem,
        imports,
        provenance,
    })
}
