//! Lexical scan for proof placeholders.
//!
//! Finds `sorry` and `admit` tokens that would make a "successful" compile
//! meaningless. The scan understands just enough of the lexical structure to
//! skip false positives: `--` line comments, nested `/- -/` block comments,
//! and double-quoted string literals with backslash escapes. Word boundaries
//! treat alphanumerics, `_`, and `'` as identifier characters, so `sorry'`
//! and `mysorry` do not match.

const PLACEHOLDER_WORDS: [&str; 2] = ["sorry", "admit"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceholderHit {
    pub word: &'static str,
    /// 1-based line of the token.
    pub line: usize,
    /// 1-based character column of the token start.
    pub column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Scans `source`, returning hits in source order.
pub fn scan_placeholders(source: &str) -> Vec<PlaceholderHit> {
    let chars: Vec<char> = source.chars().collect();
    let mut hits = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut i = 0usize;

    // Advances one char, maintaining the line/column counters.
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();

        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && next == Some('-') {
            let mut depth = 1usize;
            bump!();
            bump!();
            while i < chars.len() && depth > 0 {
                let c = chars[i];
                let next = chars.get(i + 1).copied();
                if c == '/' && next == Some('-') {
                    depth += 1;
                    bump!();
                    bump!();
                } else if c == '-' && next == Some('/') {
                    depth -= 1;
                    bump!();
                    bump!();
                } else {
                    bump!();
                }
            }
            continue;
        }
        if c == '"' {
            bump!();
            while i < chars.len() {
                let c = chars[i];
                bump!();
                if c == '\\' && i < chars.len() {
                    bump!();
                } else if c == '"' {
                    break;
                }
            }
            continue;
        }
        if is_ident_char(c) {
            let start_line = line;
            let start_column = column;
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            if let Some(&hit) = PLACEHOLDER_WORDS.iter().find(|&&w| w == word) {
                hits.push(PlaceholderHit {
                    word: hit,
                    line: start_line,
                    column: start_column,
                });
            }
            continue;
        }
        bump!();
    }
    hits
}
