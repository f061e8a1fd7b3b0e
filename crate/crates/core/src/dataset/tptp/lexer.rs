//! TPTP tokenizer.
//!
//! `%` comments run to end of line, `/* */` comments do not nest (per the
//! TPTP syntax), single-quoted atoms keep their quotes so they serialize
//! back exactly, and the multi-character connectives are matched longest
//! first (`<=>` before `<=`, `!=` before `!`).

use super::TptpError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Ampersand,
    Pipe,
    Tilde,
    Bang,
    Question,
    Equals,
    NotEquals,
    Implies,
    ImpliedBy,
    Iff,
    Xor,
    Nor,
    Nand,
    /// Lower-case-initial word (functors, predicates, keywords, roles).
    Lower(String),
    /// Upper-case-initial word (variables).
    Upper(String),
    /// Single-quoted atom, quotes included.
    Quoted(String),
    /// Integer/rational/real literal, kept verbatim.
    Number(String),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Lower(w) => format!("`{w}`"),
            Tok::Upper(w) => format!("`{w}`"),
            Tok::Quoted(w) => format!("{w}"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!(
                "`{}`",
                match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Comma => ",",
                    Tok::Dot => ".",
                    Tok::Colon => ":",
                    Tok::Ampersand => "&",
                    Tok::Pipe => "|",
                    Tok::Tilde => "~",
                    Tok::Bang => "!",
                    Tok::Question => "?",
                    Tok::Equals => "=",
                    Tok::NotEquals => "!=",
                    Tok::Implies => "=>",
                    Tok::ImpliedBy => "<=",
                    Tok::Iff => "<=>",
                    Tok::Xor => "<~>",
                    Tok::Nor => "~|",
                    Tok::Nand => "~&",
                    _ => unreachable!(),
                }
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, TptpError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    let mut line = 1usize;
    let mut column = 1usize;

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
        let (tok_line, tok_column) = (line, column);

        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(TptpError::syntax(
                        file,
                        tok_line,
                        tok_column,
                        "unterminated block comment".to_string(),
                    ));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }

        let mut push = |tok: Tok, width: usize, i: &mut usize, column: &mut usize| {
            tokens.push(Token {
                tok,
                line: tok_line,
                column: tok_column,
            });
            *i += width;
            *column += width;
        };

        // Multi-character operators, longest match first.
        if c == '<' {
            if next == Some('=') && chars.get(i + 2) == Some(&'>') {
                push(Tok::Iff, 3, &mut i, &mut column);
            } else if next == Some('~') && chars.get(i + 2) == Some(&'>') {
                push(Tok::Xor, 3, &mut i, &mut column);
            } else if next == Some('=') {
                push(Tok::ImpliedBy, 2, &mut i, &mut column);
            } else {
                return Err(TptpError::syntax(
                    file,
                    tok_line,
                    tok_column,
                    "stray `<`".to_string(),
                ));
            }
            continue;
        }
        if c == '=' {
            if next == Some('>') {
                push(Tok::Implies, 2, &mut i, &mut column);
            } else {
                push(Tok::Equals, 1, &mut i, &mut column);
            }
            continue;
        }
        if c == '!' {
            if next == Some('=') {
                push(Tok::NotEquals, 2, &mut i, &mut column);
            } else {
                push(Tok::Bang, 1, &mut i, &mut column);
            }
            continue;
        }
        if c == '~' {
            if next == Some('|') {
                push(Tok::Nor, 2, &mut i, &mut column);
            } else if next == Some('&') {
                push(Tok::Nand, 2, &mut i, &mut column);
            } else {
                push(Tok::Tilde, 1, &mut i, &mut column);
            }
            continue;
        }

        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '&' => Some(Tok::Ampersand),
            '|' => Some(Tok::Pipe),
            '?' => Some(Tok::Question),
            _ => None,
        };
        if let Some(tok) = single {
            push(tok, 1, &mut i, &mut column);
            continue;
        }

        if c == '\'' {
            let mut text = String::from('\'');
            bump!();
            loop {
                if i >= chars.len() || chars[i] == '\n' {
                    return Err(TptpError::syntax(
                        file,
                        tok_line,
                        tok_column,
                        "unterminated quoted atom".to_string(),
                    ));
                }
                let c = chars[i];
                text.push(c);
                bump!();
                if c == '\\' {
                    if i < chars.len() {
                        text.push(chars[i]);
                        bump!();
                    }
                } else if c == '\'' {
                    break;
                }
            }
            tokens.push(Token {
                tok: Tok::Quoted(text),
                line: tok_line,
                column: tok_column,
            });
            continue;
        }

        if c.is_ascii_digit() {
            let mut text = String::new();
            while i < chars.len()
                && (chars[i].is_ascii_digit() || matches!(chars[i], '.' | '/' | 'e' | 'E'))
            {
                // A dot only continues the number if a digit follows;
                // otherwise it is the input terminator.
                if chars[i] == '.' && !chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
                    break;
                }
                text.push(chars[i]);
                bump!();
            }
            tokens.push(Token {
                tok: Tok::Number(text),
                line: tok_line,
                column: tok_column,
            });
            continue;
        }

        if c.is_ascii_lowercase() || c.is_ascii_uppercase() || c == '_' || c == '$' {
            let mut text = String::new();
            if c == '$' {
                text.push('$');
                bump!();
            }
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
            {
                text.push(chars[i]);
                bump!();
            }
            if text == "$" || text.is_empty() {
                return Err(TptpError::syntax(
                    file,
                    tok_line,
                    tok_column,
                    "bare `$` or `_` is not a word".to_string(),
                ));
            }
            let first = text.chars().next().unwrap();
            let tok = if first.is_ascii_uppercase() || first == '_' {
                Tok::Upper(text)
            } else {
                Tok::Lower(text)
            };
            tokens.push(Token {
                tok,
                line: tok_line,
                column: tok_column,
            });
            continue;
        }

        return Err(TptpError::syntax(
            file,
            tok_line,
            tok_column,
            format!("unexpected character `{c}`"),
        ));
    }

    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(tokens)
}
