//! Recursive-descent parser for `fof` inputs.
//!
//! Follows the TPTP grammar's shape: a quantifier or negation binds one
//! *unit* formula, associative chains (`&`, `|`) must not mix without
//! parentheses, and the arrow connectives are non-associative, so `p => q
//! => r` is a syntax error rather than a silent guess.

use std::path::Path;

use super::lexer::{tokenize, Tok, Token};
use super::{
    AnnotatedFormula, FofFormula, FofTerm, FormulaRole, Quantifier, TptpError, TptpProblem,
};

const MAX_INCLUDE_DEPTH: usize = 16;

enum RawInput {
    Formula(AnnotatedFormula),
    Include {
        /// As written, quotes included.
        path: String,
        /// Optional formula-name selection list.
        selection: Option<Vec<String>>,
    },
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    file: &'a str,
}

impl<'a> Parser<'a> {
    fn new(source: &str, file: &'a str) -> Result<Parser<'a>, TptpError> {
        Ok(Parser {
            tokens: tokenize(source, file)?,
            pos: 0,
            file,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.column)
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn error(&self, message: String) -> TptpError {
        let (line, column) = self.here();
        TptpError::syntax(self.file, line, column, message)
    }

    fn expect(&mut self, expected: Tok) -> Result<Token, TptpError> {
        if *self.peek() == expected {
            Ok(self.advance())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                expected.describe(),
                self.peek().describe()
            )))
        }
    }

    fn parse_inputs(&mut self) -> Result<Vec<RawInput>, TptpError> {
        let mut inputs = Vec::new();
        while *self.peek() != Tok::Eof {
            let (line, column) = self.here();
            let word = match self.peek() {
                Tok::Lower(w) => w.clone(),
                other => {
                    return Err(self.error(format!(
                        "expected `fof` or `include`, found {}",
                        other.describe()
                    )))
                }
            };
            match word.as_str() {
                "fof" => {
                    self.advance();
                    inputs.push(RawInput::Formula(self.parse_fof_body()?));
                }
                "include" => {
                    self.advance();
                    inputs.push(self.parse_include_body()?);
                }
                "cnf" | "tff" | "tcf" | "thf" | "tpi" => {
                    return Err(TptpError::UnsupportedKind {
                        file: self.file.to_string(),
                        line,
                        column,
                        kind: word,
                    })
                }
                other => {
                    return Err(self.error(format!(
                        "expected `fof` or `include`, found `{other}`"
                    )))
                }
            }
        }
        Ok(inputs)
    }

    fn parse_fof_body(&mut self) -> Result<AnnotatedFormula, TptpError> {
        self.expect(Tok::LParen)?;
        let name = match self.advance().tok {
            Tok::Lower(w) => w,
            Tok::Number(n) => n,
            Tok::Quoted(q) => q,
            other => {
                return Err(self.error(format!(
                    "formula name must be a word, number, or quoted atom, found {}",
                    other.describe()
                )))
            }
        };
        self.expect(Tok::Comma)?;
        let role = match self.peek() {
            Tok::Lower(w) => FormulaRole::parse(w)
                .ok_or_else(|| self.error(format!("unknown formula role `{w}`")))?,
            other => {
                return Err(self.error(format!(
                    "expected a formula role, found {}",
                    other.describe()
                )))
            }
        };
        self.advance();
        self.expect(Tok::Comma)?;
        let formula = self.parse_logic_formula()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        Ok(AnnotatedFormula {
            name,
            role,
            formula,
        })
    }

    fn parse_include_body(&mut self) -> Result<RawInput, TptpError> {
        self.expect(Tok::LParen)?;
        let path = match self.advance().tok {
            Tok::Quoted(q) => q,
            Tok::Lower(w) => w,
            other => {
                return Err(self.error(format!(
                    "include path must be a quoted atom, found {}",
                    other.describe()
                )))
            }
        };
        let selection = if *self.peek() == Tok::Comma {
            self.advance();
            self.expect(Tok::LBracket)?;
            let mut names = Vec::new();
            loop {
                match self.advance().tok {
                    Tok::Lower(w) => names.push(w),
                    Tok::Number(n) => names.push(n),
                    Tok::Quoted(q) => names.push(q),
                    other => {
                        return Err(self.error(format!(
                            "selection entries must be formula names, found {}",
                            other.describe()
                        )))
                    }
                }
                match self.advance().tok {
                    Tok::Comma => continue,
                    Tok::RBracket => break,
                    other => {
                        return Err(self.error(format!(
                            "expected `,` or `]` in selection list, found {}",
                            other.describe()
                        )))
                    }
                }
            }
            Some(names)
        } else {
            None
        };
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        Ok(RawInput::Include { path, selection })
    }

    fn parse_logic_formula(&mut self) -> Result<FofFormula, TptpError> {
        let first = self.parse_unit_formula()?;
        match self.peek().clone() {
            Tok::Ampersand => {
                let mut items = vec![first];
                while *self.peek() == Tok::Ampersand {
                    self.advance();
                    items.push(self.parse_unit_formula()?);
                }
                self.no_dangling_connective("&")?;
                Ok(FofFormula::And(items))
            }
            Tok::Pipe => {
                let mut items = vec![first];
                while *self.peek() == Tok::Pipe {
                    self.advance();
                    items.push(self.parse_unit_formula()?);
                }
                self.no_dangling_connective("|")?;
                Ok(FofFormula::Or(items))
            }
            Tok::Implies => {
                self.advance();
                let right = self.parse_unit_formula()?;
                self.no_dangling_connective("=>")?;
                Ok(FofFormula::Implies(Box::new(first), Box::new(right)))
            }
            Tok::ImpliedBy => {
                self.advance();
                let right = self.parse_unit_formula()?;
                self.no_dangling_connective("<=")?;
                // `p <= q` means q implies p.
                Ok(FofFormula::Implies(Box::new(right), Box::new(first)))
            }
            Tok::Iff => {
                self.advance();
                let right = self.parse_unit_formula()?;
                self.no_dangling_connective("<=>")?;
                Ok(FofFormula::Iff(Box::new(first), Box::new(right)))
            }
            Tok::Xor => {
                self.advance();
                let right = self.parse_unit_formula()?;
                self.no_dangling_connective("<~>")?;
                Ok(FofFormula::Not(Box::new(FofFormula::Iff(
                    Box::new(first),
                    Box::new(right),
                ))))
            }
            Tok::Nor => {
                self.advance();
                let right = self.parse_unit_formula()?;
                self.no_dangling_connective("~|")?;
                Ok(FofFormula::Not(Box::new(FofFormula::Or(vec![first, right]))))
            }
            Tok::Nand => {
                self.advance();
                let right = self.parse_unit_formula()?;
                self.no_dangling_connective("~&")?;
                Ok(FofFormula::Not(Box::new(FofFormula::And(vec![
                    first, right,
                ]))))
            }
            _ => Ok(first),
        }
    }

    /// After a binary formula is complete, another connective at the same
    /// level is either a mixed chain or a non-associative repeat; both need
    /// parentheses.
    fn no_dangling_connective(&self, after: &str) -> Result<(), TptpError> {
        let offender = match self.peek() {
            Tok::Ampersand => "&",
            Tok::Pipe => "|",
            Tok::Implies => "=>",
            Tok::ImpliedBy => "<=",
            Tok::Iff => "<=>",
            Tok::Xor => "<~>",
            Tok::Nor => "~|",
            Tok::Nand => "~&",
            _ => return Ok(()),
        };
        Err(self.error(format!(
            "`{offender}` cannot follow a `{after}` formula without parentheses"
        )))
    }

    fn parse_unit_formula(&mut self) -> Result<FofFormula, TptpError> {
        match self.peek().clone() {
            Tok::Bang | Tok::Question => {
                let quantifier = if *self.peek() == Tok::Bang {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                self.advance();
                self.expect(Tok::LBracket)?;
                let mut variables = Vec::new();
                loop {
                    match self.advance().tok {
                        Tok::Upper(v) => variables.push(v),
                        other => {
                            return Err(self.error(format!(
                                "quantified variables must start upper-case, found {}",
                                other.describe()
                            )))
                        }
                    }
                    match self.advance().tok {
                        Tok::Comma => continue,
                        Tok::RBracket => break,
                        other => {
                            return Err(self.error(format!(
                                "expected `,` or `]` in variable list, found {}",
                                other.describe()
                            )))
                        }
                    }
                }
                self.expect(Tok::Colon)?;
                // Per the grammar the body is one unit formula: the
                // quantifier does not reach across `&`, `|`, or arrows.
                let body = self.parse_unit_formula()?;
                Ok(FofFormula::Quantified {
                    quantifier,
                    variables,
                    body: Box::new(body),
                })
            }
            Tok::Tilde => {
                self.advance();
                Ok(FofFormula::Not(Box::new(self.parse_unit_formula()?)))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.parse_logic_formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Lower(w) if w == "$true" => {
                self.advance();
                Ok(FofFormula::True)
            }
            Tok::Lower(w) if w == "$false" => {
                self.advance();
                Ok(FofFormula::False)
            }
            Tok::Lower(_) | Tok::Quoted(_) | Tok::Number(_) | Tok::Upper(_) => {
                let term = self.parse_term()?;
                match self.peek() {
                    Tok::Equals => {
                        self.advance();
                        let right = self.parse_term()?;
                        Ok(FofFormula::eq(term, right))
                    }
                    Tok::NotEquals => {
                        self.advance();
                        let right = self.parse_term()?;
                        Ok(FofFormula::neq(term, right))
                    }
                    _ => match term {
                        FofTerm::Function { name, args } => {
                            Ok(FofFormula::Predicate { name, args })
                        }
                        FofTerm::Variable(v) => Err(self.error(format!(
                            "variable `{v}` cannot stand alone as a formula"
                        ))),
                    },
                }
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn parse_term(&mut self) -> Result<FofTerm, TptpError> {
        match self.advance().tok {
            Tok::Upper(v) => Ok(FofTerm::Variable(v)),
            Tok::Lower(name) | Tok::Quoted(name) | Tok::Number(name) => {
                if *self.peek() == Tok::LParen {
                    self.advance();
                    let mut args = Vec::new();
                    loop {
                        args.push(self.parse_term()?);
                        match self.advance().tok {
                            Tok::Comma => continue,
                            Tok::RParen => break,
                            other => {
                                return Err(self.error(format!(
                                    "expected `,` or `)` in argument list, found {}",
                                    other.describe()
                                )))
                            }
                        }
                    }
                    Ok(FofTerm::Function { name, args })
                } else {
                    Ok(FofTerm::Function {
                        name,
                        args: Vec::new(),
                    })
                }
            }
            other => Err(self.error(format!("expected a term, found {}", other.describe()))),
        }
    }
}

/// Parses a bare formula (no `fof(...)` wrapper).
pub fn parse_formula(source: &str) -> Result<FofFormula, TptpError> {
    let mut parser = Parser::new(source, "<formula>")?;
    let formula = parser.parse_logic_formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(format!(
            "trailing input after formula: {}",
            parser.peek().describe()
        )));
    }
    Ok(formula)
}

/// Parses problem text. `include` directives are rejected here — resolving
/// them needs a library root; use [`parse_problem_file`] for that.
pub fn parse_problem(source: &str, file: &str) -> Result<TptpProblem, TptpError> {
    let mut parser = Parser::new(source, file)?;
    let mut problem = TptpProblem::default();
    for input in parser.parse_inputs()? {
        match input {
            RawInput::Formula(f) => problem.formulas.push(f),
            RawInput::Include { path, .. } => {
                return Err(TptpError::Include {
                    path,
                    source: Box::new(TptpError::syntax(
                        file,
                        0,
                        0,
                        "includes cannot be resolved without a library root".to_string(),
                    )),
                })
            }
        }
    }
    Ok(problem)
}

/// Parses a problem file, resolving `include` directives against
/// `include_root` (the library directory containing `Axioms/`), splicing
/// included formulas where the directive stood.
pub fn parse_problem_file(path: &Path, include_root: &Path) -> Result<TptpProblem, TptpError> {
    let mut problem = TptpProblem::default();
    load_into(path, include_root, &mut problem, 0)?;
    Ok(problem)
}

fn strip_atom_quotes(path: &str) -> String {
    if path.len() >= 2 && path.starts_with('\'') && path.ends_with('\'') {
        path[1..path.len() - 1].replace("\\'", "'").replace("\\\\", "\\")
    } else {
        path.to_string()
    }
}

fn load_into(
    path: &Path,
    include_root: &Path,
    problem: &mut TptpProblem,
    depth: usize,
) -> Result<(), TptpError> {
    if depth > MAX_INCLUDE_DEPTH {
        return Err(TptpError::IncludeDepth(MAX_INCLUDE_DEPTH));
    }
    let text = std::fs::read_to_string(path).map_err(|source| TptpError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let label = path.display().to_string();
    let mut parser = Parser::new(&text, &label)?;
    for input in parser.parse_inputs()? {
        match input {
            RawInput::Formula(f) => problem.formulas.push(f),
            RawInput::Include { path: inc, selection } => {
                problem.includes.push(inc.clone());
                let resolved = include_root.join(strip_atom_quotes(&inc));
                let mut sub = TptpProblem::default();
                load_into(&resolved, include_root, &mut sub, depth + 1).map_err(|e| {
                    match e {
                        e @ TptpError::IncludeDepth(_) => e,
                        e => TptpError::Include {
                            path: inc.clone(),
                            source: Box::new(e),
                        },
                    }
                })?;
                match &selection {
                    Some(names) => problem
                        .formulas
                        .extend(sub.formulas.into_iter().filter(|f| names.contains(&f.name))),
                    None => problem.formulas.extend(sub.formulas),
                }
                problem.includes.extend(sub.includes);
            }
        }
    }
    Ok(())
}
