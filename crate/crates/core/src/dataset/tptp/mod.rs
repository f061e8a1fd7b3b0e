//! TPTP first-order-form problem files: lexing, parsing, serialization.
//!
//! Scope is deliberately the `fof` language (plus `include`): that is what
//! the problem library's first-order divisions use. Other construct kinds
//! (`cnf`, `tff`, `thf`, `tpi`) are rejected by name so a caller knows
//! exactly what was unsupported.
//!
//! Exotic connectives are normalized at parse time into the core tree —
//! `a != b` to `~(a = b)`, `p <= q` to `q => p`, `p <~> q` to `~(p <=> q)`,
//! `p ~| q` to `~(p | q)`, `p ~& q` to `~(p & q)` — and the serializer emits
//! only core connectives (with `!=` regained for negated equalities), so
//! `parse . serialize` is the identity on trees.

mod lexer;
mod parser;
mod serialize;

pub use parser::{parse_formula, parse_problem, parse_problem_file};
pub use serialize::{serialize_annotated, serialize_formula, serialize_problem, serialize_term};

use thiserror::Error;

/// Equality is a predicate with this reserved name; the serializer prints it
/// infix and prints its negation as `!=`.
pub const EQ: &str = "=";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FofTerm {
    /// Upper-case-initial variable.
    Variable(String),
    /// Functor application; constants have no arguments. Quoted symbols and
    /// numeric constants keep their written form in `name`.
    Function { name: String, args: Vec<FofTerm> },
}

impl FofTerm {
    pub fn constant(name: impl Into<String>) -> FofTerm {
        FofTerm::Function {
            name: name.into(),
            args: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FofFormula {
    Quantified {
        quantifier: Quantifier,
        variables: Vec<String>,
        body: Box<FofFormula>,
    },
    /// Conjunction chain; always at least two conjuncts.
    And(Vec<FofFormula>),
    /// Disjunction chain; always at least two disjuncts.
    Or(Vec<FofFormula>),
    Not(Box<FofFormula>),
    Implies(Box<FofFormula>, Box<FofFormula>),
    Iff(Box<FofFormula>, Box<FofFormula>),
    Predicate {
        name: String,
        args: Vec<FofTerm>,
    },
    True,
    False,
}

impl FofFormula {
    pub fn eq(left: FofTerm, right: FofTerm) -> FofFormula {
        FofFormula::Predicate {
            name: EQ.to_string(),
            args: vec![left, right],
        }
    }

    pub fn neq(left: FofTerm, right: FofTerm) -> FofFormula {
        FofFormula::Not(Box::new(FofFormula::eq(left, right)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaRole {
    Axiom,
    Hypothesis,
    Definition,
    Assumption,
    Lemma,
    Theorem,
    Corollary,
    Conjecture,
    NegatedConjecture,
    Plain,
}

impl FormulaRole {
    pub fn parse(text: &str) -> Option<FormulaRole> {
        Some(match text {
            "axiom" => FormulaRole::Axiom,
            "hypothesis" => FormulaRole::Hypothesis,
            "definition" => FormulaRole::Definition,
            "assumption" => FormulaRole::Assumption,
            "lemma" => FormulaRole::Lemma,
            "theorem" => FormulaRole::Theorem,
            "corollary" => FormulaRole::Corollary,
            "conjecture" => FormulaRole::Conjecture,
            "negated_conjecture" => FormulaRole::NegatedConjecture,
            "plain" => FormulaRole::Plain,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaRole::Axiom => "axiom",
            FormulaRole::Hypothesis => "hypothesis",
            FormulaRole::Definition => "definition",
            FormulaRole::Assumption => "assumption",
            FormulaRole::Lemma => "lemma",
            FormulaRole::Theorem => "theorem",
            FormulaRole::Corollary => "corollary",
            FormulaRole::Conjecture => "conjecture",
            FormulaRole::NegatedConjecture => "negated_conjecture",
            FormulaRole::Plain => "plain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedFormula {
    pub name: String,
    pub role: FormulaRole,
    pub formula: FofFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TptpProblem {
    pub formulas: Vec<AnnotatedFormula>,
    /// Include paths as written, in order, after resolution succeeded.
    pub includes: Vec<String>,
}

impl TptpProblem {
    pub fn axioms(&self) -> impl Iterator<Item = &AnnotatedFormula> {
        self.formulas
            .iter()
            .filter(|f| f.role != FormulaRole::Conjecture)
    }

    pub fn conjectures(&self) -> impl Iterator<Item = &AnnotatedFormula> {
        self.formulas
            .iter()
            .filter(|f| f.role == FormulaRole::Conjecture)
    }
}

#[derive(Debug, Error)]
pub enum TptpError {
    #[error("{file}:{line}:{column}: {message}")]
    Syntax {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}:{line}:{column}: `{kind}` inputs are not supported (only `fof`)")]
    UnsupportedKind {
        file: String,
        line: usize,
        column: usize,
        kind: String,
    },
    #[error("include `{path}`: {source}")]
    Include {
        path: String,
        #[source]
        source: Box<TptpError>,
    },
    #[error("include nesting deeper than {0} levels (include cycle?)")]
    IncludeDepth(usize),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl TptpError {
    pub(crate) fn syntax(file: &str, line: usize, column: usize, message: String) -> TptpError {
        TptpError::Syntax {
            file: file.to_string(),
            line,
            column,
            message,
        }
    }
}

/// Problem-library category of a file stem: the alphabetic prefix plus the
/// numeric group with leading zeros trimmed. `GEO006+1` and `GEO006-2` both
/// belong to `GEO6`.
pub fn domain_from_stem(stem: &str) -> String {
    let alpha: String = stem.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    let digits: String = stem
        .chars()
        .skip(alpha.len())
        .take_while(|c| c.is_ascii_digit())
        .collect();
    let trimmed = digits.trim_start_matches('0');
    let number = if trimmed.is_empty() && !digits.is_empty() {
        "0"
    } else {
        trimmed
    };
    format!("{alpha}{number}")
}
