//! Formula → text rendering.
//!
//! Output sticks to the core connectives (`~ & | => <=> ! ?` plus infix
//! `=`/`!=`), so parsing serialized text yields the identical tree: the
//! sugared forms (`<=`, `<~>`, `~|`, `~&`) were already normalized away at
//! parse time and are never emitted.

use std::fmt::Write as _;

use super::{AnnotatedFormula, FofFormula, FofTerm, Quantifier, TptpProblem, EQ};

pub fn serialize_term(term: &FofTerm) -> String {
    match term {
        FofTerm::Variable(name) => name.clone(),
        FofTerm::Function { name, args } => {
            if args.is_empty() {
                name.clone()
            } else {
                let rendered: Vec<String> = args.iter().map(serialize_term).collect();
                format!("{}({})", name, rendered.join(", "))
            }
        }
    }
}

pub fn serialize_formula(formula: &FofFormula) -> String {
    match formula {
        FofFormula::True => "$true".to_string(),
        FofFormula::False => "$false".to_string(),
        FofFormula::Predicate { name, args } => {
            if name == EQ && args.len() == 2 {
                format!(
                    "{} = {}",
                    serialize_term(&args[0]),
                    serialize_term(&args[1])
                )
            } else if args.is_empty() {
                name.clone()
            } else {
                let rendered: Vec<String> = args.iter().map(serialize_term).collect();
                format!("{}({})", name, rendered.join(", "))
            }
        }
        FofFormula::Not(inner) => match inner.as_ref() {
            FofFormula::Predicate { name, args } if name == EQ && args.len() == 2 => {
                format!(
                    "{} != {}",
                    serialize_term(&args[0]),
                    serialize_term(&args[1])
                )
            }
            _ => format!("~ {}", unit(inner)),
        },
        FofFormula::And(items) => {
            let rendered: Vec<String> = items.iter().map(unit).collect();
            rendered.join(" & ")
        }
        FofFormula::Or(items) => {
            let rendered: Vec<String> = items.iter().map(unit).collect();
            rendered.join(" | ")
        }
        FofFormula::Implies(left, right) => format!("{} => {}", unit(left), unit(right)),
        FofFormula::Iff(left, right) => format!("{} <=> {}", unit(left), unit(right)),
        FofFormula::Quantified {
            quantifier,
            variables,
            body,
        } => {
            let symbol = match quantifier {
                Quantifier::Forall => "!",
                Quantifier::Exists => "?",
            };
            format!("{} [{}] : {}", symbol, variables.join(", "), unit(body))
        }
    }
}

/// Renders a formula for an operand position: binary formulas get
/// parentheses, everything else is already a unit.
fn unit(formula: &FofFormula) -> String {
    match formula {
        FofFormula::And(_)
        | FofFormula::Or(_)
        | FofFormula::Implies(_, _)
        | FofFormula::Iff(_, _) => format!("({})", serialize_formula(formula)),
        _ => serialize_formula(formula),
    }
}

pub fn serialize_annotated(formula: &AnnotatedFormula) -> String {
    format!(
        "fof({}, {}, {}).",
        formula.name,
        formula.role.as_str(),
        serialize_formula(&formula.formula)
    )
}

/// Renders every formula as one `fof` line. Includes were spliced at parse
/// time, so none are re-emitted.
pub fn serialize_problem(problem: &TptpProblem) -> String {
    let mut out = String::new();
    for formula in &problem.formulas {
        let _ = writeln!(out, "{}", serialize_annotated(formula));
    }
    out
}
