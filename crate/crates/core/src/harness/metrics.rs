//! Pass-rate metrics over run records.
//!
//! The cumulative pass rate counts theorems solved at least once within a
//! revision cutoff over theorems attempted at all — aborted theorems stay
//! in the denominator. Per-domain tables carry both the pooled (micro)
//! average and the mean-of-domains (macro) average, since either reading
//! of "average" is defensible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::verifier::VerdictStatus;

use super::{HarnessError, Method, RunRecord};

/// Exact counts; the fraction is derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PassRate {
    pub solved: usize,
    pub attempted: usize,
}

impl PassRate {
    pub fn fraction(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.solved as f64 / self.attempted as f64
        }
    }

    /// One-decimal percent, e.g. 3/44 → "6.8%".
    pub fn percent_display(&self) -> String {
        format!("{:.1}%", self.fraction() * 100.0)
    }
}

/// Fraction of theorems with at least one Pass at revision ≤ `upto`, over
/// all theorems that appear in the records.
pub fn cumulative_pass_rate(
    records: &[RunRecord],
    upto: usize,
) -> Result<PassRate, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyLog);
    }
    let mut attempted: BTreeSet<&str> = BTreeSet::new();
    let mut solved: BTreeSet<&str> = BTreeSet::new();
    for record in records {
        attempted.insert(&record.theorem_id);
        if record.verdict_status == VerdictStatus::Pass && record.revision <= upto {
            solved.insert(&record.theorem_id);
        }
    }
    Ok(PassRate {
        solved: solved.len(),
        attempted: attempted.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub domain: String,
    pub rate: PassRate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportTable {
    /// One row per domain, sorted by domain code.
    pub rows: Vec<ReportRow>,
    /// Pooled counts across all domains.
    pub micro: PassRate,
    /// Mean of the per-domain fractions.
    pub macro_fraction: f64,
    pub revision_cutoff: usize,
    /// Present when every record carries the same method.
    pub method: Option<Method>,
}

/// Builds the per-domain table at a revision cutoff. Row order and the
/// averages are independent of record order.
pub fn aggregate_by_domain(
    records: &[RunRecord],
    upto: usize,
) -> Result<ReportTable, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyLog);
    }
    let mut per_domain: BTreeMap<&str, (BTreeSet<&str>, BTreeSet<&str>)> = BTreeMap::new();
    let mut methods: BTreeSet<Method> = BTreeSet::new();
    for record in records {
        let (attempted, solved) = per_domain.entry(&record.domain).or_default();
        attempted.insert(&record.theorem_id);
        if record.verdict_status == VerdictStatus::Pass && record.revision <= upto {
            solved.insert(&record.theorem_id);
        }
        methods.insert(record.method);
    }

    let rows: Vec<ReportRow> = per_domain
        .iter()
        .map(|(domain, (attempted, solved))| ReportRow {
            domain: domain.to_string(),
            rate: PassRate {
                solved: solved.len(),
                attempted: attempted.len(),
            },
        })
        .collect();
    let micro = PassRate {
        solved: rows.iter().map(|r| r.rate.solved).sum(),
        attempted: rows.iter().map(|r| r.rate.attempted).sum(),
    };
    let macro_fraction =
        rows.iter().map(|r| r.rate.fraction()).sum::<f64>() / rows.len() as f64;
    let method = (methods.len() == 1).then(|| *methods.iter().next().unwrap());
    Ok(ReportTable {
        rows,
        micro,
        macro_fraction,
        revision_cutoff: upto,
        method,
    })
}

impl ReportTable {
    pub fn render_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.domain.len())
            .chain(["Avg. (micro)".len()])
            .max()
            .unwrap_or(6);
        let mut out = String::new();
        match self.method {
            Some(method) => {
                let _ = writeln!(
                    out,
                    "method {method}, cutoff {}",
                    self.revision_cutoff
                );
            }
            None => {
                let _ = writeln!(out, "cutoff {}", self.revision_cutoff);
            }
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>9}  {:>7}",
            "domain", "solved", "attempted", "rate"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>6}  {:>9}  {:>7}",
                row.domain,
                row.rate.solved,
                row.rate.attempted,
                row.rate.percent_display()
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>9}  {:>7}",
            "Avg. (micro)",
            self.micro.solved,
            self.micro.attempted,
            self.micro.percent_display()
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>9}  {:>7}",
            "Avg. (macro)",
            "",
            "",
            format!("{:.1}%", self.macro_fraction * 100.0)
        );
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("domain,solved,attempted,fraction,percent\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.domain,
                row.rate.solved,
                row.rate.attempted,
                row.rate.fraction(),
                row.rate.percent_display()
            );
        }
        let _ = writeln!(
            out,
            "avg_micro,{},{},{},{}",
            self.micro.solved,
            self.micro.attempted,
            self.micro.fraction(),
            self.micro.percent_display()
        );
        let _ = writeln!(
            out,
            "avg_macro,,,{},{:.1}%",
            self.macro_fraction,
            self.macro_fraction * 100.0
        );
        out
    }
}
