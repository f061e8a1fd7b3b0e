//! Dataset index: one entry per theorem file, plus per-domain counts that
//! validation recomputes from scratch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::theorem::{Theorem, TheoremOrigin};

use super::postprocess::theorem_decl_lines;
use super::{DatasetError, LeanProblem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Theorem file path, relative to the manifest's directory.
    pub path: String,
    pub id: String,
    pub domain: String,
    pub origin: TheoremOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    /// Per-domain entry counts. Stored rather than derived so validation
    /// can catch a manifest that drifted from its files.
    pub stats: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub entries_checked: usize,
    pub domain_counts: BTreeMap<String, usize>,
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "checked {} entries across {} domains",
            self.entries_checked,
            self.domain_counts.len()
        );
        for (domain, count) in &self.domain_counts {
            let _ = writeln!(out, "  {domain}: {count}");
        }
        if self.ok() {
            let _ = writeln!(out, "OK");
        } else {
            let _ = writeln!(out, "{} issue(s):", self.issues.len());
            for issue in &self.issues {
                let _ = writeln!(out, "  - {issue}");
            }
        }
        out
    }
}

impl Manifest {
    /// Builds a manifest with stats derived from the entries.
    pub fn from_entries(entries: Vec<ManifestEntry>) -> Manifest {
        let mut manifest = Manifest {
            entries,
            stats: BTreeMap::new(),
        };
        manifest.stats = manifest.recomputed_stats();
        manifest
    }

    pub fn recomputed_stats(&self) -> BTreeMap<String, usize> {
        let mut stats = BTreeMap::new();
        for entry in &self.entries {
            *stats.entry(entry.domain.clone()).or_insert(0) += 1;
        }
        stats
    }

    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn load(path: &Path) -> Result<Manifest, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| DatasetError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), DatasetError> {
        let text = serde_json::to_string_pretty(self).map_err(|source| DatasetError::Json {
            path: path.display().to_string(),
            source,
        })?;
        std::fs::write(path, text + "\n").map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Loads every entry's theorem for a run. Unlike [`Manifest::validate`],
    /// the first unreadable file is fatal here.
    pub fn load_theorems(&self, base_dir: &Path) -> Result<Vec<Theorem>, DatasetError> {
        self.entries
            .iter()
            .map(|entry| load_problem(&base_dir.join(&entry.path)).map(|p| p.theorem))
            .collect()
    }

    /// Recomputes everything the manifest claims: per-domain counts, id
    /// uniqueness, and that every file loads and holds exactly one theorem
    /// declaration matching its entry.
    pub fn validate(&self, base_dir: &Path) -> ValidationReport {
        let mut report = ValidationReport {
            entries_checked: self.entries.len(),
            domain_counts: self.recomputed_stats(),
            issues: Vec::new(),
        };

        let mut seen = BTreeSet::new();
        for entry in &self.entries {
            if !seen.insert(entry.id.as_str()) {
                report.issues.push(format!("duplicate id `{}`", entry.id));
            }
        }

        for (domain, expected) in &self.stats {
            match report.domain_counts.get(domain) {
                Some(actual) if actual == expected => {}
                Some(actual) => report.issues.push(format!(
                    "stats claim {expected} entries for `{domain}`, found {actual}"
                )),
                None => report.issues.push(format!(
                    "stats claim {expected} entries for `{domain}`, found 0"
                )),
            }
        }
        for domain in report.domain_counts.keys() {
            if !self.stats.contains_key(domain) {
                report
                    .issues
                    .push(format!("domain `{domain}` missing from stats"));
            }
        }

        for entry in &self.entries {
            let path = base_dir.join(&entry.path);
            let problem = match load_problem(&path) {
                Ok(p) => p,
                Err(e) => {
                    report.issues.push(format!("`{}`: {e}", entry.path));
                    continue;
                }
            };
            if problem.theorem.id != entry.id {
                report.issues.push(format!(
                    "`{}`: file id `{}` != entry id `{}`",
                    entry.path, problem.theorem.id, entry.id
                ));
            }
            if problem.theorem.domain != entry.domain {
                report.issues.push(format!(
                    "`{}`: file domain `{}` != entry domain `{}`",
                    entry.path, problem.theorem.domain, entry.domain
                ));
            }
            let decls = theorem_decl_lines(&problem.theorem.conjecture_source).len();
            if decls != 1 {
                report.issues.push(format!(
                    "`{}`: conjecture holds {decls} theorem declarations, expected 1",
                    entry.path
                ));
            }
        }
        report
    }
}

pub(crate) fn load_problem(path: &Path) -> Result<LeanProblem, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| DatasetError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn save_problem(path: &Path, problem: &LeanProblem) -> Result<(), DatasetError> {
    let text = serde_json::to_string_pretty(problem).map_err(|source| DatasetError::Json {
        path: path.display().to_string(),
        source,
    })?;
    std::fs::write(path, text + "\n").map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}
