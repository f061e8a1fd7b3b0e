//! Whole-file and whole-directory conversion drivers.
//!
//! Per-problem content failures (unparseable TPTP, bad structure, budget
//! exhausted) are recorded and the batch moves on; environment failures
//! (gateway, verifier, disk) abort the batch — retrying the next file
//! would hit the same wall.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::gateway::Gateway;
use crate::verifier::Verifier;

use super::manifest::save_problem;
use super::tptp::{domain_from_stem, parse_problem_file};
use super::{
    optimize_context, postprocess, translate_problem, DatasetError, LeanProblem, Manifest,
    ManifestEntry,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvertOptions {
    #[serde(default = "default_max_attempts")]
    pub max_attempts: usize,
    #[serde(default)]
    pub skip_optimize: bool,
    /// Import lines every generated file starts with.
    #[serde(default)]
    pub required_imports: Vec<String>,
}

fn default_max_attempts() -> usize {
    60
}

impl Default for ConvertOptions {
    fn default() -> Self {
        ConvertOptions {
            max_attempts: default_max_attempts(),
            skip_optimize: false,
            required_imports: Vec::new(),
        }
    }
}

#[derive(Debug, Default)]
pub struct ConvertReport {
    pub manifest: Manifest,
    /// Ids that translated, post-processed, and verified.
    pub converted: Vec<String>,
    /// (id, reason) pairs that need manual review; their files are still
    /// written when a draft exists.
    pub rejected: Vec<(String, String)>,
}

/// Runs the full pipeline on one TPTP problem file.
pub fn convert_file(
    gateway: &Gateway,
    verifier: &dyn Verifier,
    path: &Path,
    include_root: &Path,
    options: &ConvertOptions,
) -> Result<LeanProblem, DatasetError> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| DatasetError::Invalid(format!("`{}` has no file stem", path.display())))?;
    let problem = parse_problem_file(path, include_root)?;
    let domain = domain_from_stem(stem);
    let draft = translate_problem(
        gateway,
        verifier,
        &problem,
        stem,
        &domain,
        options.max_attempts,
    )?;
    if !draft.provenance.verified {
        // Post-processing an unverified draft would only pile structure
        // errors on top of translation errors; hand it back for review.
        return Ok(draft);
    }
    let processed = postprocess(&draft, &options.required_imports, verifier)?;
    if options.skip_optimize || !processed.provenance.verified {
        return Ok(processed);
    }
    Ok(optimize_context(gateway, verifier, &processed))
}

/// Converts every `*.p` file under `problems_dir` (sorted by name), writing
/// one JSON file per problem into `out_dir` plus `manifest.json` listing the
/// verified ones.
pub fn convert_dir(
    gateway: &Gateway,
    verifier: &dyn Verifier,
    problems_dir: &Path,
    include_root: &Path,
    out_dir: &Path,
    options: &ConvertOptions,
) -> Result<ConvertReport, DatasetError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(problems_dir)
        .map_err(|source| DatasetError::Io {
            path: problems_dir.display().to_string(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "p"))
        .collect();
    paths.sort();

    std::fs::create_dir_all(out_dir).map_err(|source| DatasetError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    let mut report = ConvertReport::default();
    let mut entries = Vec::new();
    for path in &paths {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("unnamed")
            .to_string();
        match convert_file(gateway, verifier, path, include_root, options) {
            Ok(problem) => {
                let file = format!("{}.json", problem.theorem.id);
                save_problem(&out_dir.join(&file), &problem)?;
                if problem.provenance.verified {
                    entries.push(ManifestEntry {
                        path: file,
                        id: problem.theorem.id.clone(),
                        domain: problem.theorem.domain.clone(),
                        origin: problem.theorem.origin,
                    });
                    report.converted.push(problem.theorem.id);
                } else {
                    report.rejected.push((
                        problem.theorem.id.clone(),
                        format!(
                            "unverified after {} attempt(s)",
                            problem.provenance.translation_attempts
                        ),
                    ));
                }
            }
            Err(
                e @ (DatasetError::Tptp(_)
                | DatasetError::Structure(_)
                | DatasetError::Invalid(_)),
            ) => {
                report.rejected.push((id, e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    report.manifest = Manifest::from_entries(entries);
    report.manifest.save(&out_dir.join("manifest.json"))?;
    Ok(report)
}
