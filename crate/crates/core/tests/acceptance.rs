//! Acceptance suite: one test per shipped guarantee, so the harness output
//! reads as a pass/fail checklist. Everything runs hermetically on the
//! scripted backend and mock verifier; the live-checker smoke test skips
//! itself when no real checker is installed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dream_core::axiom_tree::{binomial, combinations, AxiomTree, LeafRequest, TreeParams};
use dream_core::dataset::tptp::{
    parse_formula, parse_problem, parse_problem_file, serialize_formula, serialize_problem,
    FofFormula, FofTerm, Quantifier, TptpError,
};
use dream_core::feedback::{
    align_errors, annotate_subpropositions, count_prefix_lines, strip_alignment,
    DEFAULT_COMMENT_PREFIX,
};
use dream_core::gateway::stub::ScriptedBackend;
use dream_core::gateway::Gateway;
use dream_core::harness::{
    cumulative_pass_rate, read_log, run_experiment, Method, RunOptions, RunRecord,
};
use dream_core::orchestrator::{NullSink, Prover, SessionConfig};
use dream_core::schedule::{Mode, Schedule};
use dream_core::theorem::{Theorem, TheoremOrigin};
use dream_core::verifier::mock::{CannedDiagnostic, MockVerifierConfig};
use dream_core::verifier::{
    scan_placeholders, ColumnConvention, CommandVerifier, CommandVerifierConfig, Diagnostic,
    DiagnosticOrigin, MockOutcome, MockVerifier, Severity, VerdictStatus, Verifier, VerifyMode,
};

const PREFIX: &str = DEFAULT_COMMENT_PREFIX;

fn reject_all() -> MockVerifier {
    MockVerifier::new(MockVerifierConfig {
        rules: Vec::new(),
        default_outcome: MockOutcome::Fail {
            diagnostics: vec![CannedDiagnostic {
                line: 1,
                column: 1,
                severity: Severity::Error,
                message: "unknown identifier `missing_lemma`".to_string(),
            }],
        },
    })
    .expect("static mock table")
}

fn sample_theorem(n: usize) -> Theorem {
    Theorem {
        id: format!("THM{n:03}+1"),
        domain: format!("D{}", n % 4),
        context_source: "axiom base_fact : True".to_string(),
        conjecture_source: "theorem goal : True := sorry".to_string(),
        origin: TheoremOrigin::Manual,
    }
}

/// Script covering every role the revision pipeline touches; every generated
/// proof fails under [`reject_all`], so runs exhaust the whole schedule.
fn pipeline_script() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "GenerateProof:*",
            "```lean\ntheorem goal : True := by exact missing_lemma\n```",
        ),
        (
            "ProposeAxioms:*",
            "1. the hypothesis splits into independent conjuncts\n\
             2. the middle case is vacuous\n\
             3. closure follows from reflexivity",
        ),
        ("SynthesizeAxiom:*", "combining the selected premises closes the goal"),
        (
            "ProposeStrategy:*",
            "1. apply the synthesized premise\n2. discharge the remainder by reflexivity",
        ),
        ("AnnotateSubpropositions:*", "this reply ignores the echo requirement"),
        (
            "AnalyzeFailures:*",
            "every attempt misses the same premise; introduce it before splitting",
        ),
    ]
}

fn prover_setup(pairs: Vec<(&str, &str)>) -> (Gateway, MockVerifier) {
    let backend = Arc::new(ScriptedBackend::new(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    ));
    (Gateway::new(backend), reject_all())
}

#[test]
fn schedule_replay_is_exact_and_fast_for_twenty_theorems() {
    let started = Instant::now();
    let (gateway, verifier) = prover_setup(pipeline_script());
    let config = SessionConfig::default();
    let prover = Prover::new(&gateway, &verifier, &config);
    let theorems: Vec<Theorem> = (0..20).map(sample_theorem).collect();

    let dir = tempfile::tempdir().unwrap();
    let log_path = dir.path().join("run.jsonl");
    let summary = run_experiment(&prover, &theorems, &log_path, &RunOptions::default()).unwrap();
    assert_eq!(summary.attempted, 20);
    assert_eq!(summary.solved, 0);
    assert_eq!(summary.aborted, 0);

    use Mode::{Diversify, Initial, Refine};
    let expected = vec![
        Initial, Refine, Refine, Diversify, Refine, Refine, Diversify, Refine, Refine, Refine,
    ];
    assert_eq!(Schedule::default().modes(), expected);

    let loaded = read_log(&log_path).unwrap();
    for theorem in &theorems {
        let modes: Vec<Mode> = loaded
            .attempts
            .iter()
            .filter(|a| a.theorem_id == theorem.id)
            .map(|a| a.mode)
            .collect();
        assert_eq!(modes, expected, "{}", theorem.id);
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "replay took {elapsed:?}");
    println!(
        "PASS schedule replay: 20 theorems x {} revisions, exact mode sequence, {} ms",
        expected.len(),
        elapsed.as_millis()
    );
}

fn brute_force_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (0u32..1u32 << m)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    subsets.sort();
    subsets
}

#[test]
fn axiom_tree_enumerates_k_subsets_like_brute_force() {
    for m in [3usize, 4, 5] {
        let axioms: Vec<String> = (0..m).map(|i| format!("first-level axiom {i}")).collect();
        let params = TreeParams {
            k: 2,
            ..TreeParams::default()
        };
        let mut tree = AxiomTree::new(axioms, &params);
        let mut fresh = Vec::new();
        loop {
            match tree.next() {
                Some(LeafRequest::Fresh { combination }) => {
                    tree.record_leaf(combination.clone(), format!("leaf over {combination:?}"));
                    fresh.push(combination);
                }
                Some(LeafRequest::Reuse { .. }) | None => break,
            }
        }
        assert_eq!(fresh.len() as u64, binomial(m as u64, 2), "M={m}");
        assert!(
            fresh.windows(2).all(|w| w[0] < w[1]),
            "M={m}: leaves repeat or leave lexicographic order"
        );
        assert_eq!(fresh, brute_force_subsets(m, 2), "M={m}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
    for _ in 0..1000 {
        let m = rng.gen_range(0..=12usize);
        let k = rng.gen_range(0..=m + 2);
        let got = combinations(m, k);
        assert_eq!(got, brute_force_subsets(m, k), "m={m} k={k}");
        assert_eq!(got.len() as u64, binomial(m as u64, k as u64), "m={m} k={k}");
    }
    println!(
        "PASS combinatorics: trees at M in {{3,4,5}}, k=2 plus 1000 random (m, k) pairs match brute force"
    );
}

fn random_proof_lines(rng: &mut ChaCha8Rng, case: usize) -> Vec<String> {
    let count = rng.gen_range(1..=12);
    let mut lines: Vec<String> = (0..count)
        .map(|i| match rng.gen_range(0..6) {
            0 => String::new(),
            1 => format!("  have h{i} : p{i} -> q{i} := fun hp => hq"),
            2 => format!("-- plain comment {i}, not a feedback line"),
            3 => format!("  exact And.intro (h{i} trivial) base_fact"),
            4 => format!("theorem goal_{case}_{i} : True := trivial"),
            _ => format!("    apply Or.inl; assumption -- case {i}"),
        })
        .collect();
    // A trailing empty line would be indistinguishable from a trailing
    // newline after join, shifting what counts as the last content line.
    if lines.last().is_some_and(|l| l.is_empty()) {
        *lines.last_mut().unwrap() = format!("  exact closing_{case}");
    }
    lines
}

fn random_diagnostics(
    rng: &mut ChaCha8Rng,
    line_count: usize,
    min: usize,
    max: usize,
) -> Vec<Diagnostic> {
    let count = rng.gen_range(min..=max);
    (0..count)
        .map(|d| {
            let in_range = rng.gen_bool(0.85);
            let line = if in_range {
                rng.gen_range(1..=line_count)
            } else {
                line_count + rng.gen_range(1..=3)
            };
            Diagnostic {
                line,
                column: rng.gen_range(0..=40),
                column_convention: ColumnConvention::OneBased,
                severity: if rng.gen_bool(0.8) {
                    Severity::Error
                } else {
                    Severity::Warning
                },
                message: if rng.gen_bool(0.2) {
                    format!("unsolved goals\n  case intro {d}\n  x : Nat")
                } else {
                    format!("unknown identifier `h{d}`")
                },
                origin: DiagnosticOrigin::Checker,
            }
        })
        .collect()
}

#[test]
fn alignment_inserts_one_comment_per_diagnostic_and_strips_back_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA117);
    for case in 0..500 {
        let lines = random_proof_lines(&mut rng, case);
        let trailing = rng.gen_bool(0.5);
        let source = if trailing {
            format!("{}\n", lines.join("\n"))
        } else {
            lines.join("\n")
        };
        let diagnostics = random_diagnostics(&mut rng, lines.len(), 0, 6);

        let aligned = align_errors(&source, &diagnostics, PREFIX);
        assert_eq!(
            count_prefix_lines(&aligned, PREFIX),
            diagnostics.len(),
            "case {case}: wrong number of inserted lines"
        );
        assert_eq!(
            strip_alignment(&aligned, PREFIX),
            source,
            "case {case}: strip did not reproduce the input"
        );

        // Each in-range diagnostic sits directly under the line it blames;
        // out-of-range ones gather after the last line.
        let mut expected_after = vec![0usize; lines.len()];
        for diagnostic in &diagnostics {
            let slot = if diagnostic.line >= 1 && diagnostic.line <= lines.len() {
                diagnostic.line - 1
            } else {
                lines.len() - 1
            };
            expected_after[slot] += 1;
        }
        let aligned_lines: Vec<&str> = aligned.split('\n').collect();
        let mut cursor = 0usize;
        for (i, line) in lines.iter().enumerate() {
            assert_eq!(aligned_lines[cursor], line, "case {case}: source line {i} moved");
            cursor += 1;
            let mut seen = 0;
            while cursor < aligned_lines.len() && aligned_lines[cursor].starts_with(PREFIX) {
                seen += 1;
                cursor += 1;
            }
            assert_eq!(
                seen,
                expected_after[i],
                "case {case}: comment count after line {}",
                i + 1
            );
        }
    }
    println!("PASS alignment round-trip: 500 generated (proof, diagnostics) fixtures");
}

#[test]
fn rejected_annotations_always_take_the_fallback() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFA11);
    let total = 60;
    let mut fallbacks = 0;
    for case in 0..total {
        let mut lines = random_proof_lines(&mut rng, case);
        lines.retain(|l| !l.is_empty());
        while lines.len() < 2 {
            lines.push(format!("  exact case_{case}_{} trivial", lines.len()));
        }
        let source = format!("{}\n", lines.join("\n"));
        let diagnostics = random_diagnostics(&mut rng, lines.len(), 1, 3);
        let aligned = align_errors(&source, &diagnostics, PREFIX);

        let corrupted = match case % 4 {
            0 => "no echo at all, just prose about the failure".to_string(),
            1 => {
                let target = lines[rng.gen_range(0..lines.len())].clone();
                aligned.replacen(&target, "  rewritten := by simp", 1)
            }
            2 => {
                let comment = aligned
                    .split('\n')
                    .find(|l| l.starts_with(PREFIX))
                    .expect("at least one inserted comment")
                    .to_string();
                aligned.replacen(&format!("{comment}\n"), "", 1)
            }
            _ => aligned.replacen(&format!("{}\n", lines[0]), "", 1),
        };
        assert_ne!(corrupted, aligned, "case {case}: corruption was a no-op");

        let backend = Arc::new(ScriptedBackend::new(BTreeMap::from([(
            "AnnotateSubpropositions:*".to_string(),
            format!("```lean\n{corrupted}\n```"),
        )])));
        let gateway = Gateway::new(backend);
        let annotated = annotate_subpropositions(&gateway, &aligned, PREFIX).unwrap();
        assert!(annotated.fallback, "case {case}: corrupted annotation was accepted");
        assert_eq!(annotated.text, aligned, "case {case}: fallback must keep the aligned source");
        assert_eq!(annotated.annotation_count, 0, "case {case}");
        fallbacks += 1;
    }
    assert_eq!(fallbacks, total);
    println!("PASS annotation safety: {fallbacks}/{total} forced-failure fixtures took the fallback");
}

fn synthetic_log(rng: &mut ChaCha8Rng) -> Vec<RunRecord> {
    let schedule = Schedule::default();
    let theorems = rng.gen_range(1..=30);
    let mut records = Vec::new();
    for t in 0..theorems {
        let id = format!("T{t:03}");
        let domain = format!("D{}", t % 5);
        let revisions = rng.gen_range(1..=schedule.max_revisions);
        for r in 1..=revisions {
            let pass = rng.gen_bool(0.12);
            records.push(RunRecord {
                theorem_id: id.clone(),
                domain: domain.clone(),
                method: Method::Dream,
                revision: r,
                verdict_status: if pass {
                    VerdictStatus::Pass
                } else {
                    VerdictStatus::Fail
                },
                mode: schedule.mode_for(r),
                timestamp: "2026-01-01T00:00:00Z".to_string(),
            });
            if pass && rng.gen_bool(0.8) {
                break;
            }
        }
    }
    records
}

fn brute_force_rate(records: &[RunRecord], cutoff: usize) -> (usize, usize) {
    let ids: BTreeSet<&str> = records.iter().map(|r| r.theorem_id.as_str()).collect();
    let solved = ids
        .iter()
        .filter(|id| {
            records.iter().any(|r| {
                r.theorem_id == **id
                    && r.verdict_status == VerdictStatus::Pass
                    && r.revision <= cutoff
            })
        })
        .count();
    (solved, ids.len())
}

#[test]
fn pass_rate_matches_brute_force_and_renders_the_headline_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0E4C);
    for case in 0..200 {
        let records = synthetic_log(&mut rng);
        for cutoff in 0..=12 {
            let rate = cumulative_pass_rate(&records, cutoff).unwrap();
            let (solved, attempted) = brute_force_rate(&records, cutoff);
            assert_eq!(
                (rate.solved, rate.attempted),
                (solved, attempted),
                "case {case} cutoff {cutoff}"
            );
        }
    }

    // A 44-theorem domain with exactly three solves must display as 6.8%.
    let schedule = Schedule::default();
    let mut geo = Vec::new();
    for t in 0..44usize {
        let id = format!("GEO6_{t:02}");
        let solved_at = match t {
            0 => Some(2),
            1 => Some(5),
            2 => Some(9),
            _ => None,
        };
        let last = solved_at.unwrap_or(schedule.max_revisions);
        for r in 1..=last {
            geo.push(RunRecord {
                theorem_id: id.clone(),
                domain: "GEO6".to_string(),
                method: Method::Dream,
                revision: r,
                verdict_status: if solved_at == Some(r) {
                    VerdictStatus::Pass
                } else {
                    VerdictStatus::Fail
                },
                mode: schedule.mode_for(r),
                timestamp: "2026-01-01T00:00:00Z".to_string(),
            });
        }
    }
    let rate = cumulative_pass_rate(&geo, schedule.max_revisions).unwrap();
    assert_eq!((rate.solved, rate.attempted), (3, 44));
    assert_eq!(rate.percent_display(), "6.8%");
    println!(
        "PASS metric oracle: 200 synthetic logs recounted exactly; 3/44 renders as {}",
        rate.percent_display()
    );
}

#[test]
fn cumulative_pass_rate_is_monotone_in_the_revision_cutoff() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3010);
    for case in 0..200 {
        let records = synthetic_log(&mut rng);
        let attempted = cumulative_pass_rate(&records, 0).unwrap().attempted;
        let mut previous = 0usize;
        for cutoff in 0..=12 {
            let rate = cumulative_pass_rate(&records, cutoff).unwrap();
            assert!(
                rate.solved >= previous,
                "case {case}: solved count dropped at cutoff {cutoff}"
            );
            assert_eq!(rate.attempted, attempted, "case {case}: denominator moved");
            previous = rate.solved;
        }
    }
    println!("PASS monotonicity: non-decreasing pass rate across 200 synthetic logs x 13 cutoffs");
}

fn random_name(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..6) {
        0 => ["p", "q", "r", "holds", "subset_of", "mult"][rng.gen_range(0..6)].to_string(),
        1 => format!("f{}", rng.gen_range(0..30)),
        2 => format!("pred_{}", rng.gen_range(0..9)),
        3 => ["'new york'", "'a b'", "'quoted atom'"][rng.gen_range(0..3)].to_string(),
        4 => format!("{}", rng.gen_range(0..100)),
        _ => "c".to_string(),
    }
}

fn random_variable(rng: &mut ChaCha8Rng) -> String {
    format!(
        "{}{}",
        ["X", "Y", "Z", "W", "V"][rng.gen_range(0..5)],
        rng.gen_range(0..10)
    )
}

fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> FofTerm {
    if depth == 0 || rng.gen_bool(0.5) {
        if rng.gen_bool(0.4) {
            FofTerm::Variable(random_variable(rng))
        } else {
            FofTerm::constant(random_name(rng))
        }
    } else {
        FofTerm::Function {
            name: random_name(rng),
            args: (0..rng.gen_range(1..=3))
                .map(|_| random_term(rng, depth - 1))
                .collect(),
        }
    }
}

fn random_fof(rng: &mut ChaCha8Rng, depth: usize) -> FofFormula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..6) {
            0 => FofFormula::True,
            1 => FofFormula::False,
            2 => FofFormula::eq(random_term(rng, 2), random_term(rng, 2)),
            3 => FofFormula::neq(random_term(rng, 2), random_term(rng, 2)),
            _ => FofFormula::Predicate {
                name: random_name(rng),
                args: (0..rng.gen_range(0..=3))
                    .map(|_| random_term(rng, 2))
                    .collect(),
            },
        };
    }
    match rng.gen_range(0..6) {
        0 => FofFormula::Not(Box::new(random_fof(rng, depth - 1))),
        1 => FofFormula::And(
            (0..rng.gen_range(2..=4))
                .map(|_| random_fof(rng, depth - 1))
                .collect(),
        ),
        2 => FofFormula::Or(
            (0..rng.gen_range(2..=4))
                .map(|_| random_fof(rng, depth - 1))
                .collect(),
        ),
        3 => FofFormula::Implies(
            Box::new(random_fof(rng, depth - 1)),
            Box::new(random_fof(rng, depth - 1)),
        ),
        4 => FofFormula::Iff(
            Box::new(random_fof(rng, depth - 1)),
            Box::new(random_fof(rng, depth - 1)),
        ),
        _ => FofFormula::Quantified {
            quantifier: if rng.gen_bool(0.5) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            },
            variables: (0..rng.gen_range(1..=3))
                .map(|_| random_variable(rng))
                .collect(),
            body: Box::new(random_fof(rng, depth - 1)),
        },
    }
}

fn fixture_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tptp")
}

fn fixture_problem_files() -> Vec<PathBuf> {
    let mut files = Vec::new();
    let problems = fixture_root().join("Problems");
    for domain in std::fs::read_dir(&problems).unwrap() {
        for entry in std::fs::read_dir(domain.unwrap().path()).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "p") {
                files.push(path);
            }
        }
    }
    files.sort();
    files
}

#[test]
fn parser_round_trips_generated_formulas_and_the_problem_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0F);
    for i in 0..300 {
        let ast = random_fof(&mut rng, 4);
        let text = serialize_formula(&ast);
        let parsed = parse_formula(&text).unwrap_or_else(|e| panic!("#{i}: {e}\n{text}"));
        assert_eq!(parsed, ast, "#{i}: parse(serialize) changed the tree\n{text}");
        let again = serialize_formula(&parsed);
        assert_eq!(again, text, "#{i}: serialization is not a fixed point");
        assert_eq!(parse_formula(&again).unwrap(), parsed, "#{i}");
    }

    let root = fixture_root();
    let files = fixture_problem_files();
    assert!(files.len() >= 20, "only {} problem fixtures", files.len());
    for path in &files {
        let problem = parse_problem_file(path, &root)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(problem.conjectures().count() >= 1, "{}", path.display());
        let text = serialize_problem(&problem);
        let reparsed = parse_problem(&text, "roundtrip.p")
            .unwrap_or_else(|e| panic!("{} reserialized: {e}", path.display()));
        assert_eq!(problem.formulas, reparsed.formulas, "{}", path.display());
    }

    let rejects_dir = root.join("rejects");
    let mut rejected = Vec::new();
    let mut reject_paths: Vec<PathBuf> = std::fs::read_dir(&rejects_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    reject_paths.sort();
    for path in &reject_paths {
        match parse_problem_file(path, &rejects_dir) {
            Err(TptpError::UnsupportedKind { kind, .. }) => rejected.push(kind),
            other => panic!(
                "{}: expected the dialect to be rejected by name, got {other:?}",
                path.display()
            ),
        }
    }
    assert_eq!(rejected, ["tff", "thf", "tcf", "cnf"]);
    println!(
        "PASS parser round-trip: 300 generated formulas, {} problem files, {} dialects rejected by name",
        files.len(),
        rejected.len()
    );
}

fn normalize_volatile(text: &str) -> String {
    let volatile =
        regex::Regex::new(r#""(timestamp|started_at)":"[^"]*"|"(wall_time_ms|duration_ms)":\d+"#)
            .unwrap();
    volatile.replace_all(text, r#""_":0"#).into_owned()
}

#[test]
fn identical_runs_produce_byte_identical_logs_modulo_timestamps() {
    let run = || {
        let (gateway, verifier) = prover_setup(pipeline_script());
        let config = SessionConfig::default();
        let prover = Prover::new(&gateway, &verifier, &config);
        let theorems: Vec<Theorem> = (0..4).map(sample_theorem).collect();

        let results: Vec<String> = theorems
            .iter()
            .map(|t| serde_json::to_string(&prover.prove(t, &NullSink)).unwrap())
            .collect();

        let dir = tempfile::tempdir().unwrap();
        let log_path = dir.path().join("run.jsonl");
        run_experiment(&prover, &theorems, &log_path, &RunOptions::default()).unwrap();
        let log = std::fs::read_to_string(&log_path).unwrap();
        (normalize_volatile(&log), normalize_volatile(&results.join("\n")))
    };

    let (log_a, results_a) = run();
    let (log_b, results_b) = run();
    assert!(log_a.contains("diversify"), "log never reached a diversified revision");
    assert_eq!(log_a, log_b, "run logs differ beyond timestamps");
    assert_eq!(results_a, results_b, "full proof results differ beyond timings");
    println!(
        "PASS determinism: two identical runs, {} log bytes byte-equal after timestamp masking",
        log_a.len()
    );
}

#[test]
fn placeholder_keywords_never_pass_strict_verification() {
    let accepting = MockVerifier::accept_all();

    let tripping = [
        "theorem t : True := by sorry",
        "theorem t : True := by\n  admit",
        "example : Nat :=\n  sorry",
    ];
    for source in tripping {
        let verdict = accepting.verify(source, VerifyMode::Strict).unwrap();
        assert_eq!(verdict.status, VerdictStatus::Fail, "{source:?} passed strict mode");
        assert!(
            verdict
                .diagnostics
                .iter()
                .any(|d| d.origin == DiagnosticOrigin::PlaceholderScan),
            "{source:?}: no placeholder diagnostic"
        );
    }

    let clean = [
        "-- sorry, rewritten below\ntheorem t : True := trivial",
        "/- sorry /- admit -/ still in a nested comment -/\ntheorem t : True := trivial",
        "def msg : String := \"sorry admit\"",
        "def msg : String := \"escaped \\\" sorry\"",
        "def sorry' : Nat := 0",
        "def mysorry : Nat := 0",
        "def admitting : Nat := 0",
    ];
    for source in clean {
        let verdict = accepting.verify(source, VerifyMode::Strict).unwrap();
        assert!(
            verdict.passed(),
            "{source:?} tripped the scan: {:?}",
            verdict.diagnostics
        );
    }

    let hits = scan_placeholders("theorem t : T := by\n  sorry\n");
    assert_eq!(hits.len(), 1);
    assert_eq!((hits[0].line, hits[0].column, hits[0].word), (2, 3, "sorry"));
    println!(
        "PASS placeholder gate: {} real placeholders failed, {} comment/string fixtures stayed clean",
        tripping.len(),
        clean.len()
    );
}

#[test]
fn live_checker_smoke_test_if_installed() {
    let probe = std::process::Command::new("lean").arg("--version").output();
    let available = matches!(&probe, Ok(out) if out.status.success());
    if !available {
        println!("SKIP live smoke: no `lean` checker on PATH");
        return;
    }

    let started = Instant::now();
    let verifier = CommandVerifier::new(
        "lean-live",
        CommandVerifierConfig {
            command: vec!["lean".to_string(), "{file}".to_string()],
            root: None,
            timeout_ms: 50_000,
            raw_output_limit: 65_536,
            column_convention: ColumnConvention::ZeroBased,
            keep_artifacts: false,
        },
    )
    .unwrap();

    let good = verifier
        .verify("theorem live_good : 1 + 1 = 2 := rfl\n", VerifyMode::Strict)
        .unwrap();
    assert!(good.passed(), "known-good fixture failed: {:?}", good.diagnostics);

    let bad = verifier
        .verify(
            "-- deliberately broken\ntheorem live_bad : 1 + 1 = 3 := rfl\n",
            VerifyMode::Strict,
        )
        .unwrap();
    assert_eq!(bad.status, VerdictStatus::Fail);
    assert!(
        bad.diagnostics.iter().any(|d| d.line == 2),
        "expected a diagnostic on line 2: {:?}",
        bad.diagnostics
    );

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "live smoke took {elapsed:?}");
    println!(
        "PASS live smoke: known-good and known-bad fixtures verified in {} ms",
        elapsed.as_millis()
    );
}
