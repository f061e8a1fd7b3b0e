//! `dream`: command-line front end for the theorem-proving pipeline.
//!
//! Subcommands: `convert` (TPTP → theorem dataset), `prove` (one theorem),
//! `run` (experiment over a manifest), `report` (pass rates from a run log),
//! `validate` (manifest consistency).
//!
//! Exit codes: 0 success, 1 usage, 2 environment failure, 3 validation
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use dream_core::config::RunConfig;
use dream_core::dataset::convert_dir;
use dream_core::harness::{
    aggregate_by_domain, read_log, run_experiment, LogSink, Method, RunLog, RunOptions,
    TheoremResult,
};
use dream_core::orchestrator::ProofResult;
use dream_core::{LeanProblem, Manifest, NullSink, Prover, Theorem, Verifier, VerifyMode};

#[derive(Parser)]
#[command(
    name = "dream",
    version,
    about = "First-order theorem proving with model-driven revision: dataset \
             conversion, proving runs, reports, and manifest validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy)]
enum MethodArg {
    /// Full revision pipeline: diversify and refine across attempts.
    Dream,
    /// Independent history-free samples with the same attempt budget.
    Repeated,
}

impl From<MethodArg> for Method {
    fn from(arg: MethodArg) -> Method {
        match arg {
            MethodArg::Dream => Method::Dream,
            MethodArg::Repeated => Method::Repeated,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum ReportFormat {
    Table,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a directory of TPTP problem files into a theorem dataset.
    Convert {
        /// Directory of `.p` problem files.
        problems: PathBuf,
        /// Root for resolving include directives (defaults to the problem
        /// directory).
        #[arg(long)]
        tptp_root: Option<PathBuf>,
        /// Output dataset directory; receives one JSON file per theorem
        /// plus `manifest.json`.
        #[arg(long)]
        out: PathBuf,
        /// Config file naming backends and verifiers.
        #[arg(long)]
        config: PathBuf,
        /// Backend name from the config.
        #[arg(long)]
        backend: Option<String>,
        /// Verifier name from the config.
        #[arg(long)]
        verifier: Option<String>,
        /// Translation attempts per problem.
        #[arg(long)]
        max_attempts: Option<usize>,
        /// Skip the context-reduction step.
        #[arg(long)]
        skip_optimize: bool,
    },
    /// Prove a single theorem.
    Prove {
        /// Theorem id (looked up via --manifest) or path to a theorem JSON
        /// file.
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        config: PathBuf,
        /// Manifest used to resolve theorem ids.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        verifier: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Dream)]
        method: MethodArg,
        /// Append attempt and result records to this JSONL file.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Write each revision's annotated failure into this directory.
        #[arg(long, value_name = "DIR")]
        dump_annotated: Option<PathBuf>,
        /// Re-check the winning proof with the verifier after the run.
        #[arg(long)]
        reverify: bool,
        /// Retain checker scratch directories for inspection.
        #[arg(long)]
        keep_artifacts: bool,
    },
    /// Run an experiment over every theorem in a manifest.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Dream)]
        method: MethodArg,
        #[arg(long)]
        config: PathBuf,
        /// Run log to write (JSONL).
        #[arg(long)]
        out: PathBuf,
        /// Skip theorems that already have a result line in the log.
        #[arg(long)]
        resume: bool,
        /// Worker threads; each theorem still runs its revisions in order.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        verifier: Option<String>,
    },
    /// Summarize a run log as per-domain cumulative pass rates.
    Report {
        #[arg(long)]
        log: PathBuf,
        /// Count passes up to this revision.
        #[arg(long, default_value_t = 10)]
        cutoff: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
    /// Check a manifest against the theorem files on disk.
    Validate {
        manifest: PathBuf,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Environment(anyhow::Error),
    Validation(String),
}

fn env_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Environment(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Environment(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Validation(message)) => {
            eprintln!("{message}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Convert {
            problems,
            tptp_root,
            out,
            config,
            backend,
            verifier,
            max_attempts,
            skip_optimize,
        } => convert(
            &problems,
            tptp_root.as_deref(),
            &out,
            &config,
            backend.as_deref(),
            verifier.as_deref(),
            max_attempts,
            skip_optimize,
        ),
        Command::Prove {
            theorem,
            config,
            manifest,
            backend,
            verifier,
            method,
            log,
            dump_annotated,
            reverify,
            keep_artifacts,
        } => prove(ProveArgs {
            theorem_spec: &theorem,
            config_path: &config,
            manifest: manifest.as_deref(),
            backend: backend.as_deref(),
            verifier: verifier.as_deref(),
            method: method.into(),
            log: log.as_deref(),
            dump_annotated: dump_annotated.as_deref(),
            reverify,
            keep_artifacts,
        }),
        Command::Run {
            manifest,
            method,
            config,
            out,
            resume,
            parallel,
            backend,
            verifier,
        } => run(
            &manifest,
            method.into(),
            &config,
            &out,
            resume,
            parallel,
            backend.as_deref(),
            verifier.as_deref(),
        ),
        Command::Report {
            log,
            cutoff,
            format,
        } => report(&log, cutoff, format),
        Command::Validate { manifest, json } => validate(&manifest, json),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    RunConfig::load(path).map_err(env_err)
}

#[allow(clippy::too_many_arguments)]
fn convert(
    problems: &Path,
    tptp_root: Option<&Path>,
    out: &Path,
    config_path: &Path,
    backend: Option<&str>,
    verifier: Option<&str>,
    max_attempts: Option<usize>,
    skip_optimize: bool,
) -> Result<(), Failure> {
    let config = load_config(config_path)?;
    let gateway = config.build_gateway(backend).map_err(env_err)?;
    let checker = config.build_verifier(verifier).map_err(env_err)?;
    let mut options = config.dataset.clone();
    if let Some(n) = max_attempts {
        options.max_attempts = n;
    }
    if skip_optimize {
        options.skip_optimize = true;
    }
    let include_root = tptp_root.unwrap_or(problems);
    let report = convert_dir(
        &gateway,
        checker.as_ref(),
        problems,
        include_root,
        out,
        &options,
    )
    .map_err(env_err)?;
    println!(
        "converted {} theorem(s) into {}",
        report.converted.len(),
        out.display()
    );
    for (id, reason) in &report.rejected {
        println!("rejected {id}: {reason}");
    }
    Ok(())
}

fn resolve_theorem(spec: &str, manifest_path: Option<&Path>) -> Result<Theorem, Failure> {
    let as_path = Path::new(spec);
    if as_path.is_file() {
        let text = std::fs::read_to_string(as_path)
            .with_context(|| format!("failed to read `{spec}`"))
            .map_err(Failure::Environment)?;
        let problem: LeanProblem = serde_json::from_str(&text)
            .with_context(|| format!("`{spec}` is not a theorem file"))
            .map_err(Failure::Environment)?;
        return Ok(problem.theorem);
    }
    let manifest_path = manifest_path.ok_or_else(|| {
        Failure::Usage(format!(
            "`{spec}` is not a file; pass --manifest to resolve theorem ids"
        ))
    })?;
    let manifest = Manifest::load(manifest_path).map_err(env_err)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let theorems = manifest.load_theorems(base).map_err(env_err)?;
    theorems.into_iter().find(|t| t.id == spec).ok_or_else(|| {
        Failure::Environment(anyhow!(
            "theorem `{spec}` not found in {}",
            manifest_path.display()
        ))
    })
}

fn print_proof_outcome(result: &ProofResult) {
    if let Some(revision) = result.solved_at_revision {
        println!(
            "{}: solved at revision {revision} ({} attempt(s), {} ms)",
            result.theorem_id,
            result.attempts.len(),
            result.wall_time_ms
        );
    } else {
        println!(
            "{}: unsolved after {} attempt(s) ({} ms)",
            result.theorem_id,
            result.attempts.len(),
            result.wall_time_ms
        );
    }
    if let Some(reason) = &result.aborted {
        println!("aborted: {reason}");
    }
}

struct ProveArgs<'a> {
    theorem_spec: &'a str,
    config_path: &'a Path,
    manifest: Option<&'a Path>,
    backend: Option<&'a str>,
    verifier: Option<&'a str>,
    method: Method,
    log: Option<&'a Path>,
    dump_annotated: Option<&'a Path>,
    reverify: bool,
    keep_artifacts: bool,
}

fn prove(args: ProveArgs) -> Result<(), Failure> {
    let theorem = resolve_theorem(args.theorem_spec, args.manifest)?;
    let mut config = load_config(args.config_path)?;
    if args.keep_artifacts {
        config.keep_verifier_artifacts();
    }
    let gateway = config.build_gateway(args.backend).map_err(env_err)?;
    let checker = config.build_verifier(args.verifier).map_err(env_err)?;
    let prover = Prover::new(&gateway, checker.as_ref(), &config.session);
    let method = args.method;

    let result = match args.log {
        Some(path) => {
            let run_log = RunLog::append(path, method).map_err(env_err)?;
            let sink = LogSink {
                log: &run_log,
                method,
            };
            let result = match method {
                Method::Dream => prover.prove(&theorem, &sink),
                Method::Repeated => prover.prove_repeated(&theorem, &sink),
            };
            run_log
                .record_result(&TheoremResult::from_proof_result(&result, method))
                .map_err(|e| env_err(anyhow!("failed to write result: {e}")))?;
            result
        }
        None => match method {
            Method::Dream => prover.prove(&theorem, &NullSink),
            Method::Repeated => prover.prove_repeated(&theorem, &NullSink),
        },
    };
    print_proof_outcome(&result);
    if let Some(dir) = args.dump_annotated {
        dump_annotated(dir, &result).map_err(env_err)?;
    }
    if args.reverify {
        reverify(&theorem, checker.as_ref(), &result)?;
    }
    Ok(())
}

/// Writes each revision's annotated failure to `<dir>/<id>-rNN.lean`.
fn dump_annotated(dir: &Path, result: &ProofResult) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))?;
    let safe_id: String = result
        .theorem_id
        .chars()
        .map(|c| if c == '/' || c == '\\' { '_' } else { c })
        .collect();
    let mut written = 0;
    for attempt in &result.attempts {
        if let Some(annotated) = &attempt.annotated {
            let path = dir.join(format!("{safe_id}-r{:02}.lean", attempt.revision));
            std::fs::write(&path, &annotated.text)
                .with_context(|| format!("writing {}", path.display()))?;
            written += 1;
        }
    }
    println!("wrote {written} annotated attempt(s) to {}", dir.display());
    Ok(())
}

/// Runs the winning proof through the verifier once more; a proof that no
/// longer passes is a validation failure.
fn reverify(
    theorem: &Theorem,
    checker: &dyn Verifier,
    result: &ProofResult,
) -> Result<(), Failure> {
    let Some(revision) = result.solved_at_revision else {
        println!("reverify: no passing proof to check");
        return Ok(());
    };
    let attempt = result
        .attempts
        .iter()
        .find(|a| a.revision == revision)
        .expect("solved run keeps its passing attempt");
    let verdict = checker
        .verify(&theorem.with_proof(&attempt.proof), VerifyMode::Strict)
        .map_err(env_err)?;
    if verdict.passed() {
        println!("reverify: revision {revision} still passes");
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "reverify: revision {revision} no longer passes ({} diagnostic(s))",
            verdict.diagnostics.len()
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn run(
    manifest_path: &Path,
    method: Method,
    config_path: &Path,
    out: &Path,
    resume: bool,
    parallel: usize,
    backend: Option<&str>,
    verifier: Option<&str>,
) -> Result<(), Failure> {
    let manifest = Manifest::load(manifest_path).map_err(env_err)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let theorems = manifest.load_theorems(base).map_err(env_err)?;
    let config = load_config(config_path)?;
    let gateway = config.build_gateway(backend).map_err(env_err)?;
    let checker = config.build_verifier(verifier).map_err(env_err)?;
    let prover = Prover::new(&gateway, checker.as_ref(), &config.session);

    let options = RunOptions {
        method,
        parallel,
        resume,
    };
    let summary = run_experiment(&prover, &theorems, out, &options).map_err(env_err)?;
    println!(
        "attempted {} solved {} aborted {} skipped {} -> {}",
        summary.attempted,
        summary.solved,
        summary.aborted,
        summary.skipped,
        out.display()
    );
    Ok(())
}

fn report(log: &Path, cutoff: usize, format: ReportFormat) -> Result<(), Failure> {
    let loaded = read_log(log).map_err(env_err)?;
    let table = aggregate_by_domain(&loaded.attempts, cutoff).map_err(env_err)?;
    match format {
        ReportFormat::Table => print!("{}", table.render_text()),
        ReportFormat::Csv => print!("{}", table.render_csv()),
    }
    Ok(())
}

fn validate(manifest_path: &Path, json: bool) -> Result<(), Failure> {
    let manifest = Manifest::load(manifest_path).map_err(env_err)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let report = manifest.validate(base);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        print!("{}", report.render());
    }
    if report.ok() {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "validation failed with {} issue(s)",
            report.issues.len()
        )))
    }
}
