//! Command-line driver for the series toolkit.
//!
//! Subcommands transform moment/cumulant documents, build effective actions,
//! run the seeded verification suites, list admissible trees with their
//! symbolic terms, and sample random-matrix trace moments.
//!
//! Exit codes:
//!   0  success (all checks passed, where applicable)
//!   1  a verification suite reported violations
//!   2  unreadable input: missing file, malformed JSON, or schema violation
//!   3  domain precondition failure (wrong constant term, singular
//!      covariance, resource limits, unknown suite or model)
//!
//! All outputs are deterministic functions of (inputs, flags, seed).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use planc_core::{
    action_to_json, cumulants_from_moments, effective_action, enumerate_admissible,
    moments_from_cumulants, parse_document, render, render_term, sample_moments, series_from_json,
    series_to_json, suite, symbolic_term, tree_to_json, AnySeries, CoreError, JsonError,
    SampleSpec, Scalar, Series, SuiteConfig, VerifyReport,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "planc",
    version,
    about = "Transforms between moment and cumulant series, builds effective actions, \
             lists admissible trees, verifies the algebra identities, and samples \
             random-matrix moments",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a moment series document into its cumulant series
    Cumulants(ConvertArgs),
    /// Convert a cumulant series document into its moment series
    Moments(ConvertArgs),
    /// Build the effective action of a moment or cumulant document
    EffectiveAction(ActionArgs),
    /// Run one of the seeded identity suites
    Verify(VerifyArgs),
    /// List all admissible trees with the given number of marks
    Trees(TreesArgs),
    /// Sample random-matrix trace moments for a sampling specification
    SampleMoments(SampleArgs),
}

#[derive(Args)]
struct ConvertArgs {
    /// Input series document (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Output path; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ActionArgs {
    /// Input series document (JSON); a unital series is read as moments and
    /// converted, a constant-free one is used as cumulants directly
    #[arg(long)]
    input: PathBuf,
    /// Output path for the action document; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Optional CSV table of the action coefficients ("word,value")
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: products, legendre, two-point, three-point, theorem, or
    /// univariate
    #[arg(long)]
    suite: String,
    /// Alphabet size for the random instances
    #[arg(long, default_value_t = 2)]
    alphabet: u8,
    /// Truncation degree for the random instances
    #[arg(long, default_value_t = 5)]
    degree: usize,
    /// Seed for the random instances; identical seeds reproduce the run
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Emit the reports as a JSON document instead of text lines
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TreesArgs {
    /// Number of boundary marks (at least 2)
    #[arg(long)]
    n: usize,
    /// Output path; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Sampling specification (JSON with model, matrix_dim, samples,
    /// letters, max_degree)
    #[arg(long)]
    spec: PathBuf,
    /// Seed; identical seeds reproduce the moments bit for bit
    #[arg(long)]
    seed: u64,
    /// Output path; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Ingest(String),
    Domain(CoreError),
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        Failure::Ingest(e.to_string())
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Domain(e)
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Ingest(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Ingest(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_series(path: &Path) -> Result<AnySeries, Failure> {
    let doc = parse_document(&read_file(path)?)?;
    Ok(series_from_json(&doc)?)
}

fn run_cumulants(args: &ConvertArgs) -> Result<ExitCode, Failure> {
    let out = match read_series(&args.input)? {
        AnySeries::Rational(m) => series_to_json(&cumulants_from_moments(&m)?, Some("cumulants")),
        AnySeries::Float64(m) => series_to_json(&cumulants_from_moments(&m)?, Some("cumulants")),
    };
    write_output(args.output.as_deref(), &format!("{}\n", render(&out)))?;
    Ok(ExitCode::SUCCESS)
}

fn run_moments(args: &ConvertArgs) -> Result<ExitCode, Failure> {
    let out = match read_series(&args.input)? {
        AnySeries::Rational(k) => series_to_json(&moments_from_cumulants(&k)?, Some("moments")),
        AnySeries::Float64(k) => series_to_json(&moments_from_cumulants(&k)?, Some("moments")),
    };
    write_output(args.output.as_deref(), &format!("{}\n", render(&out)))?;
    Ok(ExitCode::SUCCESS)
}

/// Builds the action document plus the coefficient table for either scalar
/// kind; a unital input is converted from moments first.
fn build_action<S: Scalar>(input: Series<S>) -> Result<(Value, String), CoreError> {
    let k = if input.in_g1() {
        cumulants_from_moments(&input)?
    } else {
        input
    };
    let action = effective_action(&k)?;
    let mut table = String::from("word,value\n");
    for (w, v) in action.ell.support() {
        table.push_str(&format!("{w},{}\n", v.render()));
    }
    Ok((action_to_json(&action), table))
}

fn run_effective_action(args: &ActionArgs) -> Result<ExitCode, Failure> {
    let (doc, table) = match read_series(&args.input)? {
        AnySeries::Rational(s) => build_action(s)?,
        AnySeries::Float64(s) => build_action(s)?,
    };
    write_output(args.output.as_deref(), &format!("{}\n", render(&doc)))?;
    if let Some(path) = &args.table {
        write_output(Some(path), &table)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn format_report_line(r: &VerifyReport) -> String {
    if r.passed() {
        format!("ok   {} (degree {})\n", r.identity, r.max_checked_degree)
    } else {
        let mut line = format!(
            "FAIL {} (degree {}): {} violations\n",
            r.identity,
            r.max_checked_degree,
            r.violations.len()
        );
        for v in &r.violations {
            let word = v
                .word
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(".");
            line.push_str(&format!("     word=[{word}] lhs={} rhs={}\n", v.lhs, v.rhs));
        }
        line
    }
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, Failure> {
    let s = suite(&args.suite)?;
    let cfg = SuiteConfig {
        alphabet: args.alphabet,
        degree: args.degree,
        seed: args.seed,
    };
    let reports = s.run(&cfg)?;
    let failures = reports.iter().filter(|r| !r.passed()).count();
    if args.json {
        let doc = json!({
            "suite": s.name(),
            "alphabet": cfg.alphabet,
            "degree": cfg.degree,
            "seed": cfg.seed,
            "checks": reports.len(),
            "failures": failures,
            "reports": serde_json::to_value(&reports)
                .expect("reports always serialize"),
        });
        println!("{}", render(&doc));
    } else {
        println!("suite {}: {}", s.name(), s.describe());
        println!(
            "config: alphabet={} degree={} seed={}",
            cfg.alphabet, cfg.degree, cfg.seed
        );
        for r in &reports {
            print!("{}", format_report_line(r));
        }
        println!(
            "suite {}: {} checks, {} failures",
            s.name(),
            reports.len(),
            failures
        );
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_trees(args: &TreesArgs) -> Result<ExitCode, Failure> {
    let trees = enumerate_admissible(args.n)?;
    let rendered: Vec<Value> = trees
        .iter()
        .map(|t| {
            let mut doc = tree_to_json(t);
            let term = render_term(&symbolic_term(t));
            doc.as_object_mut()
                .expect("tree documents are objects")
                .insert("term".into(), Value::String(term));
            doc
        })
        .collect();
    let doc = json!({
        "marks": args.n,
        "count": rendered.len(),
        "trees": rendered,
    });
    write_output(args.output.as_deref(), &format!("{}\n", render(&doc)))?;
    Ok(ExitCode::SUCCESS)
}

fn run_sample_moments(args: &SampleArgs) -> Result<ExitCode, Failure> {
    let text = read_file(&args.spec)?;
    let spec: SampleSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Ingest(format!("bad sampling spec: {e}")))?;
    let m = sample_moments(&spec, args.seed)?;
    let doc = series_to_json(&m, Some("moments"));
    write_output(args.output.as_deref(), &format!("{}\n", render(&doc)))?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Cumulants(args) => run_cumulants(args),
        Command::Moments(args) => run_moments(args),
        Command::EffectiveAction(args) => run_effective_action(args),
        Command::Verify(args) => run_verify(args),
        Command::Trees(args) => run_trees(args),
        Command::SampleMoments(args) => run_sample_moments(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Ingest(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
