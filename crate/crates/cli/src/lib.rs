//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or verification failure, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use wgshift_core::adjoint::adjoint_decompose;
use wgshift_core::analysis::{classify_with, fiber_norm, max_fiber_cardinality};
use wgshift_core::io::{
    load_alphabet, load_operator, load_sum, load_terms, load_vector, manifest_source,
    save_operator, save_vector, AdjointManifest,
};
use wgshift_core::semigroup::{check_closure_with, run_truncation_study, NullSequenceRule};
use wgshift_core::tolerance::{Tolerance, TOLERANCE_ENV};
use wgshift_core::verify::{verify_decomposition, VerifyOptions, VerifyReport};
use wgshift_core::{Error, WgsOperator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wgshift",
    version,
    about = "Weighted generalized shift operators: adjoints, classification, verification"
)]
struct Cli {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimension, image size, max fiber cardinality and norm of an operator.
    Info { operator: PathBuf },
    /// Apply an operator to a vector (JSON list of [re, im] pairs).
    Apply {
        operator: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
    /// Decompose the adjoint into weighted generalized shifts.
    Adjoint {
        operator: PathBuf,
        /// Write one document per term plus manifest.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the classification report as JSON.
    Classify { operator: PathBuf },
    /// Check an operator (or an adjoint manifest) against the dense oracle.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that the adjoint of a sum stays within a weight alphabet.
    Closure {
        manifest: PathBuf,
        #[arg(long)]
        alphabet: PathBuf,
    },
    /// Adjoint term counts of the null-sequence counterexample family.
    Study {
        /// `reciprocal`, `geometric:<ratio>` or `geometric:<ratio>:<scale>`.
        #[arg(long, default_value = "reciprocal")]
        rule: String,
        /// Comma-separated ascending dimensions, each >= 2.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Also write the study as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Error(Error),
    /// Message already written; exit 1.
    Reported,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(Error::Io(e))
    }
}

type CmdResult = Result<(), Failure>;

struct Context<'a> {
    json: bool,
    tolerance: Tolerance,
    tolerance_from_env: bool,
    out: &'a mut dyn Write,
}

impl Context<'_> {
    fn tolerance_json(&self) -> Value {
        json!({
            "atol": self.tolerance.atol,
            "rtol": self.tolerance.rtol,
            "source": if self.tolerance_from_env { TOLERANCE_ENV } else { "default" },
        })
    }

    fn emit_json(&mut self, v: &Value) -> std::io::Result<()> {
        writeln!(
            self.out,
            "{}",
            serde_json::to_string_pretty(v).expect("values serialize")
        )
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))
}

fn read_operator(path: &Path) -> Result<WgsOperator, Error> {
    load_operator(&read(path)?).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };

    let (tolerance, tolerance_from_env) = match Tolerance::from_env() {
        Ok(Some(t)) => (t, true),
        Ok(None) => (Tolerance::default(), false),
        Err(e) => {
            let _ = writeln!(err, "error: {TOLERANCE_ENV}: {e}");
            return EXIT_USAGE;
        }
    };
    let mut ctx = Context {
        json: cli.json,
        tolerance,
        tolerance_from_env,
        out,
    };

    let result = match cli.command {
        Command::Info { operator } => info(&mut ctx, &operator),
        Command::Apply { operator, vector } => apply(&mut ctx, &operator, &vector),
        Command::Adjoint { operator, out } => adjoint(&mut ctx, &operator, out.as_deref()),
        Command::Classify { operator } => classify(&mut ctx, &operator),
        Command::Verify {
            input,
            trials,
            seed,
        } => verify(&mut ctx, err, &input, trials, seed),
        Command::Closure { manifest, alphabet } => closure(&mut ctx, &manifest, &alphabet),
        Command::Study { rule, dims, out } => study(&mut ctx, &rule, &dims, out.as_deref()),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Reported) => EXIT_FAILURE,
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn info(ctx: &mut Context, path: &Path) -> CmdResult {
    let op = read_operator(path)?;
    let norm = fiber_norm(&op);
    let card = max_fiber_cardinality(op.phi());
    if ctx.json {
        ctx.emit_json(&json!({
            "n": op.n(),
            "image_size": op.phi().image_size(),
            "max_fiber_cardinality": card,
            "fiber_norm": norm,
        }))?;
    } else {
        writeln!(ctx.out, "n: {}", op.n())?;
        writeln!(ctx.out, "image size: {}", op.phi().image_size())?;
        writeln!(ctx.out, "max fiber cardinality: {card}")?;
        writeln!(ctx.out, "fiber norm: {norm}")?;
    }
    Ok(())
}

fn apply(ctx: &mut Context, op_path: &Path, vec_path: &Path) -> CmdResult {
    let op = read_operator(op_path)?;
    let x = load_vector(&read(vec_path)?)
        .map_err(|e| Error::Validation(format!("{}: {e}", vec_path.display())))?;
    writeln!(ctx.out, "{}", save_vector(&op.apply(&x)?))?;
    Ok(())
}

fn adjoint(ctx: &mut Context, path: &Path, out_dir: Option<&Path>) -> CmdResult {
    let op = read_operator(path)?;
    let d = adjoint_decompose(&op);
    let width = d.len().to_string().len().max(4);
    let names: Vec<String> = (1..=d.len())
        .map(|i| format!("term_{i:0width$}.json"))
        .collect();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        for (name, term) in names.iter().zip(d.terms()) {
            fs::write(dir.join(name), save_operator(term) + "\n")?;
        }
        let manifest = AdjointManifest::new(&op, &d, names.clone());
        fs::write(dir.join("manifest.json"), manifest.to_json() + "\n")?;
    }
    if ctx.json {
        ctx.emit_json(&json!({
            "term_count": d.len(),
            "psi": d.psi(),
            "fiber_counts": d.fiber_counts(),
            "source_norm": d.source_norm(),
            "out": out_dir.map(|p| p.display().to_string()),
        }))?;
    } else {
        writeln!(ctx.out, "terms: {}", d.len())?;
    }
    Ok(())
}

fn classify(ctx: &mut Context, path: &Path) -> CmdResult {
    let op = read_operator(path)?;
    let report = classify_with(&op, &ctx.tolerance);
    let mut v = serde_json::to_value(&report).expect("reports serialize");
    v["tolerance"] = ctx.tolerance_json();
    ctx.emit_json(&v)?;
    Ok(())
}

fn print_verify(ctx: &mut Context, report: &VerifyReport) -> std::io::Result<()> {
    if ctx.json {
        let mut v = serde_json::to_value(report).expect("reports serialize");
        v["passed"] = json!(report.passed());
        v["tolerance"] = ctx.tolerance_json();
        return ctx.emit_json(&v);
    }
    writeln!(
        ctx.out,
        "n={} terms={} trials={} seed={}",
        report.n, report.term_count, report.trials, report.seed
    )?;
    for c in &report.checks {
        writeln!(
            ctx.out,
            "  {:<28} max_residual={:<12.3e} tol={:<8.1e} {}",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        )?;
    }
    writeln!(
        ctx.out,
        "verify: {}",
        if report.passed() { "PASS" } else { "FAIL" }
    )
}

fn verify(
    ctx: &mut Context,
    err: &mut dyn Write,
    path: &Path,
    trials: usize,
    seed: u64,
) -> CmdResult {
    let text = read(path)?;
    let wrap = |e: Error| Error::Validation(format!("{}: {e}", path.display()));
    let is_manifest = serde_json::from_str::<Value>(&text)
        .map(|v| v.get("terms").is_some())
        .unwrap_or(false);
    let (op, terms) = if is_manifest {
        let source = manifest_source(&text).map_err(wrap)?.ok_or_else(|| {
            wrap(Error::Validation(
                "manifest has no \"source\" operator".into(),
            ))
        })?;
        let terms = load_terms(&text, path.parent()).map_err(wrap)?;
        (source, terms)
    } else {
        let op = load_operator(&text).map_err(wrap)?;
        let terms = adjoint_decompose(&op).into_terms();
        (op, terms)
    };
    let opts = VerifyOptions {
        trials,
        seed,
        tolerance: ctx.tolerance,
        ..VerifyOptions::default()
    };
    let report = verify_decomposition(&op, &terms, &opts)?;
    print_verify(ctx, &report)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        writeln!(err, "verification failed: {}", failed.join(", "))?;
        Err(Failure::Reported)
    }
}

fn closure(ctx: &mut Context, manifest: &Path, alphabet: &Path) -> CmdResult {
    let s = load_sum(&read(manifest)?, manifest.parent())
        .map_err(|e| Error::Validation(format!("{}: {e}", manifest.display())))?;
    let a = load_alphabet(&read(alphabet)?)
        .map_err(|e| Error::Validation(format!("{}: {e}", alphabet.display())))?;
    let report = check_closure_with(&s, &a, &ctx.tolerance)?;
    if ctx.json {
        let mut v = serde_json::to_value(&report).expect("reports serialize");
        v["tolerance"] = ctx.tolerance_json();
        ctx.emit_json(&v)?;
    } else {
        writeln!(ctx.out, "closed: {}", report.closed)?;
        writeln!(ctx.out, "adjoint terms: {}", report.adjoint_term_count)?;
        for w in &report.witnesses {
            writeln!(
                ctx.out,
                "  outside alphabet: term {} beta {} weight [{}, {}]",
                w.term, w.beta, w.weight[0], w.weight[1]
            )?;
        }
    }
    if report.closed {
        Ok(())
    } else {
        Err(Failure::Reported)
    }
}

fn study(ctx: &mut Context, rule: &str, dims: &[usize], out: Option<&Path>) -> CmdResult {
    let rule: NullSequenceRule = rule.parse()?;
    let s = run_truncation_study(&rule, dims)?;
    let v = serde_json::to_value(&s).expect("studies serialize");
    if let Some(path) = out {
        fs::write(
            path,
            serde_json::to_string_pretty(&v).expect("values serialize") + "\n",
        )?;
    }
    if ctx.json {
        ctx.emit_json(&v)?;
    } else {
        writeln!(ctx.out, "rule: {rule}")?;
        write!(ctx.out, "{}", s.to_table())?;
    }
    Ok(())
}
