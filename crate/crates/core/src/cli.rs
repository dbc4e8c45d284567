//! The `strongeq` command line.
//!
//! Exit codes: 0 for strong equivalence or a proof, 1 for a refutation,
//! 2 when nothing could be decided, 3 for usage and input errors and 4
//! when a prover proved a pair known not to be strongly equivalent.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::ast::Program;
use crate::ht_map::{apply_if_needed, pair_theory, HtTheory, PrimeStyle, PrimedSignature};
use crate::oracle::{check_strong_equivalence_bounded, check_strong_equivalence_ground, EquivalenceVerdict, Value};
use crate::parser::{parse_program_with_warnings, parse_term};
use crate::prover_driver::{run_matrix, run_prover, MatrixProblem, Outcome, ProverConfig, ProverSuite};
use crate::render::{render_human, render_tptp};
use crate::simplify::{simplify_all, SimplifyConfig};
use crate::translate::{tau_star_program, TranslationOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_UNSOUND: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Tptp,
}

#[derive(Debug, Parser)]
#[command(name = "strongeq", version, about = "Strong equivalence of logic programs via classical first-order logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the formulas of one program
    Translate {
        program: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Eliminate redundant quantifiers and constants
        #[arg(long)]
        simplify: bool,
    },
    /// Build the equivalence problem for two programs, optionally run provers on it
    Verify {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "tptp")]
        format: Format,
        #[arg(long)]
        simplify: bool,
        /// Prover ids to run (repeatable)
        #[arg(long = "prover")]
        provers: Vec<String>,
        /// TOML file describing the provers
        #[arg(long)]
        config: Option<PathBuf>,
        /// Timeout per prover in seconds
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Decide strong equivalence of two programs by enumeration
    Oracle {
        left: PathBuf,
        right: PathBuf,
        /// Values for the rule variables of programs with variables
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        domain: Vec<String>,
    },
    /// Run the configured provers on every pair listed in DIR/manifest.toml
    Matrix {
        dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        timeout: Option<u64>,
        /// Prover ids to run (default: all installed)
        #[arg(long = "prover")]
        provers: Vec<String>,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        simplify: bool,
    },
}

/// An error with its exit code already decided.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult = Result<i32, Failure>;

/// Reads and parses a program, reporting warnings on `err`.
pub fn load_program(path: &Path, err: &mut dyn Write) -> Result<Program, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (program, warnings) = parse_program_with_warnings(&text).map_err(|e| format!("{}:{e}", path.display()))?;
    for w in warnings {
        let _ = writeln!(err, "warning: {}:{w}", path.display());
    }
    Ok(program)
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Program, Failure> {
    load_program(path, err).map_err(usage)
}

fn translate_program(program: &Program, simplify: bool) -> TranslationOutput {
    let mut t = tau_star_program(program);
    if simplify {
        t.formulas = simplify_all(&t.formulas, &SimplifyConfig::default());
    }
    t
}

fn info_line(theory: &HtTheory) -> &'static str {
    if theory.mapped {
        "info: mapped to output semantics: classical logic"
    } else {
        "info: output semantics: classical logic"
    }
}

/// The equivalence problem for two programs.
pub fn pair_problem(left: &Program, right: &Program, simplify: bool) -> Result<HtTheory, String> {
    pair_theory(&translate_program(left, simplify), &translate_program(right, simplify)).map_err(|e| e.to_string())
}

/// The theory of one program, mapped if it needs here-and-there.
pub fn single_theory(program: &Program, simplify: bool) -> Result<HtTheory, String> {
    let t = translate_program(program, simplify);
    let sig = PrimedSignature::new(&t.signature, PrimeStyle::Tick);
    apply_if_needed(&t, &sig).map_err(|e| e.to_string())
}

fn emit(theory: &HtTheory, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let text = match format {
        Format::Human => render_human(theory),
        Format::Tptp => render_tptp(theory).serialize(),
    };
    out.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
}

fn suite(config: Option<&Path>, timeout: Option<u64>, ids: &[String]) -> Result<Vec<ProverConfig>, Failure> {
    let mut suite = match config {
        Some(path) => ProverSuite::from_file(path).map_err(|e| usage(e.to_string()))?,
        None => ProverSuite::default(),
    };
    if let Some(secs) = timeout {
        if secs == 0 {
            return Err(usage("timeout must be positive"));
        }
        suite = suite.with_timeout(Duration::from_secs(secs));
    }
    if ids.is_empty() {
        return Ok(suite.installed().into_iter().cloned().collect());
    }
    ids.iter()
        .map(|id| {
            suite
                .provers
                .iter()
                .find(|p| &p.id == id)
                .cloned()
                .or_else(|| config.is_none().then(|| ProverConfig::new(id.clone(), id.clone())))
                .ok_or_else(|| usage(format!("prover `{id}` is not configured")))
        })
        .collect()
}

fn verdict_code(outcomes: &[Outcome]) -> i32 {
    if outcomes.contains(&Outcome::Proved) {
        EXIT_OK
    } else if outcomes.contains(&Outcome::Disproved) {
        EXIT_REFUTED
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn parse_value(text: &str) -> Result<Value, Failure> {
    let term = parse_term(text.trim()).map_err(|e| usage(format!("domain value `{text}`: {e}")))?;
    let values = crate::oracle::grounding::value_set(&term).map_err(|e| usage(e.to_string()))?;
    match values.into_iter().collect::<Vec<_>>().as_slice() {
        [v] => Ok(v.clone()),
        _ => Err(usage(format!("domain value `{text}` must denote exactly one value"))),
    }
}

fn oracle(left: &Path, right: &Path, domain: &[String], out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let a = load(left, err)?;
    let b = load(right, err)?;
    let io = |e: std::io::Error| usage(e.to_string());
    if a.is_ground() && b.is_ground() {
        return match check_strong_equivalence_ground(&a, &b).map_err(|e| usage(e.to_string()))? {
            EquivalenceVerdict::StronglyEquivalent => {
                writeln!(out, "StronglyEquivalent").map_err(io)?;
                Ok(EXIT_OK)
            }
            EquivalenceVerdict::NotStronglyEquivalent(w) => {
                writeln!(out, "NotStronglyEquivalent").map_err(io)?;
                writeln!(out, "witness: {w}").map_err(io)?;
                Ok(EXIT_REFUTED)
            }
        };
    }
    let values = domain.iter().map(|d| parse_value(d)).collect::<Result<Vec<_>, _>>()?;
    let shown: Vec<String> = values.iter().map(Value::to_string).collect();
    let bounded = check_strong_equivalence_bounded(&a, &b, &values).map_err(|e| usage(e.to_string()))?;
    writeln!(
        out,
        "bounded check: rule variables instantiated over {{{}}}; this is not a decision",
        shown.join(", ")
    )
    .map_err(io)?;
    match bounded.verdict {
        EquivalenceVerdict::StronglyEquivalent => {
            writeln!(out, "NotRefuted").map_err(io)?;
            Ok(EXIT_INCONCLUSIVE)
        }
        EquivalenceVerdict::NotStronglyEquivalent(w) => {
            writeln!(out, "RefutedOnInstances").map_err(io)?;
            writeln!(out, "witness: {w}").map_err(io)?;
            Ok(EXIT_REFUTED)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Equivalent,
    NotEquivalent,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestPair {
    pub example: u32,
    pub a: String,
    pub b: String,
    pub expected: Expected,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "pair")]
    pub pairs: Vec<ManifestPair>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self, String> {
        let path = dir.join("manifest.toml");
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn matrix(
    dir: &Path,
    provers: Vec<ProverConfig>,
    parallel: usize,
    csv: bool,
    simplify: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let manifest = Manifest::load(dir).map_err(usage)?;
    let mut problems = Vec::new();
    for pair in &manifest.pairs {
        let a = load(&dir.join(&pair.a), err)?;
        let b = load(&dir.join(&pair.b), err)?;
        let theory = pair_problem(&a, &b, simplify).map_err(usage)?;
        problems.push(MatrixProblem {
            name: format!("Example {}", pair.example),
            text: render_tptp(&theory).serialize(),
            known_not_equivalent: matches!(pair.expected, Expected::NotEquivalent),
        });
    }
    if provers.is_empty() {
        let _ = writeln!(err, "error: no prover is installed or configured");
        return Ok(EXIT_INCONCLUSIVE);
    }
    let report = run_matrix(&problems, &provers, parallel);
    let table = if csv { report.to_csv() } else { report.to_markdown() };
    out.write_all(table.as_bytes()).map_err(|e| usage(e.to_string()))?;
    if !report.is_sound() {
        for (problem, prover) in &report.violations {
            let _ = writeln!(err, "error: SOUNDNESS VIOLATION: {prover} proved {problem}, which is not strongly equivalent");
        }
        return Ok(EXIT_UNSOUND);
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Translate {
            program,
            format,
            simplify,
        } => {
            let p = load(&program, err)?;
            let theory = single_theory(&p, simplify).map_err(usage)?;
            emit(&theory, format, out)?;
            let _ = writeln!(err, "{}", info_line(&theory));
            Ok(EXIT_OK)
        }
        Command::Verify {
            left,
            right,
            format,
            simplify,
            provers,
            config,
            timeout,
        } => {
            let a = load(&left, err)?;
            let b = load(&right, err)?;
            let theory = pair_problem(&a, &b, simplify).map_err(usage)?;
            if provers.is_empty() && config.is_none() {
                emit(&theory, format, out)?;
                let _ = writeln!(err, "{}", info_line(&theory));
                return Ok(EXIT_OK);
            }
            let configs = suite(config.as_deref(), timeout, &provers)?;
            if configs.is_empty() {
                let _ = writeln!(err, "error: no prover is installed or configured");
                return Ok(EXIT_INCONCLUSIVE);
            }
            let problem = render_tptp(&theory).serialize();
            let mut outcomes = Vec::new();
            for cfg in &configs {
                let v = run_prover(&problem, cfg);
                let _ = writeln!(
                    out,
                    "{}: {} ({:.3} s){}",
                    cfg.id,
                    v.outcome,
                    v.wall_time.as_secs_f64(),
                    v.status_line.as_deref().map(|l| format!(" [{l}]")).unwrap_or_default()
                );
                if !v.detail.is_empty() && v.outcome == Outcome::ToolError {
                    let _ = writeln!(err, "{}: {}", cfg.id, v.detail);
                }
                outcomes.push(v.outcome);
            }
            Ok(verdict_code(&outcomes))
        }
        Command::Oracle { left, right, domain } => oracle(&left, &right, &domain, out, err),
        Command::Matrix {
            dir,
            config,
            timeout,
            provers,
            csv,
            simplify,
        } => {
            let parallel = match &config {
                Some(path) => ProverSuite::from_file(path).map_err(|e| usage(e.to_string()))?.parallel,
                None => 1,
            };
            let configs = suite(config.as_deref(), timeout, &provers)?;
            matrix(&dir, configs, parallel, csv, simplify, out, err)
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
