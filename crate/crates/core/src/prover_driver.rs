//! Running external theorem provers on TPTP problems.
//!
//! Each run writes the problem to a temporary file, starts the prover in a
//! process group of its own and kills the whole group once the timeout plus
//! a grace period has passed. The verdict is read from the SZS status line.

use std::fmt;
use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);
pub const DEFAULT_GRACE: Duration = Duration::from_secs(5);
/// Prefix of the environment variables that override prover paths, as in
/// `STRONGEQ_PROVER_VAMPIRE=/opt/vampire/bin/vampire`.
pub const ENV_PREFIX: &str = "STRONGEQ_PROVER_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProverKind {
    Cvc4,
    Princess,
    Vampire,
    Zipperposition,
    Custom,
}

impl ProverKind {
    pub fn from_id(id: &str) -> ProverKind {
        match id.to_ascii_lowercase().as_str() {
            "cvc4" | "cvc5" => ProverKind::Cvc4,
            "princess" => ProverKind::Princess,
            "vampire" => ProverKind::Vampire,
            "zipperposition" | "zipper" => ProverKind::Zipperposition,
            _ => ProverKind::Custom,
        }
    }

    /// Argument template; see [`ProverConfig::arguments`] for placeholders.
    pub fn default_args(self) -> Vec<String> {
        let args: &[&str] = match self {
            ProverKind::Cvc4 => &["--lang", "tptp", "--stats", "--tlimit={timeout_ms}", "{file}"],
            ProverKind::Princess => &["-inputFormat=tptp", "-portfolio=casc", "-timeout={timeout_ms}", "{file}"],
            ProverKind::Vampire => &["--mode", "casc", "--time_limit", "{timeout}", "--cores", "{cores}", "{file}"],
            ProverKind::Zipperposition => &["-timeout", "{timeout}", "{file}"],
            ProverKind::Custom => &["{file}"],
        };
        args.iter().map(|s| s.to_string()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverConfig {
    pub id: String,
    pub kind: ProverKind,
    pub executable: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
    pub grace: Duration,
    pub cores: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cannot read prover configuration {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid prover configuration: {0}")]
    Invalid(String),
}

impl ProverConfig {
    pub fn new(id: impl Into<String>, executable: impl Into<PathBuf>) -> Self {
        let id = id.into();
        let kind = ProverKind::from_id(&id);
        ProverConfig {
            id,
            kind,
            executable: executable.into(),
            args: kind.default_args(),
            timeout: DEFAULT_TIMEOUT,
            grace: DEFAULT_GRACE,
            cores: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_grace(mut self, grace: Duration) -> Self {
        self.grace = grace;
        self
    }

    pub fn with_args(mut self, args: Vec<String>) -> Self {
        self.args = args;
        self
    }

    pub fn with_cores(mut self, cores: Option<u32>) -> Self {
        self.cores = cores;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.timeout.is_zero() {
            return Err(ConfigError::Invalid(format!("{}: timeout must be positive", self.id)));
        }
        Ok(())
    }

    /// Expands the template: `{file}` is the problem path, `{timeout}` the
    /// timeout in seconds, `{timeout_ms}` in milliseconds and `{cores}` the
    /// core count. Without a core count, an element mentioning `{cores}` is
    /// dropped together with a flag right before it. If `{file}` does not
    /// occur the path is appended.
    pub fn arguments(&self, file: &Path) -> Vec<String> {
        let file = file.display().to_string();
        let mut out: Vec<String> = Vec::new();
        let mut saw_file = false;
        for arg in &self.args {
            if arg.contains("{cores}") && self.cores.is_none() {
                if out.last().is_some_and(|prev| prev.starts_with('-') && !prev.contains('=')) {
                    out.pop();
                }
                continue;
            }
            saw_file |= arg.contains("{file}");
            out.push(
                arg.replace("{file}", &file)
                    .replace("{timeout_ms}", &self.timeout.as_millis().to_string())
                    .replace("{timeout}", &self.timeout.as_secs().max(1).to_string())
                    .replace("{cores}", &self.cores.unwrap_or(1).to_string()),
            );
        }
        if !saw_file {
            out.push(file);
        }
        out
    }

    /// The executable as an existing path, searching `PATH` for bare names.
    pub fn resolve(&self) -> Option<PathBuf> {
        let runnable = |p: &Path| {
            use std::os::unix::fs::PermissionsExt;
            p.metadata()
                .map(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
                .unwrap_or(false)
        };
        if self.executable.components().count() > 1 {
            return runnable(&self.executable).then(|| self.executable.clone());
        }
        let path = std::env::var_os("PATH")?;
        std::env::split_paths(&path)
            .map(|dir| dir.join(&self.executable))
            .find(|p| runnable(p))
    }

    pub fn is_installed(&self) -> bool {
        self.resolve().is_some()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    parallel: Option<usize>,
    #[serde(default)]
    prover: Vec<FileProver>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileProver {
    id: String,
    kind: Option<ProverKind>,
    path: Option<PathBuf>,
    args: Option<Vec<String>>,
    timeout: Option<u64>,
    grace: Option<u64>,
    cores: Option<u32>,
}

/// Provers to run and how many runs may happen at the same time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverSuite {
    pub provers: Vec<ProverConfig>,
    pub parallel: usize,
}

impl Default for ProverSuite {
    /// The four provers under their usual executable names.
    fn default() -> Self {
        let provers = ["cvc4", "princess", "vampire", "zipperposition"]
            .into_iter()
            .map(|id| ProverConfig::new(id, id))
            .collect();
        ProverSuite { provers, parallel: 1 }.with_env_overrides(|k| std::env::var(k).ok())
    }
}

impl ProverSuite {
    /// Reads a TOML file with one `[[prover]]` table per prover.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let file: FileConfig = toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let mut provers = Vec::new();
        for p in file.prover {
            let kind = p.kind.unwrap_or_else(|| ProverKind::from_id(&p.id));
            let executable = p.path.unwrap_or_else(|| PathBuf::from(&p.id));
            let config = ProverConfig {
                args: p.args.unwrap_or_else(|| kind.default_args()),
                timeout: p.timeout.map_or(DEFAULT_TIMEOUT, Duration::from_secs),
                grace: p.grace.map_or(DEFAULT_GRACE, Duration::from_secs),
                cores: p.cores,
                kind,
                executable,
                id: p.id,
            };
            config.validate()?;
            provers.push(config);
        }
        Ok(ProverSuite {
            provers,
            parallel: file.parallel.unwrap_or(1).max(1),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self::from_toml(&text)?.with_env_overrides(|k| std::env::var(k).ok()))
    }

    /// Replaces executables by `STRONGEQ_PROVER_<ID>` where set.
    pub fn with_env_overrides(mut self, lookup: impl Fn(&str) -> Option<String>) -> Self {
        for p in &mut self.provers {
            let key = format!("{ENV_PREFIX}{}", p.id.to_ascii_uppercase().replace('-', "_"));
            if let Some(path) = lookup(&key) {
                p.executable = PathBuf::from(path);
            }
        }
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        for p in &mut self.provers {
            p.timeout = timeout;
        }
        self
    }

    pub fn installed(&self) -> Vec<&ProverConfig> {
        self.provers.iter().filter(|p| p.is_installed()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Proved,
    Disproved,
    Timeout,
    GaveUp,
    ParseError,
    ToolError,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Proved => "Proved",
            Outcome::Disproved => "Disproved",
            Outcome::Timeout => "Timeout",
            Outcome::GaveUp => "GaveUp",
            Outcome::ParseError => "ParseError",
            Outcome::ToolError => "ToolError",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverVerdict {
    pub outcome: Outcome,
    pub wall_time: Duration,
    /// The line the outcome was read from, if any.
    pub status_line: Option<String>,
    pub detail: String,
}

impl ProverVerdict {
    fn tool_error(detail: impl Into<String>) -> Self {
        ProverVerdict {
            outcome: Outcome::ToolError,
            wall_time: Duration::ZERO,
            status_line: None,
            detail: detail.into(),
        }
    }
}

fn szs_outcome(status: &str) -> Option<Outcome> {
    Some(match status.to_ascii_lowercase().as_str() {
        "theorem" | "unsatisfiable" | "contradictoryaxioms" => Outcome::Proved,
        "countersatisfiable" | "satisfiable" | "countertheorem" => Outcome::Disproved,
        "timeout" | "resourceout" | "memoryout" => Outcome::Timeout,
        "gaveup" | "unknown" | "incomplete" | "inappropriate" => Outcome::GaveUp,
        "syntaxerror" | "inputerror" | "typeerror" | "usageerror" => Outcome::ParseError,
        "error" | "oserror" | "forced" | "user" => Outcome::ToolError,
        _ => return None,
    })
}

/// Reads the verdict from a prover's output. The first SZS status line
/// decides; without one, a "GaveUp" or "unknown (incomplete)" message means
/// the prover gave up, a nonzero exit is a tool error and a clean exit with
/// nothing to say is counted as giving up.
pub fn classify(stdout: &str, stderr: &str, exit_code: Option<i32>) -> (Outcome, Option<String>) {
    for line in stdout.lines().chain(stderr.lines()) {
        let lower = line.to_ascii_lowercase();
        if let Some(at) = lower.find("szs status") {
            let rest = &line[at + "szs status".len()..];
            if let Some(word) = rest.split_whitespace().next() {
                if let Some(outcome) = szs_outcome(word) {
                    return (outcome, Some(line.trim().to_string()));
                }
            }
        }
    }
    for line in stdout.lines().chain(stderr.lines()) {
        let lower = line.to_ascii_lowercase();
        if lower.contains("gaveup") || lower.contains("gave up") || lower.contains("unknown (incomplete)") {
            return (Outcome::GaveUp, Some(line.trim().to_string()));
        }
    }
    match exit_code {
        Some(0) => (Outcome::GaveUp, None),
        _ => (Outcome::ToolError, None),
    }
}

fn kill_group(child: &Child) {
    let pid = child.id() as libc::pid_t;
    // SAFETY: kill(2) with a negative pid signals the process group the
    // child leads; it has no memory-safety preconditions.
    unsafe {
        libc::kill(-pid, libc::SIGKILL);
    }
}

fn drain(mut pipe: impl Read + Send + 'static) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = pipe.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Runs one prover on one problem.
pub fn run_prover(problem: &str, config: &ProverConfig) -> ProverVerdict {
    if let Err(e) = config.validate() {
        return ProverVerdict::tool_error(e.to_string());
    }
    let Some(executable) = config.resolve() else {
        return ProverVerdict::tool_error(format!(
            "{}: executable {} not found or not runnable",
            config.id,
            config.executable.display()
        ));
    };
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return ProverVerdict::tool_error(format!("cannot create temporary directory: {e}")),
    };
    let file = dir.path().join("problem.p");
    if let Err(e) = std::fs::write(&file, problem) {
        return ProverVerdict::tool_error(format!("cannot write problem file: {e}"));
    }

    let started = Instant::now();
    let mut child = match Command::new(&executable)
        .args(config.arguments(&file))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return ProverVerdict::tool_error(format!("{}: cannot start: {e}", config.id)),
    };
    let stdout = drain(child.stdout.take().expect("piped stdout"));
    let stderr = drain(child.stderr.take().expect("piped stderr"));

    let deadline = config.timeout + config.grace;
    let mut killed = false;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if started.elapsed() >= deadline => {
                kill_group(&child);
                killed = true;
                break child.wait().ok();
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(_) => break None,
        }
    };
    let wall_time = started.elapsed();
    // anything the prover left running goes too
    kill_group(&child);
    let out = stdout.join().unwrap_or_default();
    let err = stderr.join().unwrap_or_default();

    if killed {
        return ProverVerdict {
            outcome: Outcome::Timeout,
            wall_time,
            status_line: None,
            detail: format!("killed after {:.1} s", wall_time.as_secs_f64()),
        };
    }
    let (outcome, status_line) = classify(&out, &err, status.and_then(|s| s.code()));
    let detail = if outcome == Outcome::ToolError {
        err.lines().last().unwrap_or("no output").to_string()
    } else {
        String::new()
    };
    ProverVerdict {
        outcome,
        wall_time,
        status_line,
        detail,
    }
}

/// One problem of a matrix run.
#[derive(Clone, Debug)]
pub struct MatrixProblem {
    pub name: String,
    pub text: String,
    /// Set when the programs are known not to be strongly equivalent; a
    /// proof of such a problem points to a broken encoding.
    pub known_not_equivalent: bool,
}

#[derive(Clone, Debug)]
pub struct MatrixReport {
    pub problems: Vec<String>,
    pub provers: Vec<String>,
    /// `cells[problem][prover]`
    pub cells: Vec<Vec<ProverVerdict>>,
    /// (problem, prover) pairs that proved a problem known to be false.
    pub violations: Vec<(String, String)>,
}

fn cell_text(v: &ProverVerdict) -> String {
    match v.outcome {
        Outcome::Proved => format!("{:.3} s", v.wall_time.as_secs_f64()),
        Outcome::Timeout => "---".into(),
        Outcome::GaveUp => "---*".into(),
        Outcome::Disproved => "disproved".into(),
        Outcome::ParseError => "parse error".into(),
        Outcome::ToolError => "error".into(),
    }
}

impl MatrixReport {
    pub fn to_markdown(&self) -> String {
        let mut out = format!("| Example | {} |\n", self.provers.join(" | "));
        out.push_str(&format!("|---|{}\n", "---|".repeat(self.provers.len())));
        for (name, row) in self.problems.iter().zip(&self.cells) {
            let cells: Vec<String> = row.iter().map(cell_text).collect();
            out.push_str(&format!("| {name} | {} |\n", cells.join(" | ")));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("example,{}\n", self.provers.join(","));
        for (name, row) in self.problems.iter().zip(&self.cells) {
            let cells: Vec<String> = row.iter().map(cell_text).collect();
            out.push_str(&format!("{name},{}\n", cells.join(",")));
        }
        out
    }

    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every prover on every problem, at most `parallel` runs at a time.
/// Failing runs become error cells; the matrix always completes.
pub fn run_matrix(problems: &[MatrixProblem], provers: &[ProverConfig], parallel: usize) -> MatrixReport {
    let jobs: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|i| (0..provers.len()).map(move |j| (i, j)))
        .collect();
    let run = |&(i, j): &(usize, usize)| run_prover(&problems[i].text, &provers[j]);
    let results: Vec<ProverVerdict> = match rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
    {
        Ok(pool) => pool.install(|| jobs.par_iter().map(run).collect()),
        Err(_) => jobs.iter().map(run).collect(),
    };
    let mut cells = vec![Vec::with_capacity(provers.len()); problems.len()];
    let mut violations = Vec::new();
    for (&(i, j), verdict) in jobs.iter().zip(results) {
        if verdict.outcome == Outcome::Proved && problems[i].known_not_equivalent {
            violations.push((problems[i].name.clone(), provers[j].id.clone()));
        }
        cells[i].push(verdict);
    }
    MatrixReport {
        problems: problems.iter().map(|p| p.name.clone()).collect(),
        provers: provers.iter().map(|p| p.id.clone()).collect(),
        cells,
        violations,
    }
}
