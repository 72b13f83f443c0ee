use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmh_core::scalar::Mode;
use serde_json::{json, Value};

use crate::commands::{self, Command, Options};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cmh", version, about = "Spectral analysis of convex monotone homogeneous maps")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Check a model file.
    Validate(Target),
    /// Eigenvalue brackets and an eigenvector.
    Spectrum(Target),
    /// Critical graph, classes and cyclicity at an eigenvector.
    Critical(Target),
    /// Periodic orbit of f − λ reached from --x.
    Orbit(Target),
    /// Spectral projection of the super-eigenvector --x.
    Project(Target),
    /// Eigenspace pieces and dimension (exact max-affine models).
    Eigenspace(Target),
    /// Optimal value and optimal classes of a Markov decision process.
    Mdp(Target),
    /// Max-plus eigenvalue, eigenvector and critical graph.
    Maxplus(Target),
    /// f^k(x) and the eigenvalue bracket it gives.
    Eval(Target),
    /// Check f(v) = λ + v.
    Verify(Target),
    /// Active generators, directional derivative and final graph at --v.
    Subdiff(Target),
    /// Restriction to --nodes and its additive recession.
    Restrict(Target),
    /// Final classes and invariant measures of a stochastic matrix.
    Markov(Target),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Args)]
struct Target {
    /// Input JSON file.
    path: PathBuf,
    /// Tolerance for float mode (exact mode compares exactly).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Arithmetic mode; defaults to the file's.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Write the critical graph as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Enumeration cap.
    #[arg(long)]
    cap: Option<usize>,
    /// Machine-readable JSON output (the default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Plain `key: value` output instead of JSON.
    #[arg(long)]
    text: bool,
    /// Start point, comma separated; one value is broadcast.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Eigenvector, comma separated; one value is broadcast.
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Upper bound on the orbit period (defaults to the cyclicity).
    #[arg(long = "cycle-bound")]
    cycle_bound: Option<usize>,
    /// Number of iterations for eval.
    #[arg(long)]
    k: Option<usize>,
    /// 1-based node list for restrict.
    #[arg(long)]
    nodes: Option<String>,
}

impl Target {
    fn options(&self) -> Options {
        Options {
            tol: self.tol,
            max_iter: self.max_iter,
            mode: self.mode.map(|m| match m {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Float => Mode::Float,
            }),
            cap: self.cap,
            x: self.x.clone(),
            v: self.v.clone(),
            lambda: self.lambda.clone(),
            cycle_bound: self.cycle_bound,
            k: self.k,
            nodes: self.nodes.clone(),
            dot: self.dot.clone(),
        }
    }
}

/// What a run printed and the code it exits with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn text_lines(v: &Value) -> String {
    match v.as_object() {
        Some(obj) => obj.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
        None => format!("{v}\n"),
    }
}

pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (rendered, String::new()) } else { (String::new(), rendered) };
            return Execution { exit_code: code, stdout, stderr };
        }
    };
    let (command, target) = match &cli.command {
        Sub::Validate(t) => (Command::Validate, t),
        Sub::Spectrum(t) => (Command::Spectrum, t),
        Sub::Critical(t) => (Command::Critical, t),
        Sub::Orbit(t) => (Command::Orbit, t),
        Sub::Project(t) => (Command::Project, t),
        Sub::Eigenspace(t) => (Command::Eigenspace, t),
        Sub::Mdp(t) => (Command::Mdp, t),
        Sub::Maxplus(t) => (Command::MaxPlus, t),
        Sub::Eval(t) => (Command::Eval, t),
        Sub::Verify(t) => (Command::Verify, t),
        Sub::Subdiff(t) => (Command::Subdiff, t),
        Sub::Restrict(t) => (Command::Restrict, t),
        Sub::Markov(t) => (Command::Markov, t),
    };
    let result = std::fs::read(&target.path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", target.path.display())))
        .and_then(|bytes| commands::run(command, &bytes, &target.options()));
    match result {
        Ok(outcome) => {
            let stdout = if target.text {
                text_lines(&outcome.envelope.outputs)
            } else {
                outcome.envelope.to_json_string() + "\n"
            };
            let stderr = outcome
                .envelope
                .diagnostics
                .warnings
                .iter()
                .map(|w| format!("warning: {w}\n"))
                .collect();
            Execution {
                exit_code: outcome.exit_code,
                stdout,
                stderr,
            }
        }
        Err(e) => {
            let doc = json!({
                "command": command.name(),
                "error": {"kind": e.kind(), "message": e.message()},
                "exit_code": e.exit_code(),
            });
            Execution {
                exit_code: e.exit_code(),
                stdout: serde_json::to_string_pretty(&doc).expect("serializes") + "\n",
                stderr: format!("error: {e}\n"),
            }
        }
    }
}
