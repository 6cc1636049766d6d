mod args;
mod dist;
mod gen;
mod props;
mod rule;
mod table;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ratquad::numerics::tolerance_floor;
use ratquad::{make_context, Error, PrecisionContext};

use args::{Cli, Command, Global, RunConfig, DEFAULT_PREC};

/// Why a command did not succeed; each maps to one exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, parameters or config (2).
    Usage(String),
    /// A check or computation failed (1).
    Check(String),
    /// More precision would have been needed than allowed (3).
    Escalation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Escalation(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Check(m) => write!(f, "{m}"),
            Failure::Escalation(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EscalationExhausted { .. } => Failure::Escalation(e.to_string()),
            Error::InvalidContext(_)
            | Error::InvalidParameters(_)
            | Error::InsufficientParameters { .. }
            | Error::Confluence { .. }
            | Error::StrictOrthogonal(_)
            | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

/// Command output; `ok` is false when a check inside it failed.
pub struct Output {
    pub text: String,
    pub ok: bool,
}

pub fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn context(global: &Global) -> Result<PrecisionContext, Failure> {
    let bits = global.prec.unwrap_or(DEFAULT_PREC);
    let tol = global.tol.unwrap_or_else(|| 1e-30f64.max(4.0 * tolerance_floor(bits)));
    let ctx = make_context(bits, tol)?;
    Ok(match global.escalations {
        Some(e) => ctx.with_max_escalations(e),
        None => ctx,
    })
}

fn execute(global: &Global, command: &Command) -> Result<Output, Failure> {
    if let Command::Run { config } = command {
        let text = fs::read_to_string(config).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
        let (mut inner, cmd) =
            RunConfig::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
        // Flags given on the command line win over the file.
        inner.prec = global.prec.or(inner.prec);
        inner.tol = global.tol.or(inner.tol);
        inner.escalations = global.escalations.or(inner.escalations);
        inner.out = global.out.clone().or(inner.out);
        let out = execute(&inner, &cmd)?;
        return emit(&inner, out);
    }
    let ctx = context(global)?;
    let out = match command {
        Command::Rule(a) => rule::run_rule(a, &ctx)?,
        Command::Integrate(a) => rule::run_integrate(a, &ctx)?,
        Command::Table(a) => table::run(a, &ctx)?,
        Command::Props(a) => props::run(a, &ctx)?,
        Command::Dist(a) => dist::run(a, &ctx)?,
        Command::Run { .. } => unreachable!("handled above"),
    };
    emit(global, out)
}

/// Writes the output once, to the file or stdout. Returns an empty output
/// so nested calls do not write twice.
fn emit(global: &Global, out: Output) -> Result<Output, Failure> {
    if !out.text.is_empty() {
        match &global.out {
            Some(path) => fs::write(path, &out.text)
                .map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display())))?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(out.text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| Failure::Check(format!("cannot write output: {e}")))?;
            }
        }
    }
    Ok(Output {
        text: String::new(),
        ok: out.ok,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.global, &cli.command) {
        Ok(out) if out.ok => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("ratquad: one or more checks failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("ratquad: {f}");
            ExitCode::from(f.code())
        }
    }
}
