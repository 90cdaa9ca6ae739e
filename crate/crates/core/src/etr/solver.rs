//! External decision-procedure driver.
//!
//! The script is piped to the solver's standard input. The verdict is the
//! first non-empty output line; a `sat` verdict may be followed by a model.
//! The process is killed after the timeout plus a short grace period.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use super::smtlib::{parse_model, to_smtlib};
use super::ETRFormula;
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Environment variable naming the solver executable.
pub const SOLVER_ENV: &str = "HITSET_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub timeout: Duration,
    pub args: Vec<String>,
}

impl SolverConfig {
    /// `path`, else `$HITSET_SOLVER`, else `z3` on `PATH`.
    pub fn resolve(path: Option<PathBuf>, timeout: Duration) -> Self {
        let path = path
            .or_else(|| std::env::var_os(SOLVER_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("z3"));
        SolverConfig { path, timeout, args: Vec::new() }
    }

    fn is_z3(&self) -> bool {
        self.path.file_name().and_then(|s| s.to_str()).is_some_and(|s| s.starts_with("z3"))
    }

    fn command_args(&self) -> Vec<String> {
        let mut args = self.args.clone();
        if self.is_z3() {
            args.push("-in".into());
            args.push(format!("-T:{}", self.timeout.as_secs().max(1)));
        }
        args
    }

    /// First line of `--version`, used as the solver identity string.
    pub fn identity(&self) -> Result<String> {
        let out = Command::new(&self.path)
            .arg("--version")
            .output()
            .map_err(|e| Error::Backend(format!("cannot run {}: {e}", self.path.display())))?;
        Ok(String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or("").trim().to_string())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::resolve(None, Duration::from_secs(30))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverStatus {
    Sat,
    Unsat,
    Unknown,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverVerdict {
    pub status: SolverStatus,
    /// Exact rational witness, present only for `sat` with a rational model.
    #[serde(skip)]
    pub model: Option<std::collections::BTreeMap<String, Rational>>,
    pub transcript: String,
}

pub fn solve(f: &ETRFormula, cfg: &SolverConfig) -> Result<SolverVerdict> {
    solve_script(&to_smtlib(f), cfg)
}

const GRACE: Duration = Duration::from_secs(2);

pub fn solve_script(script: &str, cfg: &SolverConfig) -> Result<SolverVerdict> {
    let mut child = Command::new(&cfg.path)
        .args(cfg.command_args())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::Backend(format!("cannot start {}: {e}", cfg.path.display())))?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    {
        let mut stdin = child.stdin.take().expect("piped stdin");
        stdin
            .write_all(script.as_bytes())
            .map_err(|e| Error::Backend(format!("writing to solver failed: {e}")))?;
    }
    let waited = child
        .wait_timeout(cfg.timeout + GRACE)
        .map_err(|e| Error::Backend(format!("waiting for solver failed: {e}")))?;
    if waited.is_none() {
        let _ = child.kill();
        let _ = child.wait();
        let transcript = reader.join().unwrap_or_default();
        return Ok(SolverVerdict { status: SolverStatus::Timeout, model: None, transcript });
    }
    let transcript = reader.join().map_err(|_| Error::Backend("output reader panicked".into()))?;
    parse_verdict(&transcript)
}

/// Verdict from solver output.
pub fn parse_verdict(transcript: &str) -> Result<SolverVerdict> {
    let mut lines = transcript.lines().skip_while(|l| l.trim().is_empty());
    let first = lines.next().unwrap_or("").trim();
    let status = match first {
        "sat" => SolverStatus::Sat,
        "unsat" => SolverStatus::Unsat,
        "unknown" => SolverStatus::Unknown,
        "timeout" => SolverStatus::Timeout,
        other => return Err(Error::Backend(format!("unexpected solver output `{other}`"))),
    };
    let model = if status == SolverStatus::Sat {
        let rest: String = lines.collect::<Vec<_>>().join("\n");
        parse_model(&rest).unwrap_or(None)
    } else {
        None
    };
    Ok(SolverVerdict { status, model, transcript: transcript.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_lines() {
        assert_eq!(parse_verdict("unsat\n(error \"model is not available\")\n").unwrap().status, SolverStatus::Unsat);
        let v = parse_verdict("sat\n((define-fun x () Real 1.0))\n").unwrap();
        assert_eq!(v.status, SolverStatus::Sat);
        assert_eq!(v.model.unwrap()["x"], Rational::from_integer(1.into()));
        assert!(parse_verdict("garbage").is_err());
        assert_eq!(parse_verdict("timeout\n").unwrap().status, SolverStatus::Timeout);
    }

    #[test]
    fn missing_binary_is_a_backend_error() {
        let cfg = SolverConfig {
            path: PathBuf::from("/nonexistent/solver"),
            timeout: Duration::from_secs(1),
            args: Vec::new(),
        };
        assert!(matches!(solve_script("(check-sat)", &cfg), Err(Error::Backend(_))));
    }
}
