//! Runs a DIMACS solver as a child process.
//!
//! The solver reads the CNF from a temporary file, writes its status and
//! model to stdout, and (when asked) an LRAT proof to a second path given as
//! the trailing positional argument, which is the CaDiCaL convention.

use std::fs::{self, File};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{Proof, SolveOutcome, UnknownReason};
use crate::encode::{Cnf, Model};

pub(crate) fn run(
    cnf: &Cnf,
    path: &Path,
    args: &[String],
    proof_args: &[String],
    produce_proof: bool,
    deadline: Option<Instant>,
) -> SolveOutcome {
    match run_inner(cnf, path, args, proof_args, produce_proof, deadline) {
        Ok(outcome) => outcome,
        Err(detail) => SolveOutcome::Unknown(UnknownReason::SolverError(detail)),
    }
}

fn run_inner(
    cnf: &Cnf,
    path: &Path,
    args: &[String],
    proof_args: &[String],
    produce_proof: bool,
    deadline: Option<Instant>,
) -> Result<SolveOutcome, String> {
    if !path.exists() {
        return Err(format!("solver executable {} not found", path.display()));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("query.cnf");
    // outlives `dir`: it is handed back to the caller
    let proof_path = tempfile::Builder::new()
        .prefix("stabsat-")
        .suffix(".lrat")
        .tempfile()
        .map_err(|e| e.to_string())?
        .into_temp_path();
    let out_path = dir.path().join("stdout.txt");
    fs::write(&input, cnf.to_dimacs()).map_err(|e| e.to_string())?;

    let mut cmd = Command::new(path);
    cmd.args(args);
    if produce_proof {
        cmd.args(proof_args);
    }
    cmd.arg(&input);
    if produce_proof {
        cmd.arg(&*proof_path);
    }
    let stdout = File::create(&out_path).map_err(|e| e.to_string())?;
    cmd.stdin(Stdio::null()).stdout(stdout).stderr(Stdio::null());

    let mut child = cmd
        .spawn()
        .map_err(|e| format!("cannot start {}: {e}", path.display()))?;
    let status = loop {
        if let Some(status) = child.try_wait().map_err(|e| e.to_string())? {
            break status;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(SolveOutcome::Unknown(UnknownReason::Timeout));
        }
        thread::sleep(Duration::from_millis(5));
    };

    let text = fs::read_to_string(&out_path).map_err(|e| e.to_string())?;
    match parse_output(&text, cnf.num_vars as usize)? {
        Parsed::Sat(model) => Ok(SolveOutcome::Sat(model)),
        Parsed::Unsat => {
            let nonempty = fs::metadata(&proof_path).is_ok_and(|m| m.len() > 0);
            let proof = (produce_proof && nonempty).then(|| Proof::temporary(proof_path));
            Ok(SolveOutcome::Unsat(proof))
        }
        Parsed::Unknown => Err(format!("solver gave no verdict (exit status {status})")),
    }
}

#[derive(Debug, PartialEq)]
enum Parsed {
    Sat(Model),
    Unsat,
    Unknown,
}

fn parse_output(text: &str, num_vars: usize) -> Result<Parsed, String> {
    let mut status = None;
    let mut values: Vec<Option<bool>> = vec![None; num_vars];
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| format!("bad model literal {tok:?}"))?;
                if lit == 0 {
                    continue;
                }
                let v = lit.unsigned_abs() as usize;
                if v > num_vars {
                    return Err(format!("model literal {lit} out of range"));
                }
                values[v - 1] = Some(lit > 0);
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => {
            // variables the solver left out are free; fix them to false
            let values = values.into_iter().map(|v| v.unwrap_or(false)).collect();
            Ok(Parsed::Sat(Model::new(values)))
        }
        Some("UNSATISFIABLE") => Ok(Parsed::Unsat),
        Some("UNKNOWN") | None => Ok(Parsed::Unknown),
        Some(other) => Err(format!("unrecognized status line {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_status_and_model() {
        let out = "c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\n";
        assert_eq!(
            parse_output(out, 3).unwrap(),
            Parsed::Sat(Model::new(vec![true, false, true]))
        );
        assert_eq!(parse_output("s UNSATISFIABLE\n", 3).unwrap(), Parsed::Unsat);
        assert_eq!(parse_output("c nothing\n", 3).unwrap(), Parsed::Unknown);
        assert!(parse_output("s SATISFIABLE\nv 4 0\n", 3).is_err());
        assert!(parse_output("s MAYBE\n", 3).is_err());
    }

    #[test]
    fn missing_executable_is_unknown() {
        let cnf = Cnf { num_vars: 1, clauses: vec![vec![1]] };
        let out = run(&cnf, Path::new("/nonexistent/solver"), &[], &[], false, None);
        assert!(matches!(out, SolveOutcome::Unknown(UnknownReason::SolverError(_))));
    }
}
