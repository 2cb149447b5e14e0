//! SAT backends and the checks applied to whatever they return.

mod cdcl;
mod external;

use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::cert::{check_lrat_reader, check_lrat_with, parse_lrat, CheckOptions, CheckReport};
use crate::encode::{Cnf, DistanceQuery, Encoding, Model, Role, VarMap};
use crate::error::{Error, Result};
use crate::gf2::BitString;

/// Environment variable naming an external solver executable.
pub const SOLVER_ENV: &str = "STABSAT_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Internal,
    External {
        path: PathBuf,
        args: Vec<String>,
        /// Extra arguments passed only when a proof is requested.
        proof_args: Vec<String>,
    },
}

impl Backend {
    /// External backend with CaDiCaL-style text LRAT flags.
    pub fn external(path: impl Into<PathBuf>) -> Self {
        Backend::External {
            path: path.into(),
            args: vec!["-q".into()],
            proof_args: vec!["--lrat=true".into(), "--binary=false".into()],
        }
    }

    /// External backend from [`SOLVER_ENV`], if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(SOLVER_ENV)
            .filter(|p| !p.is_empty())
            .map(Backend::external)
    }

    pub fn name(&self) -> String {
        match self {
            Backend::Internal => "internal".into(),
            Backend::External { path, .. } => path.display().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Zero means no limit.
    pub timeout: Duration,
    pub produce_proof: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Internal,
            timeout: Duration::ZERO,
            produce_proof: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    SolverError(String),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("timeout"),
            UnknownReason::SolverError(d) => write!(f, "solver error: {d}"),
        }
    }
}

/// A text LRAT proof, in memory or in a file. External solvers can emit
/// proofs of many gigabytes, so file-backed proofs are never loaded whole.
#[derive(Clone, Debug)]
pub struct Proof(ProofData);

#[derive(Clone, Debug)]
enum ProofData {
    Text(String),
    File {
        path: PathBuf,
        /// Deletes the file once the last clone is dropped.
        _temp: Option<Arc<tempfile::TempPath>>,
    },
}

impl Proof {
    pub fn from_text(text: impl Into<String>) -> Self {
        Proof(ProofData::Text(text.into()))
    }

    /// A proof stored at `path`, which is left in place.
    pub fn from_path(path: impl Into<PathBuf>) -> Self {
        Proof(ProofData::File {
            path: path.into(),
            _temp: None,
        })
    }

    pub(crate) fn temporary(path: tempfile::TempPath) -> Self {
        Proof(ProofData::File {
            path: path.to_path_buf(),
            _temp: Some(Arc::new(path)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        match &self.0 {
            ProofData::Text(_) => None,
            ProofData::File { path, .. } => Some(path),
        }
    }

    pub fn to_text(&self) -> Result<String> {
        match &self.0 {
            ProofData::Text(t) => Ok(t.clone()),
            ProofData::File { path, .. } => Ok(fs::read_to_string(path)?),
        }
    }

    /// Runs the LRAT checker; file-backed proofs are streamed.
    pub fn check(&self, cnf: &Cnf, opts: CheckOptions) -> Result<CheckReport> {
        match &self.0 {
            ProofData::Text(t) => Ok(check_lrat_with(cnf, &parse_lrat(t, cnf.num_clauses())?, opts)),
            ProofData::File { path, .. } => check_lrat_reader(cnf, BufReader::new(File::open(path)?), opts),
        }
    }

    /// Copies the proof to `dest` (not atomically).
    pub fn write_to(&self, dest: &Path) -> Result<()> {
        match &self.0 {
            ProofData::Text(t) => fs::write(dest, t)?,
            ProofData::File { path, .. } => {
                fs::copy(path, dest)?;
            }
        }
        Ok(())
    }
}

impl PartialEq for Proof {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (ProofData::Text(a), ProofData::Text(b)) => a == b,
            (ProofData::File { path: a, .. }, ProofData::File { path: b, .. }) => a == b,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Sat(Model),
    /// LRAT proof, when requested and emitted.
    Unsat(Option<Proof>),
    Unknown(UnknownReason),
}

impl SolveOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SolveOutcome::Sat(_) => "sat",
            SolveOutcome::Unsat(_) => "unsat",
            SolveOutcome::Unknown(_) => "unknown",
        }
    }
}

/// Solves `cnf`. A returned model has already passed [`verify_model`]; a
/// backend whose model fails is reported as a solver error.
pub fn solve(cnf: &Cnf, cfg: &SolverConfig) -> SolveOutcome {
    let deadline = (!cfg.timeout.is_zero()).then(|| Instant::now() + cfg.timeout);
    let outcome = match &cfg.backend {
        Backend::Internal => {
            match cdcl::Solver::new(cnf, cfg.produce_proof, cfg.seed, deadline).solve(cnf) {
                cdcl::Answer::Sat(v) => SolveOutcome::Sat(Model::new(v)),
                cdcl::Answer::Unsat(p) => SolveOutcome::Unsat(p.map(Proof::from_text)),
                cdcl::Answer::Timeout => SolveOutcome::Unknown(UnknownReason::Timeout),
            }
        }
        Backend::External {
            path,
            args,
            proof_args,
        } => external::run(cnf, path, args, proof_args, cfg.produce_proof, deadline),
    };
    if let SolveOutcome::Sat(m) = &outcome {
        if !matches!(verify_model(cnf, m), Ok(true)) {
            return SolveOutcome::Unknown(UnknownReason::SolverError(
                "returned model does not satisfy the formula".into(),
            ));
        }
    }
    outcome
}

/// True iff every clause has a true literal under `model`.
pub fn verify_model(cnf: &Cnf, model: &Model) -> Result<bool> {
    if model.num_vars() != cnf.num_vars as usize {
        return Err(Error::Usage(format!(
            "model assigns {} variables, formula has {}",
            model.num_vars(),
            cnf.num_vars
        )));
    }
    Ok(cnf
        .clauses
        .iter()
        .all(|c| c.iter().any(|&l| model.lit(l))))
}

/// Reads the error vector out of a model and re-checks it against the query
/// without reference to the CNF.
pub fn decode_witness(model: &Model, vm: &VarMap, q: &DistanceQuery) -> Result<BitString> {
    if model.num_vars() < vm.num_vars() {
        return Err(Error::Usage("model does not cover the variable map".into()));
    }
    let mut e = BitString::zeros(q.n);
    match vm.encoding {
        Encoding::PerBit => {
            for j in 0..q.n {
                let v = vm
                    .var(Role::Error(j))
                    .ok_or_else(|| Error::Usage(format!("variable map lacks E[{j}]")))?;
                e.set(j, model.var(v));
            }
        }
        Encoding::Location => {
            for slot in 0..vm.weight_bound {
                let mut loc = 0usize;
                for bit in 0..vm.slot_bits {
                    let v = vm
                        .var(Role::Location { slot, bit })
                        .ok_or_else(|| Error::Usage(format!("variable map lacks L[{slot}][{bit}]")))?;
                    if model.var(v) {
                        loc |= 1 << bit;
                    }
                }
                if loc >= q.n {
                    return Err(Error::Soundness(format!(
                        "slot {slot} names location {loc} outside 0..{}",
                        q.n
                    )));
                }
                e.set(loc, true);
            }
        }
        Encoding::Independence => {
            return Err(Error::Usage("independence models carry no error vector".into()));
        }
    }
    if !q.accepts(&e) {
        return Err(Error::Soundness(format!(
            "decoded error {e} fails the direct check against the query"
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn internal() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn trivial_outcomes() {
        let cnf = Cnf { num_vars: 1, clauses: vec![vec![1], vec![-1]] };
        assert!(matches!(solve(&cnf, &internal()), SolveOutcome::Unsat(Some(_))));
        let cnf = Cnf { num_vars: 1, clauses: vec![vec![1]] };
        assert_eq!(solve(&cnf, &internal()), SolveOutcome::Sat(Model::new(vec![true])));
    }

    #[test]
    fn model_verification() {
        let cnf = Cnf { num_vars: 2, clauses: vec![vec![1], vec![-1, 2]] };
        assert!(verify_model(&cnf, &Model::new(vec![true, true])).unwrap());
        assert!(!verify_model(&cnf, &Model::new(vec![false, true])).unwrap());
        assert!(verify_model(&cnf, &Model::new(vec![true])).is_err());
    }
}
