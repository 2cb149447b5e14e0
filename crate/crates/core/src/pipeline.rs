//! End-to-end runs: validate a code, encode sector queries, solve, check
//! every answer, and summarize the result as a JSON-serializable report.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cert::CheckOptions;
use crate::code::{certify_kernel, independent_row_subset, CssCode, KernelCertificate, Sector};
use crate::encode::{encode_independence, encode_location, encode_perbit, Cnf, DistanceQuery, Encoding, Model, VarMap};
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::oracle::exact_sector_distance;
use crate::solver::{decode_witness, solve, verify_model, Proof, SolveOutcome, SolverConfig};

/// Codes up to this length default to the per-bit encoding.
pub const PERBIT_MAX_QUBITS: usize = 40;
pub const DEFAULT_CACHE_DIR: &str = ".stabsat-cache";

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    /// `None` picks per-bit for `n <= 40` and location otherwise.
    pub encoding: Option<Encoding>,
    /// Require an accepted LRAT proof for every UNSAT verdict.
    pub require_certificates: bool,
    pub cache_dir: Option<PathBuf>,
    /// Back rank bounds with SAT independence proofs. `None` enables it for `n <= 40`.
    pub rank_by_sat: Option<bool>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            encoding: None,
            require_certificates: true,
            cache_dir: None,
            rank_by_sat: None,
        }
    }
}

impl PipelineConfig {
    pub fn encoding_for(&self, n: usize) -> Encoding {
        self.encoding.unwrap_or(if n <= PERBIT_MAX_QUBITS {
            Encoding::PerBit
        } else {
            Encoding::Location
        })
    }
}

// ---------------------------------------------------------------- validate

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub matrix: &'static str,
    /// Whether the kernel came from the code file or was computed here.
    pub supplied: bool,
    pub certificate: KernelCertificate,
    /// Rank bounds re-established by SAT independence proofs, when enabled.
    pub sat_rank_proof: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub code: String,
    pub n: usize,
    pub rank_hx: usize,
    pub rank_hz: usize,
    pub k: Option<usize>,
    pub checks: Vec<Check>,
    pub kernels: Vec<KernelReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, passed: bool, detail: Option<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Orthogonality, ranks, `k` and kernel certificates for both
/// parity-check matrices.
pub fn validate(code: &CssCode, cfg: &PipelineConfig) -> Result<ValidationReport> {
    code.check_shapes()?;
    let mut checks = Vec::new();
    let orth = code.hx.first_non_orthogonal(&code.hz)?;
    checks.push(check(
        "orthogonality",
        orth.is_none(),
        orth.map(|(i, j)| format!("hx row {i} and hz row {j} have odd overlap")),
    ));
    let rank_hx = code.hx.rank();
    let rank_hz = code.hz.rank();
    let k = orth.is_none().then(|| code.n - rank_hx - rank_hz);
    if let (Some(k), Some(claimed)) = (k, code.claimed_params) {
        checks.push(check(
            "claimed-k",
            k == claimed.k,
            (k != claimed.k).then(|| format!("computed k = {k}, claimed {}", claimed.k)),
        ));
    }

    let use_sat = cfg.rank_by_sat.unwrap_or(code.n <= PERBIT_MAX_QUBITS);
    let mut kernels = Vec::new();
    for (label, m, supplied) in [
        ("hx", &code.hx, code.ker_hx.as_ref()),
        ("hz", &code.hz, code.ker_hz.as_ref()),
    ] {
        let computed;
        let ker = match supplied {
            Some(k) => k,
            None => {
                computed = m.kernel_basis();
                &computed
            }
        };
        let r1 = m.rank();
        let r2 = code.n - r1;
        let certificate = certify_kernel(m, ker, r1, r2)?;
        let sat_rank_proof = if use_sat && certificate.is_certified() {
            Some(rank_by_sat(m, r1, &cfg.solver)? && rank_by_sat(ker, r2, &cfg.solver)?)
        } else {
            None
        };
        let name = format!("kernel-{label}");
        let detail = match &certificate.verdict {
            crate::code::KernelVerdict::Certified => None,
            crate::code::KernelVerdict::Rejected(rs) => Some(
                rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; "),
            ),
        };
        checks.push(check(&name, certificate.is_certified(), detail));
        if let Some(ok) = sat_rank_proof {
            checks.push(check(&format!("{name}-rank-proof"), ok, None));
        }
        kernels.push(KernelReport {
            matrix: label,
            supplied: supplied.is_some(),
            certificate,
            sat_rank_proof,
        });
    }
    Ok(ValidationReport {
        code: code.name.clone(),
        n: code.n,
        rank_hx,
        rank_hz,
        k,
        checks,
        kernels,
    })
}

/// `rank(m) >= r`, shown by an UNSAT dependency query over `r` greedily
/// chosen rows whose LRAT proof is accepted by the checker.
pub fn rank_by_sat(m: &Gf2Matrix, r: usize, solver: &SolverConfig) -> Result<bool> {
    if r == 0 {
        return Ok(true);
    }
    let Some(rows) = independent_row_subset(m, r) else {
        return Ok(false);
    };
    let cnf = encode_independence(&m.select_rows(&rows))?;
    let cfg = SolverConfig {
        produce_proof: true,
        ..solver.clone()
    };
    Ok(match solve(&cnf, &cfg) {
        SolveOutcome::Unsat(Some(p)) => p.check(&cnf, CheckOptions::default())?.accepted,
        _ => false,
    })
}

/// The kernel used by sector queries must be certified first; otherwise a
/// wrong supplied kernel could make a query vacuous.
fn certified_sector_kernel(code: &CssCode, sector: Sector) -> Result<Gf2Matrix> {
    let (_, excluded) = code.sector_matrices(sector);
    let ker = code.sector_kernel(sector).into_owned();
    let r1 = excluded.rank();
    let cert = certify_kernel(excluded, &ker, r1, code.n - r1)?;
    if !cert.is_certified() {
        return Err(Error::InvalidCode(format!(
            "{}: kernel for the {sector} sector fails certification",
            code.name
        )));
    }
    Ok(ker)
}

// ---------------------------------------------------------------- sector queries

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorVerdict {
    pub sector: Sector,
    pub weight_bound: usize,
    pub outcome: Outcome,
    pub encoding: Encoding,
    pub solver: String,
    pub wall_time_ms: u128,
    pub num_vars: u32,
    pub num_clauses: usize,
    /// UNSAT proof accepted by the in-repo checker.
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_path: Option<PathBuf>,
    /// Error vector as a 0/1 string, position 0 first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub cached: bool,
}

impl SectorVerdict {
    pub fn witness_weight(&self) -> Option<usize> {
        self.witness.as_ref().map(|w| w.bytes().filter(|&b| b == b'1').count())
    }
}

pub fn encode_query(q: &DistanceQuery, encoding: Encoding) -> Result<(Cnf, VarMap)> {
    match encoding {
        Encoding::PerBit => Ok(encode_perbit(q)),
        Encoding::Location => encode_location(q),
        Encoding::Independence => Err(Error::Usage("independence is not a distance encoding".into())),
    }
}

/// Does `sector` have an undetectable error of weight at most `w`?
pub fn sector_query(code: &CssCode, sector: Sector, w: usize, cfg: &PipelineConfig) -> Result<SectorVerdict> {
    let (checks, _) = code.sector_matrices(sector);
    let ker = certified_sector_kernel(code, sector)?;
    let q = DistanceQuery::new(checks.clone(), ker, w)?;
    let encoding = cfg.encoding_for(code.n);
    let (cnf, vm) = encode_query(&q, encoding)?;
    run_query(&cnf, &vm, &q, sector, cfg)
}

#[derive(Serialize, Deserialize)]
struct CachedResult {
    outcome: String,
    #[serde(default)]
    model: Option<Vec<bool>>,
}

fn run_query(cnf: &Cnf, vm: &VarMap, q: &DistanceQuery, sector: Sector, cfg: &PipelineConfig) -> Result<SectorVerdict> {
    let dimacs = cnf.to_dimacs();
    let key = hex_digest(dimacs.as_bytes());
    let start = Instant::now();
    let solver_cfg = SolverConfig {
        produce_proof: cfg.solver.produce_proof || cfg.require_certificates,
        ..cfg.solver.clone()
    };

    // cached entries are checked on read; a bad one is ignored and re-solved
    let from_cache = cfg.cache_dir.as_deref().and_then(|dir| read_cache(dir, &key, cnf));
    let cached = from_cache.is_some();
    let outcome = from_cache.unwrap_or_else(|| solve(cnf, &solver_cfg));

    let mut verdict = SectorVerdict {
        sector,
        weight_bound: q.weight_bound,
        outcome: Outcome::Unknown,
        encoding: vm.encoding,
        solver: solver_cfg.backend.name(),
        wall_time_ms: 0,
        num_vars: cnf.num_vars,
        num_clauses: cnf.num_clauses(),
        certified: false,
        certificate_path: None,
        witness: None,
        detail: None,
        cached,
    };
    match &outcome {
        SolveOutcome::Sat(model) => {
            let e = decode_witness(model, vm, q)?;
            verdict.outcome = Outcome::Sat;
            verdict.witness = Some(e.to_string());
        }
        SolveOutcome::Unsat(proof) => {
            verdict.outcome = Outcome::Unsat;
            if cached {
                verdict.certified = true;
            } else if let Some(p) = proof {
                let report = p
                    .check(cnf, CheckOptions::default())
                    .map_err(|e| Error::Soundness(format!("solver proof does not parse: {e}")))?;
                if !report.accepted {
                    return Err(Error::Soundness(format!(
                        "LRAT proof rejected: {}",
                        report.rejection.map(|r| r.to_string()).unwrap_or_default()
                    )));
                }
                verdict.certified = true;
            } else if cfg.require_certificates {
                verdict.outcome = Outcome::Unknown;
                verdict.detail = Some("solver reported UNSAT without a proof".into());
            }
        }
        SolveOutcome::Unknown(reason) => verdict.detail = Some(reason.to_string()),
    }
    if let Some(dir) = &cfg.cache_dir {
        if !cached {
            write_cache(dir, &key, &dimacs, vm, &outcome)?;
        }
        if matches!(outcome, SolveOutcome::Unsat(Some(_))) {
            verdict.certificate_path = Some(dir.join(format!("{key}.lrat")));
        }
    }
    verdict.wall_time_ms = start.elapsed().as_millis();
    Ok(verdict)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Cached results are re-checked like fresh ones, so a stale or corrupted
/// cache entry can only cost a re-solve, never a wrong verdict. Only
/// entries with a model or an accepted proof are ever returned.
fn read_cache(dir: &Path, key: &str, cnf: &Cnf) -> Option<SolveOutcome> {
    let text = fs::read_to_string(dir.join(format!("{key}.json"))).ok()?;
    let entry: CachedResult = serde_json::from_str(&text).ok()?;
    match entry.outcome.as_str() {
        "sat" => {
            let model = Model::new(entry.model?);
            verify_model(cnf, &model).ok()?.then_some(SolveOutcome::Sat(model))
        }
        "unsat" => {
            let proof = Proof::from_path(dir.join(format!("{key}.lrat")));
            let report = proof.check(cnf, CheckOptions::default()).ok()?;
            report.accepted.then_some(SolveOutcome::Unsat(Some(proof)))
        }
        _ => None,
    }
}

fn write_cache(dir: &Path, key: &str, dimacs: &str, vm: &VarMap, outcome: &SolveOutcome) -> Result<()> {
    let entry = match outcome {
        SolveOutcome::Sat(m) => CachedResult {
            outcome: "sat".into(),
            model: Some(m.values().to_vec()),
        },
        SolveOutcome::Unsat(Some(_)) => CachedResult {
            outcome: "unsat".into(),
            model: None,
        },
        _ => return Ok(()),
    };
    fs::create_dir_all(dir)?;
    write_atomic(&dir.join(format!("{key}.cnf")), dimacs.as_bytes())?;
    write_atomic(&dir.join(format!("{key}.varmap.json")), vm.to_json().as_bytes())?;
    if let SolveOutcome::Unsat(Some(p)) = outcome {
        let dest = dir.join(format!("{key}.lrat"));
        let tmp = tempfile::NamedTempFile::new_in(dir)?.into_temp_path();
        p.write_to(&tmp)?;
        set_readable(&tmp)?;
        tmp.persist(&dest).map_err(|e| Error::Io(e.error))?;
    }
    write_atomic(&dir.join(format!("{key}.json")), serde_json::to_string(&entry)?.as_bytes())
}

/// tempfile creates 0600; outputs are ordinary files.
fn set_readable(path: &Path) -> Result<()> {
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        fs::set_permissions(path, fs::Permissions::from_mode(0o644))?;
    }
    #[cfg(not(unix))]
    let _ = path;
    Ok(())
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    set_readable(tmp.path())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

// ---------------------------------------------------------------- distance

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ProvenLowerBound,
    Exact,
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub status: Status,
    pub value: usize,
    /// Set when the value is the `n + 1` convention for an empty undetectable set.
    pub sentinel: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Toolchain {
    pub seed: u64,
    pub backend: String,
    pub encoding: Encoding,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub sectors: Vec<SectorVerdict>,
    pub distance: Claim,
    pub toolchain: Toolchain,
}

fn toolchain(code: &CssCode, cfg: &PipelineConfig) -> Toolchain {
    Toolchain {
        seed: cfg.solver.seed,
        backend: cfg.solver.backend.name(),
        encoding: cfg.encoding_for(code.n),
        version: env!("CARGO_PKG_VERSION"),
    }
}

fn proven(v: &SectorVerdict, cfg: &PipelineConfig) -> bool {
    v.outcome == Outcome::Unsat && (v.certified || !cfg.require_certificates)
}

/// Is `d <= distance`? Both sectors are queried at weight bound `d - 1`.
pub fn distance(code: &CssCode, d: usize, cfg: &PipelineConfig) -> Result<Report> {
    let k = code.compute_k()?;
    if d <= 1 {
        return Ok(Report {
            code: code.name.clone(),
            n: code.n,
            k,
            sectors: vec![],
            distance: Claim {
                status: Status::ProvenLowerBound,
                value: d,
                sentinel: false,
            },
            toolchain: toolchain(code, cfg),
        });
    }
    let (x, z) = rayon::join(
        || sector_query(code, Sector::X, d - 1, cfg),
        || sector_query(code, Sector::Z, d - 1, cfg),
    );
    let sectors = vec![x?, z?];
    let status = if sectors.iter().any(|v| v.outcome == Outcome::Sat) {
        Status::Refuted
    } else if sectors.iter().all(|v| proven(v, cfg)) {
        Status::ProvenLowerBound
    } else {
        Status::Unknown
    };
    let value = match status {
        Status::Refuted => sectors.iter().filter_map(|v| v.witness_weight()).min().unwrap_or(d),
        _ => d,
    };
    Ok(Report {
        code: code.name.clone(),
        n: code.n,
        k,
        sectors,
        distance: Claim {
            status,
            value,
            sentinel: false,
        },
        toolchain: toolchain(code, cfg),
    })
}

// ---------------------------------------------------------------- exact

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sat,
    Oracle,
}

/// Smallest weight of an undetectable error in one sector, by ascending
/// SAT scan: UNSAT at every `w < d`, SAT at `d`. Returns the verdicts, the
/// distance (or `n + 1`), and whether every step was settled.
fn scan_sector(code: &CssCode, sector: Sector, cfg: &PipelineConfig) -> Result<(Vec<SectorVerdict>, usize, bool)> {
    let mut verdicts = Vec::new();
    for w in 1..=code.n {
        let v = sector_query(code, sector, w, cfg)?;
        let outcome = v.outcome;
        let settled = outcome == Outcome::Sat || proven(&v, cfg);
        verdicts.push(v);
        if !settled {
            return Ok((verdicts, w, false));
        }
        if outcome == Outcome::Sat {
            return Ok((verdicts, w, true));
        }
    }
    Ok((verdicts, code.n + 1, true))
}

pub fn exact(code: &CssCode, method: Method, cfg: &PipelineConfig) -> Result<Report> {
    let k = code.compute_k()?;
    let (sectors, value, settled) = match method {
        Method::Oracle => {
            let mut values = Vec::new();
            for sector in Sector::BOTH {
                let (checks, excluded) = code.sector_matrices(sector);
                values.push(exact_sector_distance(checks, excluded)?.value);
            }
            (vec![], values.into_iter().min().unwrap(), true)
        }
        Method::Sat => {
            let (x, z) = rayon::join(
                || scan_sector(code, Sector::X, cfg),
                || scan_sector(code, Sector::Z, cfg),
            );
            let (x, z) = (x?, z?);
            let mut sectors = x.0;
            sectors.extend(z.0);
            (sectors, x.1.min(z.1), x.2 && z.2)
        }
    };
    Ok(Report {
        code: code.name.clone(),
        n: code.n,
        k,
        sectors,
        distance: Claim {
            status: if settled { Status::Exact } else { Status::Unknown },
            value,
            sentinel: value == code.n + 1,
        },
        toolchain: toolchain(code, cfg),
    })
}

// ---------------------------------------------------------------- encode

/// DIMACS text and variable-map JSON for one sector query.
pub fn encode_sector(code: &CssCode, sector: Sector, w: usize, encoding: Encoding) -> Result<(String, String)> {
    let (checks, _) = code.sector_matrices(sector);
    let ker = certified_sector_kernel(code, sector)?;
    let q = DistanceQuery::new(checks.clone(), ker, w)?;
    let (cnf, vm) = encode_query(&q, encoding)?;
    Ok((cnf.to_dimacs(), vm.to_json()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steane() -> CssCode {
        let h = Gf2Matrix::from_strs(&["1001011", "0101101", "0010111"], 7).unwrap();
        CssCode::new("steane", h.clone(), h).unwrap().with_claimed(1, 3)
    }

    #[test]
    fn steane_validates() {
        let r = validate(&steane(), &PipelineConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.k, Some(1));
        assert!(r.kernels.iter().all(|k| k.sat_rank_proof == Some(true)));
    }

    #[test]
    fn steane_distance_bracket() {
        let cfg = PipelineConfig::default();
        let r = distance(&steane(), 3, &cfg).unwrap();
        assert_eq!(r.distance.status, Status::ProvenLowerBound);
        assert!(r.sectors.iter().all(|s| s.certified));
        let r = distance(&steane(), 4, &cfg).unwrap();
        assert_eq!(r.distance.status, Status::Refuted);
        assert_eq!(r.distance.value, 3);
        let r = exact(&steane(), Method::Sat, &cfg).unwrap();
        assert_eq!((r.distance.status, r.distance.value), (Status::Exact, 3));
        let r = exact(&steane(), Method::Oracle, &cfg).unwrap();
        assert_eq!(r.distance.value, 3);
    }

    #[test]
    fn trivial_bound() {
        let r = distance(&steane(), 1, &PipelineConfig::default()).unwrap();
        assert_eq!(r.distance.status, Status::ProvenLowerBound);
        assert!(r.sectors.is_empty());
    }

    #[test]
    fn bad_supplied_kernel_is_refused() {
        let mut c = steane();
        c.ker_hx = Some(Gf2Matrix::from_strs(&["1000000"], 7).unwrap());
        assert!(matches!(sector_query(&c, Sector::X, 2, &PipelineConfig::default()), Err(Error::InvalidCode(_))));
        let r = validate(&c, &PipelineConfig::default()).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            cache_dir: Some(dir.path().to_path_buf()),
            ..PipelineConfig::default()
        };
        let a = sector_query(&steane(), Sector::X, 2, &cfg).unwrap();
        let b = sector_query(&steane(), Sector::X, 2, &cfg).unwrap();
        assert!(!a.cached && b.cached);
        assert!(b.certified);
        let c = sector_query(&steane(), Sector::X, 3, &cfg).unwrap();
        let d = sector_query(&steane(), Sector::X, 3, &cfg).unwrap();
        assert_eq!(c.witness, d.witness);
        assert!(d.cached);
    }
}
