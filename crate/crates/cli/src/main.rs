mod monomial;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stabsat::cert::{check_lrat_reader, CheckOptions};
use stabsat::code::{load_code, BbSpec, Sector};
use stabsat::encode::{Cnf, Encoding};
use stabsat::pipeline::{self, Method, PipelineConfig, Status, DEFAULT_CACHE_DIR};
use stabsat::solver::{Backend, SolverConfig};
use stabsat::Error;

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_SOUNDNESS: u8 = 4;

#[derive(Parser)]
#[command(name = "stabsat", version, about = "Certified minimum distances of CSS codes via SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check orthogonality, ranks and kernel certificates of a code file.
    Validate {
        code: PathBuf,
        #[arg(long)]
        rank_by_sat: Option<bool>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Prove distance >= D, or refute it with a witness.
    Distance {
        code: PathBuf,
        #[arg(long = "d")]
        d: usize,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Find the exact distance.
    Exact {
        code: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Sat)]
        method: MethodArg,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write the CNF and variable map of one sector query.
    Encode {
        code: PathBuf,
        #[arg(long, value_enum)]
        sector: SectorArg,
        #[arg(long)]
        w: usize,
        #[arg(long, value_enum)]
        encoding: Option<EncodingArg>,
        /// Output prefix; writes PREFIX.cnf and PREFIX.varmap.json. DIMACS goes to stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a bivariate bicycle code file.
    Bb {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
        /// Three monomials, e.g. "x3,y1,y2".
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an LRAT proof against a DIMACS formula.
    CheckCert {
        cnf: PathBuf,
        lrat: PathBuf,
        #[arg(long)]
        allow_id_gaps: bool,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    /// "internal" or a path to a DIMACS solver; defaults to $STABSAT_SOLVER, else internal.
    #[arg(long)]
    solver: Option<String>,
    /// Extra argument for the external solver (repeatable).
    #[arg(long = "solver-arg", allow_hyphen_values = true)]
    solver_args: Vec<String>,
    /// Seconds per solver call; 0 means no limit.
    #[arg(long, default_value_t = 0.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accept UNSAT answers without an LRAT proof.
    #[arg(long)]
    no_cert: bool,
    #[arg(long)]
    no_cache: bool,
    #[arg(long, default_value = DEFAULT_CACHE_DIR)]
    cache_dir: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Perbit,
    Location,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Perbit => Encoding::PerBit,
            EncodingArg::Location => Encoding::Location,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    X,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sat,
    Oracle,
}

impl SolveArgs {
    fn config(&self) -> Result<PipelineConfig, Error> {
        let backend = match self.solver.as_deref() {
            Some("internal") => Backend::Internal,
            Some(path) => Backend::external(path),
            None => Backend::from_env().unwrap_or(Backend::Internal),
        };
        let backend = match backend {
            Backend::External { path, mut args, proof_args } => {
                args.extend(self.solver_args.iter().cloned());
                Backend::External { path, args, proof_args }
            }
            b => b,
        };
        if !(self.timeout >= 0.0 && self.timeout.is_finite()) {
            return Err(Error::Usage("timeout must be a non-negative number of seconds".into()));
        }
        Ok(PipelineConfig {
            solver: SolverConfig {
                backend,
                timeout: Duration::from_secs_f64(self.timeout),
                produce_proof: !self.no_cert,
                seed: self.seed,
            },
            encoding: self.encoding.map(Into::into),
            require_certificates: !self.no_cert,
            cache_dir: (!self.no_cache).then(|| self.cache_dir.clone()),
            rank_by_sat: None,
        })
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => pipeline::write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::ProvenLowerBound | Status::Exact => EXIT_OK,
        Status::Refuted => EXIT_REFUTED,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Validate { code, rank_by_sat, solve } => {
            let code = load_code(&code)?;
            let mut cfg = solve.config()?;
            cfg.rank_by_sat = rank_by_sat;
            let report = pipeline::validate(&code, &cfg)?;
            emit(&report, solve.out.as_deref())?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::Distance { code, d, solve } => {
            let code = load_code(&code)?;
            let report = pipeline::distance(&code, d, &solve.config()?)?;
            emit(&report, solve.out.as_deref())?;
            Ok(status_code(report.distance.status))
        }
        Command::Exact { code, method, solve } => {
            let code = load_code(&code)?;
            let method = match method {
                MethodArg::Sat => Method::Sat,
                MethodArg::Oracle => Method::Oracle,
            };
            let report = pipeline::exact(&code, method, &solve.config()?)?;
            emit(&report, solve.out.as_deref())?;
            Ok(status_code(report.distance.status))
        }
        Command::Encode { code, sector, w, encoding, out } => {
            let code = load_code(&code)?;
            let sector = match sector {
                SectorArg::X => Sector::X,
                SectorArg::Z => Sector::Z,
            };
            let encoding = encoding
                .map(Into::into)
                .unwrap_or_else(|| PipelineConfig::default().encoding_for(code.n));
            let (dimacs, varmap) = pipeline::encode_sector(&code, sector, w, encoding)?;
            match out {
                Some(prefix) => {
                    let with_ext = |ext: &str| {
                        let mut s = prefix.clone().into_os_string();
                        s.push(ext);
                        PathBuf::from(s)
                    };
                    pipeline::write_atomic(&with_ext(".cnf"), dimacs.as_bytes())?;
                    pipeline::write_atomic(&with_ext(".varmap.json"), varmap.as_bytes())?;
                }
                None => print!("{dimacs}"),
            }
            Ok(EXIT_OK)
        }
        Command::Bb { l, m, a, b, name, out } => {
            let a = monomial::parse_monomials(&a).map_err(Error::Usage)?;
            let b = monomial::parse_monomials(&b).map_err(Error::Usage)?;
            let mut spec = BbSpec::new(l, m, a, b)?;
            spec.name = name;
            let text = spec.build().to_json() + "\n";
            match out {
                Some(path) => pipeline::write_atomic(&path, text.as_bytes())?,
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
        Command::CheckCert { cnf, lrat, allow_id_gaps } => {
            let cnf = Cnf::parse_dimacs(&std::fs::read_to_string(cnf)?)?;
            let reader = std::io::BufReader::new(std::fs::File::open(lrat)?);
            let report = check_lrat_reader(&cnf, reader, CheckOptions { allow_id_gaps })?;
            emit(&report, None)?;
            Ok(if report.accepted { EXIT_OK } else { EXIT_REFUTED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("stabsat: {e}");
            ExitCode::from(match e {
                Error::Soundness(_) => EXIT_SOUNDNESS,
                Error::Solver(_) | Error::OracleCap(_) => EXIT_UNKNOWN,
                _ => EXIT_INVALID,
            })
        }
    }
}
