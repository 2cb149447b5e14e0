//! Python bindings. Matrices cross the boundary as lists of 0/1 rows and
//! reports come back as plain dicts.

use std::path::PathBuf;
use std::time::Duration;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use stabsat::cert::check_lrat_text;
use stabsat::code::{load_code, parse_code, BbSpec, CssCode, Sector};
use stabsat::encode::{Cnf, Encoding};
use stabsat::gf2::{BitString, Gf2Matrix};
use stabsat::oracle;
use stabsat::pipeline::{self, Method, PipelineConfig};
use stabsat::solver::{Backend, SolverConfig};
use stabsat::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Solver(_) | Error::Soundness(_) | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| err(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix(rows: Vec<Vec<u8>>, cols: Option<usize>) -> PyResult<Gf2Matrix> {
    let cols = cols.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    let rows = rows
        .into_iter()
        .map(|r| {
            if r.len() != cols {
                return Err(PyValueError::new_err(format!("row of length {} in a {cols}-column matrix", r.len())));
            }
            Ok(BitString::from_bools(&r.iter().map(|&b| b & 1 == 1).collect::<Vec<_>>()))
        })
        .collect::<PyResult<Vec<_>>>()?;
    Gf2Matrix::from_rows(rows, cols).map_err(err)
}

fn unmatrix(m: &Gf2Matrix) -> Vec<Vec<u8>> {
    m.rows().iter().map(|r| r.iter().map(u8::from).collect()).collect()
}

fn sector(s: &str) -> PyResult<Sector> {
    match s {
        "x" | "X" => Ok(Sector::X),
        "z" | "Z" => Ok(Sector::Z),
        _ => Err(PyValueError::new_err(format!("sector must be 'x' or 'z', got {s:?}"))),
    }
}

fn encoding(e: Option<&str>) -> PyResult<Option<Encoding>> {
    match e {
        None => Ok(None),
        Some("perbit") => Ok(Some(Encoding::PerBit)),
        Some("location") => Ok(Some(Encoding::Location)),
        Some(other) => Err(PyValueError::new_err(format!("unknown encoding {other:?}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    solver: Option<String>,
    encoding_name: Option<&str>,
    timeout: f64,
    seed: u64,
    certify: bool,
    cache_dir: Option<PathBuf>,
) -> PyResult<PipelineConfig> {
    let backend = match solver.as_deref() {
        None | Some("internal") => Backend::Internal,
        Some(path) => Backend::external(path),
    };
    if !(timeout >= 0.0 && timeout.is_finite()) {
        return Err(PyValueError::new_err("timeout must be a non-negative number of seconds"));
    }
    Ok(PipelineConfig {
        solver: SolverConfig {
            backend,
            timeout: Duration::from_secs_f64(timeout),
            produce_proof: certify,
            seed,
        },
        encoding: encoding(encoding_name)?,
        require_certificates: certify,
        cache_dir,
        rank_by_sat: None,
    })
}

/// A CSS code given by `hx` and `hz`.
#[pyclass(name = "CssCode", module = "pystabsat", frozen)]
struct PyCssCode {
    inner: CssCode,
}

#[pymethods]
impl PyCssCode {
    #[new]
    #[pyo3(signature = (hx, hz, name = "code".to_string()))]
    fn new(hx: Vec<Vec<u8>>, hz: Vec<Vec<u8>>, name: String) -> PyResult<Self> {
        let n = hx.first().or(hz.first()).map(Vec::len);
        let inner = CssCode::new(name, matrix(hx, n)?, matrix(hz, n)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: load_code(&path).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_code(text).map_err(err)? })
    }

    /// Bivariate bicycle code; `a` and `b` are three `(i, j)` exponent pairs each.
    #[staticmethod]
    #[pyo3(signature = (l, m, a, b, name = None))]
    fn bb(l: usize, m: usize, a: [(usize, usize); 3], b: [(usize, usize); 3], name: Option<String>) -> PyResult<Self> {
        let mut spec = BbSpec::new(l, m, a, b).map_err(err)?;
        spec.name = name;
        Ok(Self { inner: spec.build() })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn hx(&self) -> Vec<Vec<u8>> {
        unmatrix(&self.inner.hx)
    }

    #[getter]
    fn hz(&self) -> Vec<Vec<u8>> {
        unmatrix(&self.inner.hz)
    }

    fn k(&self) -> PyResult<usize> {
        self.inner.compute_k().map_err(err)
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = py
            .detach(|| pipeline::validate(&self.inner, &PipelineConfig::default()))
            .map_err(err)?;
        to_py(py, &report)
    }

    /// Prove `d(C) >= d` or refute it.
    #[pyo3(signature = (d, solver = None, encoding = None, timeout = 0.0, seed = 0, certify = true, cache_dir = None))]
    #[allow(clippy::too_many_arguments)]
    fn distance<'py>(
        &self,
        py: Python<'py>,
        d: usize,
        solver: Option<String>,
        encoding: Option<&str>,
        timeout: f64,
        seed: u64,
        certify: bool,
        cache_dir: Option<PathBuf>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = config(solver, encoding, timeout, seed, certify, cache_dir)?;
        let report = py.detach(|| pipeline::distance(&self.inner, d, &cfg)).map_err(err)?;
        to_py(py, &report)
    }

    /// Exact distance, by SAT scan (`method="sat"`) or brute force (`"oracle"`).
    #[pyo3(signature = (method = "sat", solver = None, encoding = None, timeout = 0.0, seed = 0, certify = true))]
    #[allow(clippy::too_many_arguments)]
    fn exact<'py>(
        &self,
        py: Python<'py>,
        method: &str,
        solver: Option<String>,
        encoding: Option<&str>,
        timeout: f64,
        seed: u64,
        certify: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let method = match method {
            "sat" => Method::Sat,
            "oracle" => Method::Oracle,
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        let cfg = config(solver, encoding, timeout, seed, certify, None)?;
        let report = py.detach(|| pipeline::exact(&self.inner, method, &cfg)).map_err(err)?;
        to_py(py, &report)
    }

    /// `(dimacs, varmap_json)` for one sector query.
    #[pyo3(signature = (sector, w, encoding = None))]
    fn encode(&self, sector: &str, w: usize, encoding: Option<&str>) -> PyResult<(String, String)> {
        let s = self::sector(sector)?;
        let enc = self::encoding(encoding)?.unwrap_or_else(|| PipelineConfig::default().encoding_for(self.inner.n));
        pipeline::encode_sector(&self.inner, s, w, enc).map_err(err)
    }

    /// Brute-force distance of one sector; `None` for the whole code.
    #[pyo3(signature = (sector = None))]
    fn oracle_distance(&self, sector: Option<&str>) -> PyResult<usize> {
        let sectors = match sector {
            Some(s) => vec![self::sector(s)?],
            None => Sector::BOTH.to_vec(),
        };
        let mut best = usize::MAX;
        for s in sectors {
            let (checks, excluded) = self.inner.sector_matrices(s);
            best = best.min(oracle::exact_sector_distance(checks, excluded).map_err(err)?.value);
        }
        Ok(best)
    }

    fn __repr__(&self) -> String {
        format!(
            "CssCode(name={:?}, n={}, rx={}, rz={})",
            self.inner.name,
            self.inner.n,
            self.inner.hx.num_rows(),
            self.inner.hz.num_rows()
        )
    }
}

#[pyfunction]
fn gf2_rank(rows: Vec<Vec<u8>>) -> PyResult<usize> {
    Ok(matrix(rows, None)?.rank())
}

#[pyfunction]
#[pyo3(signature = (rows, cols = None))]
fn gf2_kernel(rows: Vec<Vec<u8>>, cols: Option<usize>) -> PyResult<Vec<Vec<u8>>> {
    Ok(unmatrix(&matrix(rows, cols)?.kernel_basis()))
}

/// Check LRAT proof text against DIMACS text; returns the checker report.
#[pyfunction]
fn check_lrat<'py>(py: Python<'py>, dimacs: &str, lrat: &str) -> PyResult<Bound<'py, PyAny>> {
    let cnf = Cnf::parse_dimacs(dimacs).map_err(err)?;
    let report = check_lrat_text(&cnf, lrat).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn pystabsat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCssCode>()?;
    m.add_function(wrap_pyfunction!(gf2_rank, m)?)?;
    m.add_function(wrap_pyfunction!(gf2_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(check_lrat, m)?)?;
    Ok(())
}
