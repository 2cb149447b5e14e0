//! Stabilizer codes in binary symplectic form, CSS and bivariate bicycle
//! constructions, and rank-nullity kernel certification.

use std::borrow::Cow;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitString, Gf2Matrix, RowSpace};
use crate::pauli::BinSympPauli;

/// Stacked binary symplectic rows `(X | Z)`, one stabilizer generator per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinSympMatrix {
    x: Gf2Matrix,
    z: Gf2Matrix,
}

impl BinSympMatrix {
    pub fn new(x: Gf2Matrix, z: Gf2Matrix) -> Result<Self> {
        Error::check_len("BSM row count", x.num_rows(), z.num_rows())?;
        Error::check_len("BSM qubit count", x.num_cols(), z.num_cols())?;
        Ok(Self { x, z })
    }

    pub fn from_paulis(n: usize, rows: &[BinSympPauli]) -> Result<Self> {
        let xs = rows.iter().map(|r| r.x.clone()).collect();
        let zs = rows.iter().map(|r| r.z.clone()).collect();
        Self::new(Gf2Matrix::from_rows(xs, n)?, Gf2Matrix::from_rows(zs, n)?)
    }

    pub fn num_rows(&self) -> usize {
        self.x.num_rows()
    }

    pub fn num_qubits(&self) -> usize {
        self.x.num_cols()
    }

    pub fn x(&self) -> &Gf2Matrix {
        &self.x
    }

    pub fn z(&self) -> &Gf2Matrix {
        &self.z
    }

    pub fn row(&self, i: usize) -> BinSympPauli {
        BinSympPauli {
            x: self.x.row(i).clone(),
            z: self.z.row(i).clone(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = BinSympPauli> + '_ {
        (0..self.num_rows()).map(|i| self.row(i))
    }

    /// The `k x 2n` matrix `[X | Z]`.
    pub fn stacked(&self) -> Gf2Matrix {
        self.x.hstack(&self.z).expect("halves share a row count")
    }

    pub fn is_commuting(&self) -> bool {
        let rows: Vec<_> = self.rows().collect();
        rows.iter().enumerate().all(|(i, a)| {
            rows[i + 1..]
                .iter()
                .all(|b| !a.symplectic_prod(b).expect("rows share a length"))
        })
    }

    /// True iff `e` commutes with every row and is not in the row space.
    pub fn undetectable(&self, e: &BinSympPauli) -> Result<bool> {
        Error::check_len("undetectable test", self.num_qubits(), e.len())?;
        Ok(UndetectableTest::new(self).check(e))
    }
}

/// Precomputed row space for repeated [`BinSympMatrix::undetectable`] queries.
pub struct UndetectableTest<'a> {
    bsm: &'a BinSympMatrix,
    space: RowSpace,
}

impl<'a> UndetectableTest<'a> {
    pub fn new(bsm: &'a BinSympMatrix) -> Self {
        Self {
            bsm,
            space: bsm.stacked().row_space(),
        }
    }

    pub fn check(&self, e: &BinSympPauli) -> bool {
        let commutes = (0..self.bsm.num_rows()).all(|i| {
            !(self.bsm.x.row(i).dot_unchecked(&e.z) ^ self.bsm.z.row(i).dot_unchecked(&e.x))
        });
        commutes && !self.space.contains(&e.stacked())
    }
}

/// CSS binary symplectic matrix: the `hz` rows come first as Z-type
/// generators, followed by the `hx` rows as X-type generators.
pub fn css_bsm(hx: &Gf2Matrix, hz: &Gf2Matrix) -> Result<BinSympMatrix> {
    Error::check_len("CSS column count", hx.num_cols(), hz.num_cols())?;
    let n = hx.num_cols();
    let x = Gf2Matrix::zeros(hz.num_rows(), n).vstack(hx)?;
    let z = hz.vstack(&Gf2Matrix::zeros(hx.num_rows(), n))?;
    BinSympMatrix::new(x, z)
}

/// Error sector of a CSS code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// X-only errors, checked by the Z-type stabilizers.
    X,
    /// Z-only errors, checked by the X-type stabilizers.
    Z,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::X, Sector::Z];
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::X => "x",
            Sector::Z => "z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimedParams {
    pub k: usize,
    pub d: usize,
}

/// A CSS code given by its X-type and Z-type parity-check matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssCode {
    pub name: String,
    pub n: usize,
    pub hx: Gf2Matrix,
    pub hz: Gf2Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ker_hx: Option<Gf2Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ker_hz: Option<Gf2Matrix>,
    #[serde(default, rename = "claimed", skip_serializing_if = "Option::is_none")]
    pub claimed_params: Option<ClaimedParams>,
}

impl CssCode {
    pub fn new(name: impl Into<String>, hx: Gf2Matrix, hz: Gf2Matrix) -> Result<Self> {
        let code = Self {
            name: name.into(),
            n: hx.num_cols(),
            hx,
            hz,
            ker_hx: None,
            ker_hz: None,
            claimed_params: None,
        };
        code.check_shapes()?;
        Ok(code)
    }

    pub fn with_claimed(mut self, k: usize, d: usize) -> Self {
        self.claimed_params = Some(ClaimedParams { k, d });
        self
    }

    pub fn check_shapes(&self) -> Result<()> {
        let bad = |what: &str, got: usize| {
            Err(Error::InvalidCode(format!(
                "{}: {what} has {got} columns, expected n = {}",
                self.name, self.n
            )))
        };
        if self.hx.num_cols() != self.n {
            return bad("hx", self.hx.num_cols());
        }
        if self.hz.num_cols() != self.n {
            return bad("hz", self.hz.num_cols());
        }
        if let Some(k) = &self.ker_hx {
            if k.num_cols() != self.n {
                return bad("ker_hx", k.num_cols());
            }
        }
        if let Some(k) = &self.ker_hz {
            if k.num_cols() != self.n {
                return bad("ker_hz", k.num_cols());
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let code: CssCode = serde_json::from_str(text)?;
        code.check_shapes()?;
        Ok(code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("code serializes")
    }

    /// Dual-containment: every X check is orthogonal to every Z check.
    pub fn is_dual_containing(&self) -> bool {
        self.hx.mutually_orth(&self.hz).expect("shapes checked")
    }

    pub fn compute_k(&self) -> Result<usize> {
        if let Some((i, j)) = self.hx.first_non_orthogonal(&self.hz)? {
            return Err(Error::InvalidCode(format!(
                "{}: hx row {i} and hz row {j} anticommute",
                self.name
            )));
        }
        Ok(self.n - self.hx.rank() - self.hz.rank())
    }

    pub fn to_bsm(&self) -> BinSympMatrix {
        css_bsm(&self.hx, &self.hz).expect("shapes checked")
    }

    pub fn kernel_hx(&self) -> Cow<'_, Gf2Matrix> {
        match &self.ker_hx {
            Some(k) => Cow::Borrowed(k),
            None => Cow::Owned(self.hx.kernel_basis()),
        }
    }

    pub fn kernel_hz(&self) -> Cow<'_, Gf2Matrix> {
        match &self.ker_hz {
            Some(k) => Cow::Borrowed(k),
            None => Cow::Owned(self.hz.kernel_basis()),
        }
    }

    /// `(checks, excluded)` for a sector: an error must pass every row of
    /// `checks` and must not lie in the row space of `excluded`.
    pub fn sector_matrices(&self, sector: Sector) -> (&Gf2Matrix, &Gf2Matrix) {
        match sector {
            Sector::X => (&self.hz, &self.hx),
            Sector::Z => (&self.hx, &self.hz),
        }
    }

    /// Kernel generators of the excluded matrix for `sector`.
    pub fn sector_kernel(&self, sector: Sector) -> Cow<'_, Gf2Matrix> {
        match sector {
            Sector::X => self.kernel_hx(),
            Sector::Z => self.kernel_hz(),
        }
    }
}

/// A bivariate bicycle code description: `A = sum x^i y^j` over `a`, `B` likewise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbSpec {
    pub l: usize,
    pub m: usize,
    pub a: [(usize, usize); 3],
    pub b: [(usize, usize); 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, rename = "claimed", skip_serializing_if = "Option::is_none")]
    pub claimed_params: Option<ClaimedParams>,
}

impl BbSpec {
    pub fn new(l: usize, m: usize, a: [(usize, usize); 3], b: [(usize, usize); 3]) -> Result<Self> {
        if l == 0 || m == 0 {
            return Err(Error::Usage("bivariate bicycle dimensions must be at least 1".into()));
        }
        let reduce = |t: [(usize, usize); 3]| t.map(|(i, j)| (i % l, j % m));
        Ok(Self {
            l,
            m,
            a: reduce(a),
            b: reduce(b),
            name: None,
            claimed_params: None,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BbSpec = serde_json::from_str(text)?;
        let mut spec = Self::new(raw.l, raw.m, raw.a, raw.b)?;
        spec.name = raw.name;
        spec.claimed_params = raw.claimed_params;
        Ok(spec)
    }

    /// `sum x^i y^j` as an `lm x lm` matrix with `x = S_l (x) I_m`, `y = I_l (x) S_m`.
    fn polynomial(&self, terms: &[(usize, usize); 3]) -> Gf2Matrix {
        let (l, m) = (self.l, self.m);
        let mut rows = vec![BitString::zeros(l * m); l * m];
        for &(i, j) in terms {
            for r in 0..l {
                for c in 0..m {
                    let col = ((r + i) % l) * m + (c + j) % m;
                    rows[r * m + c].flip(col);
                }
            }
        }
        Gf2Matrix::from_rows(rows, l * m).expect("square")
    }

    pub fn build(&self) -> CssCode {
        bb_build(self)
    }
}

/// `hx = [A | B]`, `hz = [B^T | A^T]`.
pub fn bb_build(spec: &BbSpec) -> CssCode {
    let a = spec.polynomial(&spec.a);
    let b = spec.polynomial(&spec.b);
    let hx = a.hstack(&b).expect("square blocks");
    let hz = b.transpose().hstack(&a.transpose()).expect("square blocks");
    let name = spec
        .name
        .clone()
        .unwrap_or_else(|| format!("bb-{}-{}", spec.l, spec.m));
    let mut code = CssCode::new(name, hx, hz).expect("square blocks");
    code.claimed_params = spec.claimed_params;
    code
}

/// Either on-disk representation of a code.
pub fn load_code(path: &Path) -> Result<CssCode> {
    let text = std::fs::read_to_string(path)?;
    parse_code(&text)
}

/// Parses a CSS code JSON object, or a bivariate bicycle spec (recognized by its `l` key).
pub fn parse_code(text: &str) -> Result<CssCode> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("l").is_some() {
        Ok(BbSpec::from_json(text)?.build())
    } else {
        CssCode::from_json(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum KernelRejection {
    RankSum { r1: usize, r2: usize, n: usize },
    MatrixRank { bound: usize, rank: usize },
    KernelRank { bound: usize, rank: usize },
    Orthogonality { matrix_row: usize, kernel_row: usize },
}

impl fmt::Display for KernelRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelRejection::RankSum { r1, r2, n } => write!(f, "rank bounds {r1} + {r2} != {n}"),
            KernelRejection::MatrixRank { bound, rank } => {
                write!(f, "matrix rank {rank} is below the claimed bound {bound}")
            }
            KernelRejection::KernelRank { bound, rank } => {
                write!(f, "kernel rank {rank} is below the claimed bound {bound}")
            }
            KernelRejection::Orthogonality { matrix_row, kernel_row } => {
                write!(f, "matrix row {matrix_row} is not orthogonal to kernel row {kernel_row}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reasons", rename_all = "lowercase")]
pub enum KernelVerdict {
    Certified,
    Rejected(Vec<KernelRejection>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelCertificate {
    pub matrix_rank_bound: usize,
    pub kernel_rank_bound: usize,
    pub verdict: KernelVerdict,
}

impl KernelCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == KernelVerdict::Certified
    }
}

/// Certifies that `row space(m2) = ker(m1)` from rank lower bounds `r1 <= rank m1`,
/// `r2 <= rank m2` with `r1 + r2 = n` and mutual orthogonality. Rows of `m2`
/// need not be independent.
pub fn certify_kernel(m1: &Gf2Matrix, m2: &Gf2Matrix, r1: usize, r2: usize) -> Result<KernelCertificate> {
    Error::check_len("kernel certificate columns", m1.num_cols(), m2.num_cols())?;
    let n = m1.num_cols();
    let mut reasons = Vec::new();
    if r1 + r2 != n {
        reasons.push(KernelRejection::RankSum { r1, r2, n });
    }
    let rank1 = m1.rank();
    if rank1 < r1 {
        reasons.push(KernelRejection::MatrixRank { bound: r1, rank: rank1 });
    }
    let rank2 = m2.rank();
    if rank2 < r2 {
        reasons.push(KernelRejection::KernelRank { bound: r2, rank: rank2 });
    }
    if let Some((i, j)) = m1.first_non_orthogonal(m2)? {
        reasons.push(KernelRejection::Orthogonality {
            matrix_row: i,
            kernel_row: j,
        });
    }
    Ok(KernelCertificate {
        matrix_rank_bound: r1,
        kernel_rank_bound: r2,
        verdict: if reasons.is_empty() {
            KernelVerdict::Certified
        } else {
            KernelVerdict::Rejected(reasons)
        },
    })
}

/// `r` row indices whose rows are linearly independent, chosen greedily in
/// row order; `None` when the rank is below `r`.
pub fn independent_row_subset(m: &Gf2Matrix, r: usize) -> Option<Vec<usize>> {
    let mut picked = m.independent_rows();
    if picked.len() < r {
        return None;
    }
    picked.truncate(r);
    Some(picked)
}
