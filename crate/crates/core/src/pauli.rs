//! Phased Pauli operators and their binary symplectic form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    /// `(x, z)` bits: I = (0,0), X = (1,0), Z = (0,1), Y = (1,1).
    pub fn to_bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// Single-qubit products `P * Q = i^e R`, indexed `[P][Q]` in I, X, Y, Z order.
/// Derived from the 2x2 matrices, e.g. `X Z = -i Y` and `Z X = i Y`.
const PRODUCT_TABLE: [[(PauliLetter, u8); 4]; 4] = {
    use PauliLetter::*;
    [
        [(I, 0), (X, 0), (Y, 0), (Z, 0)],
        [(X, 0), (I, 0), (Z, 1), (Y, 3)],
        [(Y, 0), (Z, 3), (I, 0), (X, 1)],
        [(Z, 0), (Y, 1), (X, 3), (I, 0)],
    ]
};

/// Single-qubit product with its phase exponent.
pub fn letter_product(p: PauliLetter, q: PauliLetter) -> (PauliLetter, Phase) {
    let (r, e) = PRODUCT_TABLE[p.index()][q.index()];
    (r, Phase(e))
}

/// Anti-commutation indicator: 0 when either letter is I or the letters are equal.
pub fn phi(p: PauliLetter, q: PauliLetter) -> bool {
    !(p == PauliLetter::I || q == PauliLetter::I || p == q)
}

/// A phase `i^k`, `k` in 0..4.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(exponent: u32) -> Self {
        Phase((exponent % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }


    fn prefix(self) -> &'static str {
        ["+", "+i", "-", "-i"][self.0 as usize]
    }
}

/// `phase * P_0 (x) P_1 (x) ... (x) P_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub phase: Phase,
    pub letters: Vec<PauliLetter>,
}

impl PauliOp {
    pub fn new(phase: Phase, letters: Vec<PauliLetter>) -> Self {
        Self { phase, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Phase::ONE, vec![PauliLetter::I; n])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &PauliOp) -> Result<PauliOp> {
        Error::check_len("pauli product", self.len(), other.len())?;
        let mut phase = self.phase * other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&p, &q)| {
                let (r, e) = letter_product(p, q);
                phase = phase * e;
                r
            })
            .collect();
        Ok(PauliOp { phase, letters })
    }

    pub fn commutes(&self, other: &PauliOp) -> Result<bool> {
        Error::check_len("pauli commutation", self.len(), other.len())?;
        let parity = self
            .letters
            .iter()
            .zip(&other.letters)
            .fold(false, |acc, (&p, &q)| acc ^ phi(p, q));
        Ok(!parity)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&l| l != PauliLetter::I).count()
    }

    /// Drops the phase.
    pub fn to_binsymp(&self) -> BinSympPauli {
        let n = self.len();
        let mut x = BitString::zeros(n);
        let mut z = BitString::zeros(n);
        for (i, l) in self.letters.iter().enumerate() {
            let (xb, zb) = l.to_bits();
            x.set(i, xb);
            z.set(i, zb);
        }
        BinSympPauli { x, z }
    }

    /// Phase-`+1` operator with the given letters.
    pub fn from_binsymp(b: &BinSympPauli) -> PauliOp {
        let letters = (0..b.len())
            .map(|i| PauliLetter::from_bits(b.x.get(i), b.z.get(i)))
            .collect();
        PauliOp::new(Phase::ONE, letters)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.prefix())?;
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    /// Accepts an optional phase prefix (`+`, `-`, `+i`, `-i`, `i`) followed by
    /// letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::ONE, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (Phase::I, r)
        } else {
            (Phase::ONE, s)
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(PauliLetter::I),
                'X' => Ok(PauliLetter::X),
                'Y' => Ok(PauliLetter::Y),
                'Z' => Ok(PauliLetter::Z),
                other => Err(Error::parse(0, format!("bad Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliOp::new(phase, letters))
    }
}

/// Phaseless Pauli operator as `(x | z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinSympPauli {
    pub x: BitString,
    pub z: BitString,
}

impl BinSympPauli {
    pub fn new(x: BitString, z: BitString) -> Result<Self> {
        Error::check_len("binary symplectic halves", x.len(), z.len())?;
        Ok(Self { x, z })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            x: BitString::zeros(n),
            z: BitString::zeros(n),
        }
    }

    /// Splits a `2n`-bit vector `(x | z)`.
    pub fn from_stacked(v: &BitString) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Usage(format!("stacked vector has odd length {}", v.len())));
        }
        let n = v.len() / 2;
        Ok(Self {
            x: v.slice(0, n),
            z: v.slice(n, 2 * n),
        })
    }

    pub fn stacked(&self) -> BitString {
        self.x.concat(&self.z)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn symplectic_prod(&self, other: &BinSympPauli) -> Result<bool> {
        Error::check_len("symplectic product", self.len(), other.len())?;
        Ok(self.x.dot_unchecked(&other.z) ^ self.z.dot_unchecked(&other.x))
    }

    pub fn xor(&self, other: &BinSympPauli) -> Result<BinSympPauli> {
        Ok(BinSympPauli {
            x: self.x.xor(&other.x)?,
            z: self.z.xor(&other.z)?,
        })
    }

    /// Pauli weight: qubits where the operator is not I.
    pub fn weight(&self) -> usize {
        self.x.or(&self.z).expect("halves share a length").count_ones()
    }

    /// `|x| + |z|`; counts Y positions twice.
    pub fn binary_weight(&self) -> usize {
        self.x.count_ones() + self.z.count_ones()
    }
}

impl fmt::Display for BinSympPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.x, self.z)
    }
}
