//! Bit-packed vectors and matrices over GF(2).
//!
//! Bits are stored in 64-bit limbs, position 0 in the least-significant bit of
//! the first limb. Every operation that combines rows works a whole limb at a
//! time. Matrices are immutable once built; elimination runs on a private copy.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A fixed-length string of bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` whose ones sit at `indices`.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector from the low `len` bits of an integer (bit 0 = position 0).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len >= 64 || value >> len == 0, "value wider than {len} bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit {index} out of range for length {}", self.len);
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit {index} out of range for length {}", self.len);
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len, "bit {index} out of range for length {}", self.len);
        self.words[index / WORD_BITS] ^= 1u64 << (index % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions of the ones, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitString) -> Result<bool> {
        Error::check_len("dot product", self.len, other.len)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &BitString) -> bool {
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// Panics if the lengths differ.
    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "xor of bit strings with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        Error::check_len("xor", self.len, other.len)?;
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    pub fn or(&self, other: &BitString) -> Result<BitString> {
        Error::check_len("or", self.len, other.len)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Ok(BitString {
            len: self.len,
            words,
        })
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = BitString::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len);
        BitString::from_indices(
            end - start,
            self.iter_ones()
                .filter(|&i| i >= start && i < end)
                .map(|i| i - start),
        )
    }

    /// Hex rendering of the integer whose bit `i` is position `i`.
    pub fn to_hex(&self) -> String {
        let mut digits = String::new();
        for &w in self.words.iter().rev() {
            if digits.is_empty() {
                if w != 0 {
                    digits.push_str(&format!("{w:x}"));
                }
            } else {
                digits.push_str(&format!("{w:016x}"));
            }
        }
        if digits.is_empty() {
            digits.push('0');
        }
        format!("0x{digits}")
    }

    /// Inverse of [`BitString::to_hex`]; accepts an optional `0x` prefix and
    /// either case. Set bits at or beyond `len` are rejected.
    pub fn from_hex(len: usize, text: &str) -> Result<BitString> {
        let t = text.trim();
        let t = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        if t.is_empty() {
            return Err(Error::parse(0, format!("empty hex literal {text:?}")));
        }
        let mut v = BitString::zeros(len);
        for (k, c) in t.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::parse(0, format!("bad hex digit {c:?} in {text:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let pos = 4 * k + b;
                    if pos >= len {
                        return Err(Error::parse(
                            0,
                            format!("hex literal {text:?} has bit {pos} set beyond length {len}"),
                        ));
                    }
                    v.set(pos, true);
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Display for BitString {
    /// Positions left to right, position 0 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, position 0 first. Whitespace
    /// and `_` separators are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(0, format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bools(&bits))
    }
}

impl BitXor for &BitString {
    type Output = BitString;

    fn bitxor(self, rhs: &BitString) -> BitString {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

/// Popcount of `x | z`: the number of qubits where `(x_i, z_i) != (0, 0)`.
pub fn pauli_union_weight(x: &BitString, z: &BitString) -> Result<usize> {
    Ok(x.or(z)?.count_ones())
}

/// Dense `rows x cols` matrix over GF(2), stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitString>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitString::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitString::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(rows: Vec<BitString>, cols: usize) -> Result<Self> {
        for r in &rows {
            Error::check_len("matrix row", r.len(), cols)?;
        }
        Ok(Self { cols, rows })
    }

    /// Parses rows written as `0`/`1` strings. All rows must have equal length;
    /// `cols` fixes the width when there are no rows.
    pub fn from_strs(rows: &[&str], cols: usize) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.parse::<BitString>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows, cols)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let rows = (0..rows)
            .map(|i| BitString::from_indices(cols, (0..cols).filter(|&j| f(i, j))))
            .collect();
        Self { cols, rows }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitString {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitString::is_zero)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                out.rows[j].set(i, true);
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        Error::check_len("hstack rows", self.num_rows(), other.num_rows())?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.concat(b))
            .collect();
        Ok(Gf2Matrix {
            cols: self.cols + other.cols,
            rows,
        })
    }

    pub fn vstack(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        Error::check_len("vstack cols", self.cols, other.cols)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Gf2Matrix {
            cols: self.cols,
            rows,
        })
    }

    pub fn select_rows(&self, indices: &[usize]) -> Gf2Matrix {
        Gf2Matrix {
            cols: self.cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// `M v`, one syndrome bit per row.
    pub fn mul_vec(&self, v: &BitString) -> Result<BitString> {
        Error::check_len("matrix-vector product", self.cols, v.len())?;
        Ok(BitString::from_bools(
            &self.rows.iter().map(|r| r.dot_unchecked(v)).collect::<Vec<_>>(),
        ))
    }

    /// `self * other` over GF(2).
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        Error::check_len("matrix product", self.cols, other.num_rows())?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitString::zeros(other.cols);
                for k in r.iter_ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(Gf2Matrix {
            cols: other.cols,
            rows,
        })
    }

    pub fn row_space(&self) -> RowSpace {
        RowSpace::new(self)
    }

    pub fn rank(&self) -> usize {
        self.row_space().rank()
    }

    /// Canonical kernel basis: one vector per free column of the reduced row
    /// echelon form, free columns ascending.
    pub fn kernel_basis(&self) -> Gf2Matrix {
        let rs = self.row_space();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rs.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitString::unit(self.cols, f);
                for (r, &p) in rs.pivots.iter().enumerate() {
                    if rs.basis[r].get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        Gf2Matrix {
            cols: self.cols,
            rows,
        }
    }

    pub fn row_space_contains(&self, v: &BitString) -> Result<bool> {
        Error::check_len("row space membership", self.cols, v.len())?;
        Ok(self.row_space().contains(v))
    }

    pub fn mutually_orth(&self, other: &Gf2Matrix) -> Result<bool> {
        Ok(self.first_non_orthogonal(other)?.is_none())
    }

    /// First `(i, j)` with `self.row(i) . other.row(j) = 1`, if any.
    pub fn first_non_orthogonal(&self, other: &Gf2Matrix) -> Result<Option<(usize, usize)>> {
        Error::check_len("mutual orthogonality", self.cols, other.cols)?;
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                if a.dot_unchecked(b) {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    /// Greedy scan for linearly independent rows, in row order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut space = RowSpace::empty(self.cols);
        let mut picked = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if space.insert(row) {
                picked.push(i);
            }
        }
        picked
    }

    /// Row-major flattening: bit `i * cols + j` holds entry `(i, j)`.
    pub fn flatten(&self) -> BitString {
        let mut out = BitString::zeros(self.rows.len() * self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                out.set(i * self.cols + j, true);
            }
        }
        out
    }

    pub fn unflatten(bits: &BitString, rows: usize, cols: usize) -> Result<Gf2Matrix> {
        Error::check_len("unflatten", bits.len(), rows * cols)?;
        let mut m = Gf2Matrix::zeros(rows, cols);
        for k in bits.iter_ones() {
            m.rows[k / cols].set(k % cols, true);
        }
        Ok(m)
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon basis of a row space, for repeated membership tests.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    basis: Vec<BitString>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn empty(cols: usize) -> Self {
        Self {
            cols,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn new(m: &Gf2Matrix) -> Self {
        let mut rows = m.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..m.cols {
            if next == rows.len() {
                break;
            }
            let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        Self {
            cols: m.cols,
            basis: rows,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The reduced basis as a matrix.
    pub fn basis(&self) -> Gf2Matrix {
        Gf2Matrix {
            cols: self.cols,
            rows: self.basis.clone(),
        }
    }

    /// Residual of `v` after clearing every pivot column.
    pub fn reduce(&self, v: &BitString) -> BitString {
        let mut r = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    /// Panics if `v.len()` differs from the ambient dimension.
    pub fn contains(&self, v: &BitString) -> bool {
        assert_eq!(v.len(), self.cols);
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the space; returns false if it was already a member.
    /// Keeps the basis fully reduced.
    pub fn insert(&mut self, v: &BitString) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter_ones().next() else {
            return false;
        };
        for row in &mut self.basis {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
        true
    }
}

/// JSON shape `{"rows": k, "cols": n, "data": ["0x..", ...]}`, one hex string per row
/// with column 0 in the least-significant bit.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<String>,
}

impl Serialize for Gf2Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows.len(),
            cols: self.cols,
            data: self.rows.iter().map(BitString::to_hex).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Gf2Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.data.len() != raw.rows {
            return Err(D::Error::custom(format!(
                "matrix declares {} rows but carries {}",
                raw.rows,
                raw.data.len()
            )));
        }
        let rows = raw
            .data
            .iter()
            .map(|h| BitString::from_hex(raw.cols, h))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(Gf2Matrix {
            cols: raw.cols,
            rows,
        })
    }
}
