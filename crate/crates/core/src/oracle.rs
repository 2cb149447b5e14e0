//! Brute-force distances, used as ground truth for everything SAT-based.
//!
//! Candidates are scanned by increasing weight. Supports come in
//! lexicographic order and, at the Pauli level, letters in X < Y < Z order,
//! so the reported witness is the lexicographically first one of minimal
//! weight. When nothing qualifies the distance is the sentinel `n + 1`.

use std::collections::HashSet;

use crate::code::{BinSympMatrix, UndetectableTest};
use crate::error::{Error, Result};
use crate::gf2::{BitString, Gf2Matrix};
use crate::pauli::{BinSympPauli, PauliLetter, PauliOp, Phase};

pub const MAX_BSM_QUBITS: usize = 12;
pub const MAX_SECTOR_BITS: usize = 30;
/// Largest number of candidate vectors the sector scan will examine.
pub const SECTOR_BUDGET: u64 = 1 << 28;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Pauli(BinSympPauli),
    Sector(BitString),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceResult {
    pub value: usize,
    pub witness: Option<Witness>,
    pub sentinel: bool,
}

impl DistanceResult {
    fn sentinel(n: usize) -> Self {
        Self {
            value: n + 1,
            witness: None,
            sentinel: true,
        }
    }
}

/// Calls `f` on every `w`-subset of `0..n` in lexicographic order until it returns true.
fn for_each_combination(n: usize, w: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if w > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let Some(i) = (0..w).rev().find(|&i| idx[i] != i + n - w) else {
            return false;
        };
        idx[i] += 1;
        for j in i + 1..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum Pauli weight of an undetectable error of a stabilizer code.
pub fn exact_distance_bsm(b: &BinSympMatrix) -> Result<DistanceResult> {
    if !b.is_commuting() {
        return Err(Error::InvalidCode("stabilizer generators do not commute".into()));
    }
    let n = b.num_qubits();
    if n > MAX_BSM_QUBITS {
        return Err(Error::OracleCap(format!(
            "exhaustive Pauli search is limited to {MAX_BSM_QUBITS} qubits, got {n}"
        )));
    }
    let test = UndetectableTest::new(b);
    const LETTERS: [(bool, bool); 3] = [(true, false), (true, true), (false, true)];
    for w in 1..=n {
        let mut found = None;
        for_each_combination(n, w, |support| {
            let mut digits = vec![0usize; w];
            loop {
                let mut e = BinSympPauli::zeros(n);
                for (&q, &d) in support.iter().zip(&digits) {
                    let (x, z) = LETTERS[d];
                    e.x.set(q, x);
                    e.z.set(q, z);
                }
                if test.check(&e) {
                    found = Some(e);
                    return true;
                }
                // odometer, last qubit fastest
                let Some(k) = (0..w).rev().find(|&k| digits[k] < 2) else {
                    return false;
                };
                digits[k] += 1;
                for d in &mut digits[k + 1..] {
                    *d = 0;
                }
            }
        });
        if let Some(e) = found {
            return Ok(DistanceResult {
                value: w,
                witness: Some(Witness::Pauli(e)),
                sentinel: false,
            });
        }
    }
    Ok(DistanceResult::sentinel(n))
}

/// Minimum weight of `E` with `stab . E = 0` and `E` outside the row space of
/// `excl_space`. Uses its own word-level elimination, independent of [`crate::gf2`].
pub fn exact_sector_distance(stab: &Gf2Matrix, excl_space: &Gf2Matrix) -> Result<DistanceResult> {
    let n = stab.num_cols();
    Error::check_len("sector oracle column count", excl_space.num_cols(), n)?;
    if n > MAX_SECTOR_BITS {
        return Err(Error::OracleCap(format!(
            "exhaustive sector search is limited to {MAX_SECTOR_BITS} bits, got {n}"
        )));
    }
    let to_mask = |v: &BitString| v.iter_ones().fold(0u64, |m, j| m | 1 << j);
    let checks: Vec<u64> = stab.rows().iter().map(to_mask).collect();

    // echelon basis keyed by highest set bit
    let mut basis: Vec<u64> = Vec::new();
    for r in excl_space.rows() {
        let mut v = to_mask(r);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let in_span = |mut v: u64| {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        v == 0
    };

    let mut examined = 0u64;
    for w in 1..=n {
        let mut found = None;
        let mut over_budget = false;
        for_each_combination(n, w, |support| {
            examined += 1;
            if examined > SECTOR_BUDGET {
                over_budget = true;
                return true;
            }
            let e = support.iter().fold(0u64, |m, &j| m | 1 << j);
            if checks.iter().all(|&c| (c & e).count_ones() % 2 == 0) && !in_span(e) {
                found = Some(BitString::from_indices(n, support.iter().copied()));
                return true;
            }
            false
        });
        if over_budget {
            return Err(Error::OracleCap(format!(
                "sector search exceeded {SECTOR_BUDGET} candidates at weight {w}"
            )));
        }
        if let Some(e) = found {
            return Ok(DistanceResult {
                value: w,
                witness: Some(Witness::Sector(e)),
                sentinel: false,
            });
        }
    }
    Ok(DistanceResult::sentinel(n))
}

/// Distance computed on symbolic Pauli operators rather than bit vectors:
/// the stabilizer group is closed under multiplication, and every phaseless
/// Pauli is tested with [`PauliOp::commutes`]. Only for `n <= 3`.
pub fn pauli_level_distance(b: &BinSympMatrix) -> Result<usize> {
    let n = b.num_qubits();
    if n > 3 {
        return Err(Error::Usage(format!("Pauli-level search needs n <= 3, got {n}")));
    }
    let gens: Vec<PauliOp> = b.rows().map(|r| PauliOp::from_binsymp(&r)).collect();
    let mut group: HashSet<Vec<PauliLetter>> = HashSet::from([vec![PauliLetter::I; n]]);
    let mut frontier = vec![PauliOp::identity(n)];
    while let Some(p) = frontier.pop() {
        for g in &gens {
            let q = p.mul(g)?;
            if group.insert(q.letters.clone()) {
                frontier.push(q);
            }
        }
    }
    let mut best = n + 1;
    for code in 0..4usize.pow(n as u32) {
        let letters: Vec<PauliLetter> = (0..n).map(|i| PauliLetter::ALL[code / 4usize.pow(i as u32) % 4]).collect();
        let p = PauliOp::new(Phase::ONE, letters);
        let mut normalizes = true;
        for g in &gens {
            normalizes &= p.commutes(g)?;
        }
        if normalizes && !group.contains(&p.letters) {
            best = best.min(p.weight());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::css_bsm;

    fn single_z() -> BinSympMatrix {
        BinSympMatrix::new(Gf2Matrix::zeros(1, 1), Gf2Matrix::identity(1)).unwrap()
    }

    fn steane() -> Gf2Matrix {
        Gf2Matrix::from_strs(&["1001011", "0101101", "0010111"], 7).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = vec![];
        for_each_combination(4, 2, |c| {
            seen.push(c.to_vec());
            false
        });
        assert_eq!(seen, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]);
    }

    #[test]
    fn single_z_is_sentinel() {
        let r = exact_distance_bsm(&single_z()).unwrap();
        assert_eq!((r.value, r.sentinel, r.witness), (2, true, None));
        assert_eq!(pauli_level_distance(&single_z()).unwrap(), 2);
    }

    #[test]
    fn steane_distances() {
        let h = steane();
        let r = exact_distance_bsm(&css_bsm(&h, &h).unwrap()).unwrap();
        assert_eq!(r.value, 3);
        let s = exact_sector_distance(&h, &h).unwrap();
        assert_eq!(s.value, 3);
        let Some(Witness::Sector(e)) = s.witness else { panic!() };
        assert_eq!(e.count_ones(), 3);
    }

    #[test]
    fn tiny_pauli_level_cases() {
        let zz = BinSympMatrix::new(Gf2Matrix::zeros(1, 2), Gf2Matrix::from_strs(&["11"], 2).unwrap()).unwrap();
        assert_eq!(pauli_level_distance(&zz).unwrap(), 1);
        assert_eq!(exact_distance_bsm(&zz).unwrap().value, 1);
        let rep = BinSympMatrix::new(
            Gf2Matrix::zeros(2, 3),
            Gf2Matrix::from_strs(&["110", "011"], 3).unwrap(),
        )
        .unwrap();
        assert_eq!(pauli_level_distance(&rep).unwrap(), 1);
    }

    #[test]
    fn full_exclusion_is_sentinel() {
        let stab = Gf2Matrix::from_strs(&["110", "011"], 3).unwrap();
        let r = exact_sector_distance(&stab, &stab.kernel_basis()).unwrap();
        assert!(r.sentinel);
        assert_eq!(r.value, 4);
    }

    #[test]
    fn caps() {
        let big = Gf2Matrix::zeros(1, 13);
        let b = BinSympMatrix::new(big.clone(), big).unwrap();
        assert!(matches!(exact_distance_bsm(&b), Err(Error::OracleCap(_))));
        assert!(pauli_level_distance(&b).is_err());
    }
}
