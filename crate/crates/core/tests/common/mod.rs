//! Independent ground truth for the integration tests. Nothing here calls
//! into the elimination or solver code it is used to check.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::ops::{Add, Mul};
use std::path::PathBuf;

use proptest::prelude::*;
use stabsat::code::{load_code, CssCode};
use stabsat::encode::{encode_location_with, encode_perbit, slot_width, Cnf, DistanceQuery, LocationOptions, Role};
use stabsat::gf2::{BitString, Gf2Matrix};
use stabsat::pauli::{PauliLetter, PauliOp};

pub fn fixture(name: &str) -> CssCode {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    load_code(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn steane_h() -> Gf2Matrix {
    Gf2Matrix::from_strs(&["1001011", "0101101", "0010111"], 7).unwrap()
}

// ---------------------------------------------------------------- GF(2) by enumeration

pub fn mask(v: &BitString) -> u64 {
    assert!(v.len() <= 64);
    v.iter_ones().fold(0, |m, j| m | 1 << j)
}

pub fn masks(m: &Gf2Matrix) -> Vec<u64> {
    m.rows().iter().map(mask).collect()
}

/// Every element of the row space, by summing all 2^rows subsets. Rows <= 20.
pub fn span(rows: &[u64]) -> std::collections::HashSet<u64> {
    assert!(rows.len() <= 20);
    (0u32..1 << rows.len())
        .map(|s| rows.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).fold(0, |a, (_, r)| a ^ r))
        .collect()
}

/// log2 of the span size.
pub fn rank_by_span(rows: &[u64]) -> usize {
    span(rows).len().trailing_zeros() as usize
}

pub fn parity(x: u64) -> bool {
    x.count_ones() % 2 == 1
}

/// Vectors of `0..2^n` orthogonal to every row.
pub fn kernel_by_enumeration(rows: &[u64], n: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|&v| rows.iter().all(|&r| !parity(r & v))).collect()
}

/// Minimum weight of `e` with `checks . e = 0` and `e` outside span(excluded).
pub fn sector_distance_bf(checks: &Gf2Matrix, excluded: &Gf2Matrix) -> usize {
    let n = checks.num_cols();
    let c = masks(checks);
    let s = span(&masks(excluded));
    (1u64..1 << n)
        .filter(|&e| c.iter().all(|&r| !parity(r & e)) && !s.contains(&e))
        .map(|e| e.count_ones() as usize)
        .min()
        .unwrap_or(n + 1)
}

pub fn random_matrix(rows: std::ops::RangeInclusive<usize>, cols: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Gf2Matrix> {
    (rows, cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), c), r).prop_map(move |bits| {
            Gf2Matrix::from_rows(bits.iter().map(|b| BitString::from_bools(b)).collect(), c).unwrap()
        })
    })
}

/// CSS pair: `hz` is drawn inside ker(hx) so the pair is always valid.
pub fn random_css(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Gf2Matrix, Gf2Matrix)> {
    n.prop_flat_map(|n| (Just(n), 0..=n / 2 + 1, 0..=n / 2 + 1, any::<u64>()))
        .prop_map(|(n, rx, rz, seed)| random_css_from_seed(n, rx, rz, seed))
}

pub fn random_css_from_seed(n: usize, rx: usize, rz: usize, seed: u64) -> (Gf2Matrix, Gf2Matrix) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let hx_rows: Vec<u64> = (0..rx).map(|_| rng.gen::<u64>() & ((1 << n) - 1)).collect();
    let ker = kernel_by_enumeration(&hx_rows, n);
    let hz_rows: Vec<u64> = (0..rz).map(|_| ker[rng.gen_range(0..ker.len())]).collect();
    let to_m = |rows: &[u64]| {
        Gf2Matrix::from_rows(rows.iter().map(|&r| BitString::from_u64(n, r)).collect(), n).unwrap()
    };
    (to_m(&hx_rows), to_m(&hz_rows))
}

// ---------------------------------------------------------------- CNF by truth table

pub fn eval(cnf: &Cnf, bits: u64) -> bool {
    cnf.clauses.iter().all(|c| {
        c.iter().any(|&l| (bits >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))
    })
}

pub fn brute_force_sat(cnf: &Cnf) -> bool {
    assert!(cnf.num_vars <= 24);
    (0u64..1 << cnf.num_vars).any(|b| eval(cnf, b))
}

// ---------------------------------------------------------------- exact Pauli matrices

/// Gaussian integer `re + i im`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Gi(pub i64, pub i64);

impl Add for Gi {
    type Output = Gi;
    fn add(self, o: Gi) -> Gi {
        Gi(self.0 + o.0, self.1 + o.1)
    }
}

impl Mul for Gi {
    type Output = Gi;
    fn mul(self, o: Gi) -> Gi {
        Gi(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
}

/// `i^k`.
pub fn i_pow(k: u8) -> Gi {
    [Gi(1, 0), Gi(0, 1), Gi(-1, 0), Gi(0, -1)][k as usize % 4]
}

/// Dense square matrix over the Gaussian integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianMatrix {
    pub dim: usize,
    pub data: Vec<Gi>,
}

impl GaussianMatrix {
    pub fn from_rows(rows: &[[Gi; 2]; 2]) -> Self {
        Self { dim: 2, data: rows.iter().flatten().copied().collect() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Gi::default(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Gi(1, 0);
        }
        Self { dim, data }
    }

    pub fn at(&self, i: usize, j: usize) -> Gi {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.dim;
        assert_eq!(d, o.dim);
        let mut data = vec![Gi::default(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.at(i, k);
                if a == Gi::default() {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] = data[i * d + j] + a * o.at(k, j);
                }
            }
        }
        Self { dim: d, data }
    }

    pub fn kron(&self, o: &Self) -> Self {
        let d = self.dim * o.dim;
        let mut data = vec![Gi::default(); d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = self.at(i / o.dim, j / o.dim) * o.at(i % o.dim, j % o.dim);
            }
        }
        Self { dim: d, data }
    }

    pub fn scale(&self, s: Gi) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }
}

pub fn letter_matrix(l: PauliLetter) -> GaussianMatrix {
    let (o, z, i, mi, m) = (Gi(1, 0), Gi(0, 0), Gi(0, 1), Gi(0, -1), Gi(-1, 0));
    GaussianMatrix::from_rows(&match l {
        PauliLetter::I => [[o, z], [z, o]],
        PauliLetter::X => [[z, o], [o, z]],
        PauliLetter::Y => [[z, mi], [i, z]],
        PauliLetter::Z => [[o, z], [z, m]],
    })
}

pub fn pauli_matrix(p: &PauliOp) -> GaussianMatrix {
    assert!(p.len() <= 3);
    let m = p
        .letters
        .iter()
        .fold(GaussianMatrix::identity(1), |acc, &l| acc.kron(&letter_matrix(l)));
    m.scale(i_pow(p.phase.exponent()))
}

/// Every phase-`+1` Pauli string of length `n`.
pub fn all_paulis(n: usize) -> Vec<PauliOp> {
    (0..4usize.pow(n as u32))
        .map(|code| {
            let letters = (0..n).map(|i| PauliLetter::ALL[code / 4usize.pow(i as u32) % 4]).collect();
            PauliOp::new(stabsat::pauli::Phase::ONE, letters)
        })
        .collect()
}

/// Plain recursive DPLL with unit propagation, for formulas too wide for a
/// truth table but still small. `fixed` literals are assumed true.
pub fn dpll_sat(cnf: &Cnf, fixed: &[i32]) -> bool {
    let mut assign = vec![0i8; cnf.num_vars as usize + 1];
    for &l in fixed {
        let v = l.unsigned_abs() as usize;
        let val = if l > 0 { 1 } else { -1 };
        if assign[v] == -val {
            return false;
        }
        assign[v] = val;
    }
    dpll(&cnf.clauses, &mut assign)
}

fn dpll(clauses: &[Vec<i32>], assign: &mut Vec<i8>) -> bool {
    let value = |a: &[i8], l: i32| {
        let v = a[l.unsigned_abs() as usize];
        if l > 0 { v } else { -v }
    };
    let mut trail = Vec::new();
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut count = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        count += 1;
                        unassigned = Some(l);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            if count == 0 {
                for v in trail {
                    assign[v] = 0;
                }
                return false;
            }
            if count == 1 {
                let l = unassigned.unwrap();
                let v = l.unsigned_abs() as usize;
                assign[v] = if l > 0 { 1 } else { -1 };
                trail.push(v);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let Some(v) = (1..assign.len()).find(|&v| assign[v] == 0) else {
        return true;
    };
    for val in [1, -1] {
        assign[v] = val;
        if dpll(clauses, assign) {
            return true;
        }
    }
    assign[v] = 0;
    for v in trail {
        assign[v] = 0;
    }
    false
}

// ---------------------------------------------------------------- proof mutation

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    Id,
    Literal,
    Hint,
}

/// Changes one token of one addition line: its id, one clause literal, or one
/// hint. Returns `None` if the chosen line has no token of the chosen kind.
pub fn mutate_proof(text: &str, num_vars: u32, kind: Mutation, rng: &mut impl rand::Rng) -> Option<String> {
    let lines: Vec<&str> = text.lines().collect();
    let adds: Vec<usize> = (0..lines.len())
        .filter(|&i| {
            let t: Vec<&str> = lines[i].split_whitespace().collect();
            t.len() > 1 && t[1] != "d" && !lines[i].starts_with('c')
        })
        .collect();
    let at = adds[rng.gen_range(0..adds.len())];
    let mut toks: Vec<i64> = lines[at].split_whitespace().map(|t| t.parse().unwrap()).collect();
    let z = toks[1..].iter().position(|&v| v == 0).unwrap() + 1;
    let id = toks[0];
    match kind {
        Mutation::Id => {
            let delta = [-2, -1, 1, 2][rng.gen_range(0..4)];
            toks[0] = (id + delta).max(1);
            if toks[0] == id {
                toks[0] = id + 1;
            }
        }
        Mutation::Literal => {
            if z == 1 {
                return None;
            }
            let k = rng.gen_range(1..z);
            loop {
                let v = rng.gen_range(1..=num_vars as i64);
                let l = if rng.gen() { v } else { -v };
                if l != toks[k] {
                    toks[k] = l;
                    break;
                }
            }
        }
        Mutation::Hint => {
            let hints = z + 1..toks.len() - 1;
            if hints.is_empty() || id < 3 {
                return None;
            }
            let k = rng.gen_range(hints);
            loop {
                let h = rng.gen_range(1..id);
                if h != toks[k] {
                    toks[k] = h;
                    break;
                }
            }
        }
    }
    let mut out = String::with_capacity(text.len() + 8);
    for (i, l) in lines.iter().enumerate() {
        if i == at {
            let joined: Vec<String> = toks.iter().map(|t| t.to_string()).collect();
            out.push_str(&joined.join(" "));
        } else {
            out.push_str(l);
        }
        out.push('\n');
    }
    Some(out)
}

// ---------------------------------------------------------------- projected model sets

/// Error vectors the query admits, by direct enumeration.
pub fn admitted(q: &DistanceQuery) -> BTreeSet<u64> {
    let stab = masks(&q.stab_rows);
    let excl = masks(&q.excl_gens);
    (1u64..1 << q.n)
        .filter(|&e| {
            e.count_ones() as usize <= q.weight_bound
                && stab.iter().all(|&s| !parity(s & e))
                && excl.iter().any(|&g| parity(g & e))
        })
        .collect()
}

/// E-projections of the per-bit CNF: each E is fixed and the rest is left to DPLL.
pub fn perbit_models(q: &DistanceQuery) -> BTreeSet<u64> {
    let (cnf, vm) = encode_perbit(q);
    let e: Vec<i32> = (0..q.n).map(|j| vm.var(Role::Error(j)).unwrap() as i32).collect();
    (0u64..1 << q.n)
        .filter(|&bits| {
            let fixed: Vec<i32> = e.iter().enumerate().map(|(j, &v)| if bits >> j & 1 == 1 { v } else { -v }).collect();
            dpll_sat(&cnf, &fixed)
        })
        .collect()
}

/// E-projections of the location CNF: every slot tuple is fixed in turn.
pub fn location_models(q: &DistanceQuery, opts: LocationOptions) -> BTreeSet<u64> {
    let (cnf, vm) = encode_location_with(q, opts).unwrap();
    let width = slot_width(q.n);
    let w = q.weight_bound;
    let mut out = BTreeSet::new();
    let total = (1usize << width).pow(w as u32);
    for code in 0..total {
        let slots: Vec<usize> = (0..w).map(|i| code >> (i * width) & ((1 << width) - 1)).collect();
        let mut fixed = vec![];
        for (i, &s) in slots.iter().enumerate() {
            for bit in 0..width {
                let v = vm.var(Role::Location { slot: i, bit }).unwrap() as i32;
                fixed.push(if s >> bit & 1 == 1 { v } else { -v });
            }
        }
        if dpll_sat(&cnf, &fixed) {
            assert!(slots.iter().all(|&s| s < q.n), "slot out of range accepted: {slots:?}");
            out.insert(slots.iter().fold(0u64, |m, &s| m | 1 << s));
        }
    }
    out
}
