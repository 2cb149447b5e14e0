//! Reductions from distance and independence questions to CNF.
//!
//! A [`DistanceQuery`] asks for an error `E` of length `n` with
//! `1 <= wt(E) <= w`, `s . E = 0` for every check row `s`, and `g . E = 1` for
//! at least one exclusion generator `g`. With the exclusion generators spanning
//! `ker(H)`, the last condition says `E` lies outside the row space of `H`.

mod cnf;
mod gadgets;
mod varmap;

use std::collections::HashMap;

pub use cnf::{Cnf, Lit, Model};
pub use gadgets::{at_most_k, xor_clauses, CnfBuilder, Sig};
pub use varmap::{Encoding, Role, VarMap};

use crate::code::{CssCode, Sector};
use crate::error::{Error, Result};
use crate::gf2::{BitString, Gf2Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceQuery {
    pub n: usize,
    pub stab_rows: Gf2Matrix,
    pub excl_gens: Gf2Matrix,
    pub weight_bound: usize,
}

impl DistanceQuery {
    pub fn new(stab_rows: Gf2Matrix, excl_gens: Gf2Matrix, weight_bound: usize) -> Result<Self> {
        let n = stab_rows.num_cols();
        Error::check_len("query exclusion generators", excl_gens.num_cols(), n)?;
        if weight_bound == 0 {
            return Err(Error::Usage("weight bound must be at least 1".into()));
        }
        Ok(Self {
            n,
            stab_rows,
            excl_gens,
            weight_bound,
        })
    }

    /// Sector query for a CSS code: checks from the opposite-type stabilizers,
    /// exclusion generators from the kernel of the same-type ones.
    pub fn for_sector(code: &CssCode, sector: Sector, weight_bound: usize) -> Result<Self> {
        let (checks, _) = code.sector_matrices(sector);
        Self::new(checks.clone(), code.sector_kernel(sector).into_owned(), weight_bound)
    }

    /// Direct check of the query conditions on a candidate error.
    pub fn accepts(&self, e: &BitString) -> bool {
        if e.len() != self.n {
            return false;
        }
        let w = e.count_ones();
        w >= 1
            && w <= self.weight_bound
            && self.stab_rows.rows().iter().all(|s| !s.dot_unchecked(e))
            && self.excl_gens.rows().iter().any(|g| g.dot_unchecked(e))
    }
}

/// One variable per error bit.
pub fn encode_perbit(q: &DistanceQuery) -> (Cnf, VarMap) {
    let mut b = CnfBuilder::new();
    let e: Vec<Lit> = (0..q.n).map(|j| b.var(Role::Error(j))).collect();
    let t: Vec<Lit> = (0..q.excl_gens.num_rows()).map(|g| b.var(Role::Exclusion(g))).collect();

    for s in q.stab_rows.rows() {
        let lits: Vec<Lit> = s.iter_ones().map(|j| e[j]).collect();
        xor_clauses(&mut b, &lits, false);
    }
    for (g, row) in q.excl_gens.rows().iter().enumerate() {
        // t_g <-> (g . E = 1)
        let mut lits: Vec<Lit> = row.iter_ones().map(|j| e[j]).collect();
        lits.push(t[g]);
        xor_clauses(&mut b, &lits, false);
    }
    let trivially_unsat = t.is_empty();
    b.clause(&t);
    at_most_k(&mut b, &e, q.weight_bound);

    let (cnf, roles, _) = b.finish();
    let vm = VarMap::new(Encoding::PerBit, q.n, q.weight_bound, 0, roles, trivially_unsat);
    (cnf, vm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocationOptions {
    /// Rows with at most this many ones are looked up by enumerating their
    /// support; denser rows use a multiplexer tree over the slot bits.
    pub support_threshold: usize,
    /// Require the slots to be sorted.
    pub symmetry_breaking: bool,
}

impl Default for LocationOptions {
    fn default() -> Self {
        Self {
            support_threshold: 16,
            symmetry_breaking: true,
        }
    }
}

/// `ceil(log2 n)`, with `n = 1` needing no bits.
pub fn slot_width(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `w` sorted location slots of `ceil(log2 n)` bits each. The error is the set
/// of named locations; first-occurrence flags keep repeated slots from
/// counting twice in dot products.
pub fn encode_location(q: &DistanceQuery) -> Result<(Cnf, VarMap)> {
    encode_location_with(q, LocationOptions::default())
}

pub fn encode_location_with(q: &DistanceQuery, opts: LocationOptions) -> Result<(Cnf, VarMap)> {
    if q.n == 0 {
        return Err(Error::Usage("location encoding needs n >= 1".into()));
    }
    let n = q.n;
    let w = q.weight_bound;
    let width = slot_width(n);
    let mut b = CnfBuilder::new();

    let slots: Vec<Vec<Sig>> = (0..w)
        .map(|slot| {
            (0..width)
                .map(|bit| Sig::Lit(b.var(Role::Location { slot, bit })))
                .collect()
        })
        .collect();
    let mut flags = vec![Sig::TRUE];
    for slot in 1..w {
        flags.push(Sig::Lit(b.var(Role::FirstOccurrence(slot))));
    }
    let t: Vec<Lit> = (0..q.excl_gens.num_rows()).map(|g| b.var(Role::Exclusion(g))).collect();

    for slot in &slots {
        at_most_const(&mut b, slot, n - 1);
    }
    for i in 1..w {
        if opts.symmetry_breaking {
            let le = less_or_equal(&mut b, &slots[i - 1], &slots[i]);
            b.assert(le);
        }
        let diffs: Vec<Sig> = slots[i - 1]
            .iter()
            .zip(&slots[i])
            .map(|(&x, &y)| b.xor2(x, y))
            .collect();
        let differs = b.or(&diffs);
        let Sig::Lit(f) = flags[i] else { unreachable!() };
        b.equate(f, differs);
    }

    let mut lookup = Lookup::new(&slots, n, opts.support_threshold);
    for s in q.stab_rows.rows() {
        let terms = lookup.terms(&mut b, s, &flags);
        b.xor_sig(&terms, false);
    }
    for (g, row) in q.excl_gens.rows().iter().enumerate() {
        let mut terms = lookup.terms(&mut b, row, &flags);
        terms.push(Sig::Lit(t[g]));
        b.xor_sig(&terms, false);
    }
    let trivially_unsat = t.is_empty();
    b.clause(&t);

    let (cnf, roles, _) = b.finish();
    let vm = VarMap::new(Encoding::Location, n, w, width, roles, trivially_unsat);
    Ok((cnf, vm))
}

/// Unsigned value of `bits` (LSB first) is at most `bound`.
fn at_most_const(b: &mut CnfBuilder, bits: &[Sig], bound: usize) {
    let width = bits.len();
    if width == 0 || bound >= (1usize << width) - 1 {
        return;
    }
    for p in 0..width {
        if bound >> p & 1 == 1 {
            continue;
        }
        // bit p set while every higher set bit of `bound` is matched
        let mut clause = vec![bits[p].not()];
        for (q, &bq) in bits.iter().enumerate().skip(p + 1) {
            if bound >> q & 1 == 1 {
                clause.push(bq.not());
            }
        }
        b.clause_sig(&clause);
    }
}

/// `x <= y` as unsigned integers, bit vectors LSB first.
fn less_or_equal(b: &mut CnfBuilder, x: &[Sig], y: &[Sig]) -> Sig {
    let mut le = Sig::TRUE;
    for (&xb, &yb) in x.iter().zip(y) {
        let lt = b.and(&[xb.not(), yb]);
        let eq = b.xor2(xb, yb).not();
        let keep = b.and(&[eq, le]);
        le = b.or(&[lt, keep]);
    }
    le
}

/// Builds `row[L_i]` signals, sharing equality and multiplexer gates.
struct Lookup<'a> {
    slots: &'a [Vec<Sig>],
    n: usize,
    threshold: usize,
    equals: HashMap<(usize, usize), Sig>,
    mux: HashMap<(usize, usize, BitString), Sig>,
}

impl<'a> Lookup<'a> {
    fn new(slots: &'a [Vec<Sig>], n: usize, threshold: usize) -> Self {
        Self {
            slots,
            n,
            threshold,
            equals: HashMap::new(),
            mux: HashMap::new(),
        }
    }

    /// `f_i & row[L_i]` for every slot.
    fn terms(&mut self, b: &mut CnfBuilder, row: &BitString, flags: &[Sig]) -> Vec<Sig> {
        (0..self.slots.len())
            .map(|slot| {
                let bit = self.bit(b, slot, row);
                b.and(&[flags[slot], bit])
            })
            .collect()
    }

    fn bit(&mut self, b: &mut CnfBuilder, slot: usize, row: &BitString) -> Sig {
        if row.count_ones() <= self.threshold {
            let eqs: Vec<Sig> = row.iter_ones().map(|j| self.equals(b, slot, j)).collect();
            b.or(&eqs)
        } else {
            // pad with zeros up to 2^width; slot values >= n are already excluded
            let width = self.slots[slot].len();
            let mut padded = BitString::zeros(1 << width);
            for j in row.iter_ones() {
                padded.set(j, true);
            }
            self.mux_tree(b, slot, width, &padded)
        }
    }

    /// `[L_slot = j]`.
    fn equals(&mut self, b: &mut CnfBuilder, slot: usize, j: usize) -> Sig {
        debug_assert!(j < self.n);
        if let Some(&s) = self.equals.get(&(slot, j)) {
            return s;
        }
        let lits: Vec<Sig> = self.slots[slot]
            .iter()
            .enumerate()
            .map(|(bit, &s)| if j >> bit & 1 == 1 { s } else { s.not() })
            .collect();
        let s = b.and(&lits);
        self.equals.insert((slot, j), s);
        s
    }

    /// Selects `table[L_slot]` using the low `level` bits; `table` has `2^level` entries.
    fn mux_tree(&mut self, b: &mut CnfBuilder, slot: usize, level: usize, table: &BitString) -> Sig {
        if table.is_zero() {
            return Sig::FALSE;
        }
        if table.count_ones() == table.len() {
            return Sig::TRUE;
        }
        let key = (slot, level, table.clone());
        if let Some(&s) = self.mux.get(&key) {
            return s;
        }
        let half = table.len() / 2;
        let lo = self.mux_tree(b, slot, level - 1, &table.slice(0, half));
        let hi = self.mux_tree(b, slot, level - 1, &table.slice(half, table.len()));
        let s = b.mux(self.slots[slot][level - 1], hi, lo);
        self.mux.insert(key, s);
        s
    }
}

/// Row dependency search: coefficients `c_i`, not all zero, with `sum c_i M_i = 0`.
/// Satisfiable iff the rows are linearly dependent.
pub fn encode_independence(m: &Gf2Matrix) -> Result<Cnf> {
    if m.num_rows() == 0 {
        return Err(Error::Usage("independence query needs at least one row".into()));
    }
    let mut b = CnfBuilder::new();
    let c: Vec<Lit> = (0..m.num_rows()).map(|i| b.var(Role::Coefficient(i))).collect();
    let t = m.transpose();
    for col in t.rows() {
        let lits: Vec<Lit> = col.iter_ones().map(|i| c[i]).collect();
        xor_clauses(&mut b, &lits, false);
    }
    b.clause(&c);
    Ok(b.finish().0)
}
