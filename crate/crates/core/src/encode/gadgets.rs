//! Clause-level building blocks: a variable allocator with role tracking,
//! constant-folding Tseitin gates, XOR chains and sequential counters.

use super::cnf::{Cnf, Lit};
use super::varmap::Role;

/// A gate output: either a known constant or a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sig {
    Const(bool),
    Lit(Lit),
}

impl Sig {
    pub const TRUE: Sig = Sig::Const(true);
    pub const FALSE: Sig = Sig::Const(false);

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Sig {
        match self {
            Sig::Const(b) => Sig::Const(!b),
            Sig::Lit(l) => Sig::Lit(-l),
        }
    }
}

/// Clause database plus the role of every allocated variable.
#[derive(Debug, Default)]
pub struct CnfBuilder {
    cnf: Cnf,
    roles: Vec<Role>,
    aux_count: usize,
    contradiction: bool,
}

impl CnfBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, role: Role) -> Lit {
        self.roles.push(role);
        self.cnf.fresh_var()
    }

    pub fn aux(&mut self) -> Lit {
        let k = self.aux_count;
        self.aux_count += 1;
        self.var(Role::Aux(k))
    }

    pub fn num_vars(&self) -> u32 {
        self.cnf.num_vars
    }

    /// True once an unsatisfiable constraint (for example an empty
    /// disjunction) has been emitted.
    pub fn is_contradictory(&self) -> bool {
        self.contradiction
    }

    pub fn cnf(&self) -> &Cnf {
        &self.cnf
    }

    pub fn finish(self) -> (Cnf, Vec<Role>, bool) {
        (self.cnf, self.roles, self.contradiction)
    }

    /// Adds a clause after dropping repeated literals; tautologies are skipped.
    /// An empty clause is replaced by an explicit contradiction.
    pub fn clause(&mut self, lits: &[Lit]) {
        let mut c: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            if c.contains(&-l) {
                return;
            }
            if !c.contains(&l) {
                c.push(l);
            }
        }
        if c.is_empty() {
            self.contradict();
        } else {
            self.cnf.add_clause(c);
        }
    }

    /// `a` and `-a` for a fresh `a`.
    pub fn contradict(&mut self) {
        let a = self.aux();
        self.cnf.add_clause(vec![a]);
        self.cnf.add_clause(vec![-a]);
        self.contradiction = true;
    }

    /// Clause over signals; constants are folded.
    pub fn clause_sig(&mut self, sigs: &[Sig]) {
        let mut lits = Vec::with_capacity(sigs.len());
        for s in sigs {
            match *s {
                Sig::Const(true) => return,
                Sig::Const(false) => {}
                Sig::Lit(l) => lits.push(l),
            }
        }
        self.clause(&lits);
    }

    pub fn assert(&mut self, s: Sig) {
        self.clause_sig(&[s]);
    }

    /// `l <-> s`.
    pub fn equate(&mut self, l: Lit, s: Sig) {
        match s {
            Sig::Const(true) => self.clause(&[l]),
            Sig::Const(false) => self.clause(&[-l]),
            Sig::Lit(m) => {
                self.clause(&[-l, m]);
                self.clause(&[l, -m]);
            }
        }
    }

    pub fn and(&mut self, inputs: &[Sig]) -> Sig {
        let mut lits: Vec<Lit> = Vec::new();
        for s in inputs {
            match *s {
                Sig::Const(false) => return Sig::FALSE,
                Sig::Const(true) => {}
                Sig::Lit(l) => {
                    if lits.contains(&-l) {
                        return Sig::FALSE;
                    }
                    if !lits.contains(&l) {
                        lits.push(l);
                    }
                }
            }
        }
        match lits.len() {
            0 => Sig::TRUE,
            1 => Sig::Lit(lits[0]),
            _ => {
                let o = self.aux();
                for &l in &lits {
                    self.cnf.add_clause(vec![-o, l]);
                }
                let mut big: Vec<Lit> = lits.iter().map(|&l| -l).collect();
                big.push(o);
                self.cnf.add_clause(big);
                Sig::Lit(o)
            }
        }
    }

    pub fn or(&mut self, inputs: &[Sig]) -> Sig {
        let negated: Vec<Sig> = inputs.iter().map(|s| s.not()).collect();
        self.and(&negated).not()
    }

    pub fn xor2(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(x), Sig::Const(y)) => Sig::Const(x ^ y),
            (Sig::Const(x), s) | (s, Sig::Const(x)) => {
                if x {
                    s.not()
                } else {
                    s
                }
            }
            (Sig::Lit(x), Sig::Lit(y)) if x == y => Sig::FALSE,
            (Sig::Lit(x), Sig::Lit(y)) if x == -y => Sig::TRUE,
            (Sig::Lit(x), Sig::Lit(y)) => {
                let o = self.aux();
                direct_xor(&mut self.cnf, &[x, y, o], false);
                Sig::Lit(o)
            }
        }
    }

    /// `if c { hi } else { lo }`.
    pub fn mux(&mut self, c: Sig, hi: Sig, lo: Sig) -> Sig {
        match (c, hi, lo) {
            (Sig::Const(true), h, _) => h,
            (Sig::Const(false), _, l) => l,
            (_, h, l) if h == l => h,
            (c, Sig::Const(true), Sig::Const(false)) => c,
            (c, Sig::Const(false), Sig::Const(true)) => c.not(),
            (c, Sig::Const(true), l) => self.or(&[c, l]),
            (c, Sig::Const(false), l) => self.and(&[c.not(), l]),
            (c, h, Sig::Const(true)) => self.or(&[c.not(), h]),
            (c, h, Sig::Const(false)) => self.and(&[c, h]),
            (Sig::Lit(c), Sig::Lit(h), Sig::Lit(l)) => {
                let o = self.aux();
                self.cnf.add_clause(vec![-c, -h, o]);
                self.cnf.add_clause(vec![-c, h, -o]);
                self.cnf.add_clause(vec![c, -l, o]);
                self.cnf.add_clause(vec![c, l, -o]);
                Sig::Lit(o)
            }
        }
    }

    /// XOR of signals equals `parity`; constants and repeated literals cancel.
    pub fn xor_sig(&mut self, sigs: &[Sig], parity: bool) {
        let mut parity = parity;
        let mut lits: Vec<Lit> = Vec::new();
        for s in sigs {
            match *s {
                Sig::Const(b) => parity ^= b,
                Sig::Lit(l) => {
                    if let Some(pos) = lits.iter().position(|&m| m == l) {
                        lits.swap_remove(pos);
                    } else if let Some(pos) = lits.iter().position(|&m| m == -l) {
                        lits.swap_remove(pos);
                        parity ^= true;
                    } else {
                        lits.push(l);
                    }
                }
            }
        }
        xor_clauses(self, &lits, parity);
    }
}

/// Every clause forbidding an assignment of `lits` with the wrong parity:
/// `2^(k-1)` clauses over `k` literals.
fn direct_xor(cnf: &mut Cnf, lits: &[Lit], parity: bool) {
    let k = lits.len();
    for pattern in 0u32..(1 << k) {
        if (pattern.count_ones() % 2 == 1) == parity {
            continue;
        }
        let clause = lits
            .iter()
            .enumerate()
            .map(|(i, &l)| if pattern >> i & 1 == 1 { -l } else { l })
            .collect();
        cnf.add_clause(clause);
    }
}

/// `lits[0] ^ lits[1] ^ ... = parity`. Up to three literals are expanded
/// directly; longer chains fold two further inputs into each fresh auxiliary.
pub fn xor_clauses(b: &mut CnfBuilder, lits: &[Lit], parity: bool) {
    match lits.len() {
        0 => {
            if parity {
                b.contradict();
            }
        }
        1..=3 => direct_xor(&mut b.cnf, lits, parity),
        _ => {
            let mut acc = lits[0];
            let mut rest = &lits[1..];
            while rest.len() > 2 {
                let a = b.aux();
                direct_xor(&mut b.cnf, &[acc, rest[0], rest[1], a], false);
                acc = a;
                rest = &rest[2..];
            }
            let mut last = vec![acc];
            last.extend_from_slice(rest);
            direct_xor(&mut b.cnf, &last, parity);
        }
    }
}

/// Sequential counter: at most `k` of `lits` are true.
pub fn at_most_k(b: &mut CnfBuilder, lits: &[Lit], k: usize) {
    let n = lits.len();
    if k >= n {
        return;
    }
    if k == 0 {
        for &l in lits {
            b.clause(&[-l]);
        }
        return;
    }
    // s[i][j]: at least j + 1 of lits[0..=i] are true.
    let s: Vec<Vec<Lit>> = (0..n - 1).map(|_| (0..k).map(|_| b.aux()).collect()).collect();
    b.clause(&[-lits[0], s[0][0]]);
    for &sj in &s[0][1..] {
        b.clause(&[-sj]);
    }
    for i in 1..n - 1 {
        b.clause(&[-lits[i], s[i][0]]);
        b.clause(&[-s[i - 1][0], s[i][0]]);
        for j in 1..k {
            b.clause(&[-lits[i], -s[i - 1][j - 1], s[i][j]]);
            b.clause(&[-s[i - 1][j], s[i][j]]);
        }
        b.clause(&[-lits[i], -s[i - 1][k - 1]]);
    }
    b.clause(&[-lits[n - 1], -s[n - 2][k - 1]]);
}
