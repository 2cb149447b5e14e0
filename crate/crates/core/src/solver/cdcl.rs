//! Conflict-driven clause learning with optional LRAT proof output.
//!
//! Two watched literals with blockers, VSIDS on a binary heap, phase saving,
//! Luby restarts and LBD-based clause deletion. When proof output is on,
//! every learned clause is written with the antecedent chain a linear checker
//! needs: level-0 units first, then reasons in trail order, then the conflict.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encode::{Cnf, Lit};

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct L(u32);

impl L {
    fn from_dimacs(l: Lit) -> L {
        let v = l.unsigned_abs() - 1;
        L(2 * v + (l < 0) as u32)
    }
    fn to_dimacs(self) -> Lit {
        let v = (self.0 >> 1) as Lit + 1;
        if self.0 & 1 == 1 {
            -v
        } else {
            v
        }
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn neg(self) -> L {
        L(self.0 ^ 1)
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
}

struct Clause {
    lits: Vec<L>,
    id: u64,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: L,
}

#[derive(Debug)]
pub(crate) enum Answer {
    Sat(Vec<bool>),
    Unsat(Option<String>),
    Timeout,
}

pub(crate) struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail_pos: Vec<u32>,
    unit_id: Vec<u64>,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,

    activity: Vec<f64>,
    var_inc: f64,
    heap: Heap,
    polarity: Vec<bool>,
    seen: Vec<bool>,

    cla_inc: f64,
    num_learnts: usize,
    max_learnts: usize,

    proof: Option<String>,
    next_id: u64,
    deadline: Option<Instant>,
    /// Set when the input itself holds an empty clause.
    empty_input: Option<u64>,
}

impl Solver {
    pub(crate) fn new(cnf: &Cnf, proof: bool, seed: u64, deadline: Option<Instant>) -> Self {
        let n = cnf.num_vars as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let activity: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 1e-5).collect();
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail_pos: vec![0; n],
            unit_id: vec![0; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            heap: Heap::new(n),
            activity,
            var_inc: 1.0,
            polarity: vec![false; n],
            seen: vec![false; n],
            cla_inc: 1.0,
            num_learnts: 0,
            max_learnts: 2000,
            proof: proof.then(String::new),
            next_id: cnf.clauses.len() as u64 + 1,
            deadline,
            empty_input: None,
        };
        for v in 0..n {
            s.heap.insert(v, &s.activity);
        }
        s
    }

    fn lit_value(&self, l: L) -> u8 {
        let v = self.value[l.var()];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ (l.0 & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: L, reason: u32) {
        let v = l.var();
        self.value[v] = (l.0 & 1 == 0) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len() as u32;
        self.trail.push(l);
        if self.decision_level() == 0 && reason != NO_REASON && self.proof.is_some() {
            self.emit_level0_unit(l, reason);
        }
    }

    /// Unit line for a literal implied at level 0 by `reason`.
    fn emit_level0_unit(&mut self, l: L, reason: u32) {
        let mut hints: Vec<u64> = self.clauses[reason as usize]
            .lits
            .iter()
            .filter(|&&q| q != l)
            .map(|q| self.unit_id[q.var()])
            .collect();
        hints.push(self.clauses[reason as usize].id);
        let id = self.add_proof_line(&[l], &hints);
        self.unit_id[l.var()] = id;
    }

    fn add_proof_line(&mut self, lits: &[L], hints: &[u64]) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        if let Some(p) = self.proof.as_mut() {
            write!(p, "{id}").unwrap();
            for l in lits {
                write!(p, " {}", l.to_dimacs()).unwrap();
            }
            p.push_str(" 0");
            for h in hints {
                write!(p, " {h}").unwrap();
            }
            p.push_str(" 0\n");
        }
        id
    }

    /// Loads the input clauses; returns false if they are already contradictory.
    fn load(&mut self, cnf: &Cnf) -> bool {
        for (i, raw) in cnf.clauses.iter().enumerate() {
            let id = i as u64 + 1;
            let mut lits: Vec<L> = Vec::with_capacity(raw.len());
            let mut tautology = false;
            for &x in raw {
                let l = L::from_dimacs(x);
                if lits.contains(&l.neg()) {
                    tautology = true;
                    break;
                }
                if !lits.contains(&l) {
                    lits.push(l);
                }
            }
            if tautology {
                continue;
            }
            match lits.len() {
                0 => {
                    self.empty_input = Some(id);
                    return false;
                }
                1 => {
                    let l = lits[0];
                    match self.lit_value(l) {
                        1 => {}
                        0 => {
                            let hints = [self.unit_id[l.var()], id];
                            self.finish_refutation(&hints);
                            return false;
                        }
                        _ => {
                            self.enqueue(l, NO_REASON);
                            self.unit_id[l.var()] = id;
                        }
                    }
                }
                _ => {
                    self.attach(Clause {
                        lits,
                        id,
                        learnt: false,
                        deleted: false,
                        lbd: 0,
                        activity: 0.0,
                    });
                }
            }
        }
        true
    }

    fn attach(&mut self, c: Clause) -> u32 {
        let cref = self.clauses.len() as u32;
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[a.idx()].push(Watch { cref, blocker: b });
        self.watches[b.idx()].push(Watch { cref, blocker: a });
        if c.learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(c);
        cref
    }

    /// Propagates the trail; returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p.neg();
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.lit_value(first) == 1 {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                // look for a new watch
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let q = self.clauses[cref].lits[k];
                    if self.lit_value(q) != 0 {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[q.idx()].push(Watch { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch { cref: w.cref, blocker: first };
                j += 1;
                if self.lit_value(first) == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            let slot = &mut self.watches[false_lit.idx()];
            ws.append(slot);
            *slot = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.update(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. Returns the learned clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, confl: u32) -> (Vec<L>, u32) {
        let mut learnt = vec![L(0)];
        let mut path = 0;
        let mut p: Option<L> = None;
        let mut idx = self.trail.len();
        let mut cref = confl as usize;
        let current = self.decision_level();
        loop {
            self.bump_clause(cref);
            let start = usize::from(p.is_some());
            for k in start..self.clauses[cref].lits.len() {
                let q = self.clauses[cref].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                learnt[0] = lit.neg();
                break;
            }
            cref = self.reason[lit.var()] as usize;
        }

        // local minimization: drop literals implied by the rest of the clause
        let kept: Vec<L> = learnt
            .iter()
            .enumerate()
            .filter(|&(i, &q)| {
                if i == 0 {
                    return true;
                }
                let r = self.reason[q.var()];
                if r == NO_REASON {
                    return true;
                }
                self.clauses[r as usize].lits.iter().skip(1).any(|x| {
                    let v = x.var();
                    !self.seen[v] && self.level[v] > 0
                })
            })
            .map(|(_, &q)| q)
            .collect();
        for q in &learnt {
            self.seen[q.var()] = false;
        }
        let mut learnt = kept;

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var()];
        }
        (learnt, bt)
    }

    /// Antecedent chain for `learnt` from the conflict clause `confl`.
    fn lrat_hints(&mut self, learnt: &[L], confl: u32) -> Vec<u64> {
        let mut in_clause = vec![];
        for l in learnt {
            in_clause.push(l.var());
            self.seen[l.var()] = true;
        }
        let mut units: Vec<u64> = Vec::new();
        let mut reasons: Vec<usize> = Vec::new();
        let mut marked: Vec<usize> = Vec::new();
        let mut stack = vec![confl as usize];
        while let Some(cref) = stack.pop() {
            for k in 0..self.clauses[cref].lits.len() {
                let v = self.clauses[cref].lits[k].var();
                if self.seen[v] {
                    continue;
                }
                self.seen[v] = true;
                marked.push(v);
                if self.level[v] == 0 {
                    units.push(self.unit_id[v]);
                } else {
                    reasons.push(v);
                    stack.push(self.reason[v] as usize);
                }
            }
        }
        for v in in_clause.into_iter().chain(marked) {
            self.seen[v] = false;
        }
        reasons.sort_by_key(|&v| self.trail_pos[v]);
        let mut hints = units;
        hints.extend(reasons.iter().map(|&v| self.clauses[self.reason[v] as usize].id));
        hints.push(self.clauses[confl as usize].id);
        hints
    }

    fn finish_refutation(&mut self, hints: &[u64]) {
        self.add_proof_line(&[], hints);
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.value[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.0 & 1 == 0;
            if !self.heap.contains(v) {
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<L> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                return Some(L(2 * v as u32 + (!self.polarity[v]) as u32));
            }
        }
        None
    }

    fn lbd(&mut self, lits: &[L]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lbd > 2 && !self.locked(i)
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a], &self.clauses[b]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap())
        });
        cands.truncate(cands.len() / 2);
        if cands.is_empty() {
            return;
        }
        let mut ids = Vec::with_capacity(cands.len());
        for &i in &cands {
            let c = &mut self.clauses[i];
            c.deleted = true;
            c.lits = Vec::new();
            ids.push(c.id);
        }
        self.num_learnts -= cands.len();
        if let Some(p) = self.proof.as_mut() {
            write!(p, "{} d", self.next_id - 1).unwrap();
            for id in ids {
                write!(p, " {id}").unwrap();
            }
            p.push_str(" 0\n");
        }
    }

    fn locked(&self, cref: usize) -> bool {
        let c = &self.clauses[cref];
        let v = c.lits[0].var();
        self.reason[v] == cref as u32 && self.lit_value(c.lits[0]) == 1
    }

    pub(crate) fn solve(mut self, cnf: &Cnf) -> Answer {
        if !self.load(cnf) {
            return self.unsat();
        }
        let mut conflicts: u64 = 0;
        let mut restart_index = 0u32;
        let mut budget = 100 * luby(restart_index);
        loop {
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                if self.decision_level() == 0 {
                    if self.proof.is_some() {
                        let hints = self.lrat_hints(&[], confl);
                        self.finish_refutation(&hints);
                    }
                    return self.unsat();
                }
                let (learnt, bt) = self.analyze(confl);
                let id = if self.proof.is_some() {
                    let hints = self.lrat_hints(&learnt, confl);
                    self.add_proof_line(&learnt, &hints)
                } else {
                    self.next_id += 1;
                    self.next_id - 1
                };
                let lbd = self.lbd(&learnt);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                    self.unit_id[learnt[0].var()] = id;
                } else {
                    let first = learnt[0];
                    let cref = self.attach(Clause {
                        lits: learnt,
                        id,
                        learnt: true,
                        deleted: false,
                        lbd,
                        activity: 0.0,
                    });
                    self.bump_clause(cref as usize);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                budget = budget.saturating_sub(1);

                if conflicts.is_multiple_of(256) {
                    if let Some(d) = self.deadline {
                        if Instant::now() >= d {
                            return Answer::Timeout;
                        }
                    }
                }
            } else {
                if budget == 0 {
                    restart_index += 1;
                    budget = 100 * luby(restart_index);
                    self.backtrack(0);
                }
                if self.num_learnts >= self.max_learnts + self.trail.len() {
                    self.reduce_db();
                    self.max_learnts += 500;
                }
                match self.pick_branch() {
                    None => {
                        let model = self.value.iter().map(|&v| v == 1).collect();
                        return Answer::Sat(model);
                    }
                    Some(l) => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }

    fn unsat(mut self) -> Answer {
        if let (Some(id), Some(_)) = (self.empty_input, self.proof.as_ref()) {
            self.finish_refutation(&[id]);
        }
        Answer::Unsat(self.proof)
    }
}

/// Luby sequence 1 1 2 1 1 2 4 ...
fn luby(x: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = x as u64;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Max-heap of variables keyed by activity.
struct Heap {
    data: Vec<usize>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl Heap {
    fn new(n: usize) -> Self {
        Heap {
            data: Vec::with_capacity(n),
            pos: vec![ABSENT; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != ABSENT
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        self.pos[v] = self.data.len();
        self.data.push(v);
        self.sift_up(self.pos[v], act);
    }

    fn update(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.data.first()?;
        let last = self.data.pop().unwrap();
        self.pos[top] = ABSENT;
        if !self.data.is_empty() {
            self.data[0] = last;
            self.pos[last] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.data[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pv = self.data[parent];
            if act[pv] >= act[v] {
                break;
            }
            self.data[i] = pv;
            self.pos[pv] = i;
            i = parent;
        }
        self.data[i] = v;
        self.pos[v] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.data[i];
        let n = self.data.len();
        loop {
            let mut child = 2 * i + 1;
            if child >= n {
                break;
            }
            if child + 1 < n && act[self.data[child + 1]] > act[self.data[child]] {
                child += 1;
            }
            let cv = self.data[child];
            if act[cv] <= act[v] {
                break;
            }
            self.data[i] = cv;
            self.pos[cv] = i;
            i = child;
        }
        self.data[i] = v;
        self.pos[v] = i;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(cnf: &Cnf, proof: bool) -> Answer {
        Solver::new(cnf, proof, 0, None).solve(cnf)
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_instances() {
        let cnf = Cnf { num_vars: 1, clauses: vec![vec![1], vec![-1]] };
        match run(&cnf, true) {
            Answer::Unsat(Some(p)) => assert_eq!(p, "3 0 1 2 0\n"),
            other => panic!("{other:?}"),
        }
        let cnf = Cnf { num_vars: 1, clauses: vec![vec![1]] };
        assert!(matches!(run(&cnf, false), Answer::Sat(m) if m == vec![true]));
        let cnf = Cnf { num_vars: 0, clauses: vec![] };
        assert!(matches!(run(&cnf, false), Answer::Sat(m) if m.is_empty()));
        let cnf = Cnf { num_vars: 2, clauses: vec![vec![1, 2], vec![]] };
        match run(&cnf, true) {
            Answer::Unsat(Some(p)) => assert_eq!(p, "3 0 2 0\n"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 4 pigeons, 3 holes
        let var = |p: i32, h: i32| p * 3 + h + 1;
        let mut clauses = vec![];
        for p in 0..4 {
            clauses.push((0..3).map(|h| var(p, h)).collect());
        }
        for h in 0..3 {
            for p in 0..4 {
                for q in p + 1..4 {
                    clauses.push(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        let cnf = Cnf { num_vars: 12, clauses };
        let s = Solver::new(&cnf, true, 3, None);
        assert!(matches!(s.solve(&cnf), Answer::Unsat(Some(_))));
    }
}
