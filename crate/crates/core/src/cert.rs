//! Text LRAT proofs: parsing, rendering and hint-guided checking.
//!
//! The checker is deliberately strict. Every hint must be unit (its one
//! non-false literal may already be true) or falsified when visited, the
//! conflict must land on the final hint of its group, and
//! by default clause ids must continue contiguously from the input count.
//! Any proof a real solver emits satisfies these rules; most corruptions of
//! one token violate at least one of them.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::io::BufRead;

use serde::Serialize;

use crate::encode::{Cnf, Lit};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LratLine {
    /// Clause addition. Negative hints open RAT groups.
    Add { id: u64, clause: Vec<Lit>, hints: Vec<i64> },
    /// Clause deletion; `id` is informational only.
    Delete { id: u64, ids: Vec<u64> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LratProof {
    pub lines: Vec<LratLine>,
}

impl LratProof {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for line in &self.lines {
            match line {
                LratLine::Add { id, clause, hints } => {
                    write!(s, "{id}").unwrap();
                    for l in clause {
                        write!(s, " {l}").unwrap();
                    }
                    s.push_str(" 0");
                    for h in hints {
                        write!(s, " {h}").unwrap();
                    }
                    s.push_str(" 0\n");
                }
                LratLine::Delete { id, ids } => {
                    write!(s, "{id} d").unwrap();
                    for i in ids {
                        write!(s, " {i}").unwrap();
                    }
                    s.push_str(" 0\n");
                }
            }
        }
        s
    }

    pub fn num_additions(&self) -> usize {
        self.lines
            .iter()
            .filter(|l| matches!(l, LratLine::Add { .. }))
            .count()
    }
}

/// Parses text LRAT for a formula with `num_inputs` clauses (ids `1..=num_inputs`).
pub fn parse_lrat(text: &str, num_inputs: usize) -> Result<LratProof> {
    let mut lines = Vec::new();
    let mut last_id = num_inputs as u64;
    for (idx, raw) in text.lines().enumerate() {
        if let Some(line) = parse_line(raw, idx + 1, &mut last_id)? {
            lines.push(line);
        }
    }
    Ok(LratProof { lines })
}

/// One proof line; `None` for blanks and comments. `last_id` is the largest
/// clause id seen so far and is advanced past additions.
fn parse_line(raw: &str, lineno: usize, last_id: &mut u64) -> Result<Option<LratLine>> {
    let exists = |id: u64, last: u64| id >= 1 && id <= last;
    let t = raw.trim();
    if t.is_empty() || t.starts_with('c') {
        return Ok(None);
    }
    let toks: Vec<&str> = t.split_whitespace().collect();
    let id: u64 = toks[0]
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad clause id {:?}", toks[0])))?;
    if toks.get(1) == Some(&"d") {
        let mut ids = Vec::new();
        let rest = &toks[2..];
        let (last, body) = rest
            .split_last()
            .ok_or_else(|| Error::parse(lineno, "deletion line is missing its 0 terminator"))?;
        if *last != "0" {
            return Err(Error::parse(lineno, "deletion line is missing its 0 terminator"));
        }
        for tok in body {
            let d: u64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad clause id {tok:?}")))?;
            if !exists(d, *last_id) {
                return Err(Error::parse(lineno, format!("deletion of unknown clause {d}")));
            }
            ids.push(d);
        }
        return Ok(Some(LratLine::Delete { id, ids }));
    }
    if id <= *last_id {
        return Err(Error::parse(
            lineno,
            format!("clause id {id} does not exceed previous id {last_id}"),
        ));
    }
    let mut nums = Vec::with_capacity(toks.len() - 1);
    for tok in &toks[1..] {
        let v: i64 = tok
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad integer {tok:?}")))?;
        nums.push(v);
    }
    let z1 = nums
        .iter()
        .position(|&v| v == 0)
        .ok_or_else(|| Error::parse(lineno, "clause is missing its 0 terminator"))?;
    let clause_part = &nums[..z1];
    let hint_part = &nums[z1 + 1..];
    let (&last, hints) = hint_part
        .split_last()
        .ok_or_else(|| Error::parse(lineno, "hints are missing their 0 terminator"))?;
    if last != 0 || hints.contains(&0) {
        return Err(Error::parse(lineno, "hints are missing their 0 terminator"));
    }
    let mut clause = Vec::with_capacity(clause_part.len());
    for &l in clause_part {
        let l = Lit::try_from(l).map_err(|_| Error::parse(lineno, format!("literal {l} too large")))?;
        clause.push(l);
    }
    for &h in hints {
        if !exists(h.unsigned_abs(), *last_id) {
            return Err(Error::parse(lineno, format!("hint {h} refers to no earlier clause")));
        }
    }
    *last_id = id;
    Ok(Some(LratLine::Add {
        id,
        clause,
        hints: hints.to_vec(),
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Accept addition ids that skip values.
    pub allow_id_gaps: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// 1-based index among proof lines.
    pub line: usize,
    pub id: u64,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.reason)
        } else {
            write!(f, "proof line {} (clause {}): {}", self.line, self.id, self.reason)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub accepted: bool,
    pub rejection: Option<Rejection>,
    pub input_clauses: usize,
    pub added_clauses: usize,
    pub deleted_clauses: usize,
}

impl CheckReport {
    pub fn is_accepted(&self) -> bool {
        self.accepted
    }
}

pub fn check_lrat(cnf: &Cnf, proof: &LratProof) -> CheckReport {
    check_lrat_with(cnf, proof, CheckOptions::default())
}

pub fn check_lrat_with(cnf: &Cnf, proof: &LratProof, opts: CheckOptions) -> CheckReport {
    let mut session = Session::new(cnf, opts);
    for line in &proof.lines {
        if !session.step(line) {
            break;
        }
    }
    session.finish()
}

/// Checks a proof as it is read, holding only the live clauses in memory.
/// Suitable for proofs far larger than RAM. Parse errors are returned as `Err`.
pub fn check_lrat_reader<R: BufRead>(cnf: &Cnf, reader: R, opts: CheckOptions) -> Result<CheckReport> {
    let mut session = Session::new(cnf, opts);
    let mut last_id = cnf.clauses.len() as u64;
    for (idx, raw) in reader.lines().enumerate() {
        if let Some(line) = parse_line(&raw?, idx + 1, &mut last_id)? {
            if !session.step(&line) {
                break;
            }
        }
    }
    Ok(session.finish())
}

/// Incremental checking state shared by the in-memory and streaming entry points.
struct Session {
    checker: Checker,
    opts: CheckOptions,
    inputs: usize,
    lines: usize,
    added: usize,
    deleted: usize,
    empty: bool,
    expected: u64,
    rejection: Option<Rejection>,
}

impl Session {
    fn new(cnf: &Cnf, opts: CheckOptions) -> Self {
        Self {
            checker: Checker::new(cnf),
            opts,
            inputs: cnf.clauses.len(),
            lines: 0,
            added: 0,
            deleted: 0,
            empty: false,
            expected: cnf.clauses.len() as u64 + 1,
            rejection: None,
        }
    }

    /// False once the proof has been rejected.
    fn step(&mut self, line: &LratLine) -> bool {
        self.lines += 1;
        let result = match line {
            LratLine::Add { id, clause, hints } => self.add(*id, clause, hints).map_err(|r| (*id, r)),
            LratLine::Delete { id, ids } => self.delete(ids).map_err(|r| (*id, r)),
        };
        if let Err((id, reason)) = result {
            self.rejection = Some(Rejection {
                line: self.lines,
                id,
                reason,
            });
            return false;
        }
        true
    }

    fn add(&mut self, id: u64, clause: &[Lit], hints: &[i64]) -> std::result::Result<(), String> {
        if !self.opts.allow_id_gaps && id != self.expected {
            return Err(format!("expected clause id {}", self.expected));
        }
        self.checker.check_add(clause, hints)?;
        if self.checker.db.insert(id, clause.to_vec()).is_some() {
            return Err("clause id reused".into());
        }
        self.expected = id + 1;
        self.added += 1;
        self.empty |= clause.is_empty();
        Ok(())
    }

    fn delete(&mut self, ids: &[u64]) -> std::result::Result<(), String> {
        for d in ids {
            if self.checker.db.remove(d).is_none() {
                return Err(format!("clause {d} is not active"));
            }
            self.deleted += 1;
        }
        Ok(())
    }

    fn finish(mut self) -> CheckReport {
        if self.rejection.is_none() && !self.empty {
            self.rejection = Some(Rejection {
                line: 0,
                id: 0,
                reason: "incomplete: the empty clause is never derived".into(),
            });
        }
        CheckReport {
            accepted: self.rejection.is_none(),
            rejection: self.rejection,
            input_clauses: self.inputs,
            added_clauses: self.added,
            deleted_clauses: self.deleted,
        }
    }
}

/// 0 unassigned, 1 true, 2 false.
fn value_of(value: &[u8], l: Lit) -> u8 {
    match value.get(l.unsigned_abs() as usize).copied().unwrap_or(0) {
        0 => 0,
        x if (x == 1) == (l > 0) => 1,
        _ => 2,
    }
}

struct Checker {
    db: HashMap<u64, Vec<Lit>>,
    /// 0 unassigned, 1 true, 2 false; indexed by variable.
    value: Vec<u8>,
    touched: Vec<usize>,
}

impl Checker {
    fn new(cnf: &Cnf) -> Self {
        let db = cnf
            .clauses
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u64 + 1, c.clone()))
            .collect();
        Self {
            db,
            value: vec![0; cnf.num_vars as usize + 1],
            touched: Vec::new(),
        }
    }

    fn lit_value(&self, l: Lit) -> u8 {
        value_of(&self.value, l)
    }

    /// Makes `l` true; false if it was already false.
    fn assign(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => true,
            2 => false,
            _ => {
                let v = l.unsigned_abs() as usize;
                if v >= self.value.len() {
                    self.value.resize(v + 1, 0);
                }
                self.value[v] = if l > 0 { 1 } else { 2 };
                self.touched.push(v);
                true
            }
        }
    }

    fn reset_to(&mut self, mark: usize) {
        for v in self.touched.drain(mark..) {
            self.value[v] = 0;
        }
    }

    fn check_add(&mut self, clause: &[Lit], hints: &[i64]) -> std::result::Result<(), String> {
        for (i, &l) in clause.iter().enumerate() {
            if clause[..i].contains(&l) {
                return Err(format!("literal {l} repeated"));
            }
            if clause[..i].contains(&-l) {
                return Err("tautological clause".into());
            }
        }
        let result = self.check_add_inner(clause, hints);
        self.reset_to(0);
        result
    }

    fn check_add_inner(&mut self, clause: &[Lit], hints: &[i64]) -> std::result::Result<(), String> {
        for &l in clause {
            self.assign(-l);
        }
        let split = hints.iter().position(|&h| h < 0).unwrap_or(hints.len());
        let (rup, rat) = hints.split_at(split);
        if self.propagate_hints(rup)? {
            return if rat.is_empty() {
                Ok(())
            } else {
                Err("RAT groups follow a completed RUP derivation".into())
            };
        }
        if rat.is_empty() {
            return Err("hints end without a conflict".into());
        }
        self.check_rat(clause, rat)
    }

    /// Walks hints in order. Returns true on a conflict at the last hint and
    /// false if the hints run out first.
    fn propagate_hints(&mut self, hints: &[i64]) -> std::result::Result<bool, String> {
        for (k, &h) in hints.iter().enumerate() {
            let id = h as u64;
            let lits = self
                .db
                .get(&id)
                .ok_or_else(|| format!("hint {id} is not an active clause"))?;
            // after dropping false literals at most one may remain; a true
            // survivor makes the hint a no-op, as CaDiCaL emits for
            // literals fixed at the root
            let mut open = None;
            for &l in lits {
                if value_of(&self.value, l) != 2 {
                    if open.is_some_and(|u| u != l) {
                        return Err(format!("hint {id} is not unit"));
                    }
                    open = Some(l);
                }
            }
            match open {
                Some(l) => {
                    self.assign(l);
                }
                None => {
                    return if k + 1 == hints.len() {
                        Ok(true)
                    } else {
                        Err(format!("conflict at hint {id} before the last hint"))
                    };
                }
            }
        }
        Ok(false)
    }

    fn check_rat(&mut self, clause: &[Lit], groups: &[i64]) -> std::result::Result<(), String> {
        let Some(&pivot) = clause.first() else {
            return Err("RAT step on the empty clause".into());
        };
        let mut by_id: Vec<(u64, &[i64])> = Vec::new();
        let mut i = 0;
        while i < groups.len() {
            let id = groups[i].unsigned_abs();
            let end = groups[i + 1..]
                .iter()
                .position(|&h| h < 0)
                .map_or(groups.len(), |p| i + 1 + p);
            if by_id.iter().any(|(j, _)| *j == id) {
                return Err(format!("duplicate RAT group for clause {id}"));
            }
            by_id.push((id, &groups[i + 1..end]));
            i = end;
        }
        let mut candidates: Vec<u64> = self
            .db
            .iter()
            .filter(|(_, c)| c.contains(&-pivot))
            .map(|(&id, _)| id)
            .collect();
        candidates.sort_unstable();
        for (id, _) in &by_id {
            if !candidates.contains(id) {
                return Err(format!("RAT group for clause {id}, which does not contain {}", -pivot));
            }
        }
        let mark = self.touched.len();
        for id in candidates {
            let Some(&(_, hints)) = by_id.iter().find(|(j, _)| *j == id) else {
                return Err(format!("no RAT group for clause {id}"));
            };
            let other = self.db[&id].clone();
            let mut blocked = false;
            for &l in other.iter().filter(|&&l| l != -pivot) {
                if !self.assign(-l) {
                    blocked = true;
                }
            }
            if blocked {
                if !hints.is_empty() {
                    return Err(format!("RAT group for clause {id} has hints but the resolvent is a tautology"));
                }
            } else if !self.propagate_hints(hints)? {
                return Err(format!("RAT group for clause {id} ends without a conflict"));
            }
            self.reset_to(mark);
        }
        Ok(())
    }
}

/// Parses the proof text for `cnf` and checks it.
pub fn check_lrat_text(cnf: &Cnf, text: &str) -> Result<CheckReport> {
    let proof = parse_lrat(text, cnf.clauses.len())?;
    Ok(check_lrat(cnf, &proof))
}
