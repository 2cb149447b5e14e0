use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};

/// DIMACS literal: sign is polarity, magnitude is the 1-based variable index.
pub type Lit = i32;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Self {
        Self {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn fresh_var(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        debug_assert!(!clause.is_empty(), "empty clause");
        debug_assert!(clause
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(clause);
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Checks the structural invariants: literals in range, no empty clause,
    /// no clause containing both `v` and `-v`.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Usage(format!("clause {} is empty", i + 1)));
            }
            for &l in c {
                if l == 0 || l.unsigned_abs() > self.num_vars {
                    return Err(Error::Usage(format!("clause {} has literal {l} out of range", i + 1)));
                }
                if c.contains(&-l) {
                    return Err(Error::Usage(format!("clause {} contains {l} and {}", i + 1, -l)));
                }
            }
        }
        Ok(())
    }

    pub fn write_dimacs<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(self.to_dimacs().as_bytes())
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        writeln!(s, "p cnf {} {}", self.num_vars, self.clauses.len()).unwrap();
        for c in &self.clauses {
            for l in c {
                write!(s, "{l} ").unwrap();
            }
            s.push_str("0\n");
        }
        s
    }

    /// Parses DIMACS CNF. Comment lines start with `c`; clauses may span
    /// lines and end with `0`.
    pub fn parse_dimacs(text: &str) -> Result<Cnf> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<Lit> = Vec::new();
        let mut last_line = 0;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            last_line = lineno;
            if t.starts_with('p') {
                if header.is_some() {
                    return Err(Error::parse(lineno, "duplicate header"));
                }
                let parts: Vec<_> = t.split_whitespace().collect();
                if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                    return Err(Error::parse(lineno, format!("malformed header {t:?}")));
                }
                let vars = parts[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad variable count {:?}", parts[2])))?;
                let count = parts[3]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad clause count {:?}", parts[3])))?;
                header = Some((vars, count));
                continue;
            }
            let Some((vars, _)) = header else {
                return Err(Error::parse(lineno, "clause before header"));
            };
            for tok in t.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() > vars as u64 {
                    return Err(Error::parse(
                        lineno,
                        format!("literal {lit} exceeds declared variable count {vars}"),
                    ));
                } else {
                    current.push(lit as Lit);
                }
            }
        }
        let Some((num_vars, count)) = header else {
            return Err(Error::parse(last_line, "missing header"));
        };
        if !current.is_empty() {
            return Err(Error::parse(last_line, "last clause is missing its 0 terminator"));
        }
        if clauses.len() != count {
            return Err(Error::parse(
                last_line,
                format!("header declares {count} clauses, found {}", clauses.len()),
            ));
        }
        Ok(Cnf { num_vars, clauses })
    }
}

/// Total assignment, `values[v - 1]` for variable `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn var(&self, v: u32) -> bool {
        self.values[v as usize - 1]
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.var(l.unsigned_abs()) == (l > 0)
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// DIMACS-style listing `1 -2 3 ...`.
    pub fn to_lits(&self) -> Vec<Lit> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { i as Lit + 1 } else { -(i as Lit + 1) })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_writer() {
        let cnf = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, -2]],
        };
        assert_eq!(cnf.to_dimacs(), "p cnf 2 1\n1 -2 0\n");
        assert_eq!(Cnf::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
    }

    #[test]
    fn dimacs_parser_accepts_comments_and_wrapped_clauses() {
        let cnf = Cnf::parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1 0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, -2, 3], vec![-1]]);
    }

    #[test]
    fn dimacs_parser_errors() {
        let err = |t: &str| match Cnf::parse_dimacs(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(err("p cnf 2 2\n1 -2 0\n"), 2);
        assert_eq!(err("p dnf 2 1\n1 0\n"), 1);
        assert_eq!(err("p cnf 2 1\n1 3 0\n"), 2);
        assert_eq!(err("p cnf 2 1\n1 2\n"), 2);
        assert_eq!(err("1 2 0\n"), 1);
        assert_eq!(err("p cnf 2 1\n1 x 0\n"), 2);
    }

    #[test]
    fn validation() {
        let mut cnf = Cnf::new(2);
        cnf.clauses.push(vec![1, -1]);
        assert!(cnf.validate().is_err());
        let cnf = Cnf {
            num_vars: 1,
            clauses: vec![vec![]],
        };
        assert!(cnf.validate().is_err());
    }
}
