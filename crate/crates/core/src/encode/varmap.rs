use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

/// Semantic role of a CNF variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// Error bit `E_j` of the per-bit encoding.
    Error(usize),
    /// Bit `bit` (LSB = 0) of location slot `slot`.
    Location { slot: usize, bit: usize },
    /// Slot `slot` names a location not seen in the previous slot.
    FirstOccurrence(usize),
    /// Exclusion generator `g` has odd overlap with the error.
    Exclusion(usize),
    /// Coefficient of row `i` in a dependency search.
    Coefficient(usize),
    Aux(usize),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Error(j) => write!(f, "E[{j}]"),
            Role::Location { slot, bit } => write!(f, "L[{slot}][{bit}]"),
            Role::FirstOccurrence(i) => write!(f, "f[{i}]"),
            Role::Exclusion(g) => write!(f, "t[{g}]"),
            Role::Coefficient(i) => write!(f, "c[{i}]"),
            Role::Aux(k) => write!(f, "aux[{k}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    PerBit,
    Location,
    Independence,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::PerBit => "perbit",
            Encoding::Location => "location",
            Encoding::Independence => "independence",
        })
    }
}

/// Variable roles of one encoded query. Variable `v` has role `roles[v - 1]`.
#[derive(Clone, Debug)]
pub struct VarMap {
    pub encoding: Encoding,
    /// Error length (or row count for independence queries).
    pub n: usize,
    pub weight_bound: usize,
    /// Width of each location slot; zero for the per-bit encoding.
    pub slot_bits: usize,
    /// Set when the query is unsatisfiable by construction (no exclusion generators).
    pub trivially_unsat: bool,
    roles: Vec<Role>,
    index: HashMap<Role, u32>,
}

impl VarMap {
    pub(crate) fn new(
        encoding: Encoding,
        n: usize,
        weight_bound: usize,
        slot_bits: usize,
        roles: Vec<Role>,
        trivially_unsat: bool,
    ) -> Self {
        let index = roles
            .iter()
            .enumerate()
            .filter(|(_, r)| !matches!(r, Role::Aux(_)))
            .map(|(i, &r)| (r, i as u32 + 1))
            .collect();
        Self {
            encoding,
            n,
            weight_bound,
            slot_bits,
            trivially_unsat,
            roles,
            index,
        }
    }

    pub fn var(&self, role: Role) -> Option<u32> {
        self.index.get(&role).copied()
    }

    pub fn role(&self, var: u32) -> Role {
        self.roles[var as usize - 1]
    }

    pub fn num_vars(&self) -> usize {
        self.roles.len()
    }

    /// Variables the rest of the formula is a function of: error bits or
    /// location bits or coefficients.
    pub fn independent_var_count(&self) -> usize {
        self.roles
            .iter()
            .filter(|r| matches!(r, Role::Error(_) | Role::Location { .. } | Role::Coefficient(_)))
            .count()
    }

    /// Sidecar JSON object `{"E[0]": 1, ...}` covering every variable.
    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .roles
            .iter()
            .enumerate()
            .map(|(i, r)| (r.to_string(), serde_json::Value::from(i + 1)))
            .collect();
        serde_json::to_string_pretty(&map).expect("map serializes")
    }
}
