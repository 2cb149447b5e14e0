//! Minimum-distance certification for CSS and bivariate bicycle quantum codes.
//!
//! The distance question is reduced to SAT, solved by an untrusted backend,
//! and every answer is re-checked: SAT witnesses directly against the code,
//! UNSAT verdicts through an LRAT proof checker.

pub mod cert;
pub mod code;
pub mod encode;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod pauli;
pub mod pipeline;
pub mod solver;

pub use error::{Error, Result};
