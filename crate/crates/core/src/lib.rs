//! Exact simulation and brute-force verification of the multi-server quantum
//! symmetric private information retrieval protocol built from Bell pairs,
//! Weyl operators and Bell-basis measurements.
//!
//! * [`pauli`]: the signed Weyl group and per-block label vectors.
//! * [`state`]: dense state vectors, density matrices and entropies.
//! * [`protocol`]: teleportation, two-sum transmission, the N-server protocol
//!   and the classical XOR baseline on a dense or a Bell-frame backend.
//! * [`secrecy`]: error probability, user and server secrecy, state
//!   independence checks.
//! * [`harness`]: report assembly, rate tables and the command-line suite.

mod error;
pub mod harness;
pub mod pauli;
pub mod protocol;
pub mod secrecy;
pub mod state;

pub use error::{Error, Result};
