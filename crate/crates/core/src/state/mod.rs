//! Dense state-vector and density-matrix backend for small qubit registers.
//!
//! Basis ordering is fixed throughout: the qubit at register position 0 is the
//! most significant bit of a basis index. A register over `(A, B)` therefore
//! stores amplitudes in the order `|00⟩, |01⟩, |10⟩, |11⟩` with `A` on the left.

mod cq;
mod density;
mod entropy;
pub mod random;
mod register;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cq::{cq_holevo_information, CqState};
pub use density::DensityMatrix;
pub use entropy::{
    hermitian_eigenvalues, holevo_information, shannon_entropy, spectrum_entropy, trace_distance,
    von_neumann_entropy,
};
pub use register::{BellBranch, QuantumRegister};

/// Complex amplitude type used by the dense backend.
pub type C64 = nalgebra::Complex<f64>;

/// Largest register the dense backend will allocate.
pub const MAX_QUBITS: usize = 24;

/// Tolerance on state norms and density-matrix traces.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Eigenvalues below this are treated as zero before taking logarithms.
pub const EIGENVALUE_CLIP: f64 = 1e-10;

/// Allowed deviation from Hermiticity before an input is rejected.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

/// Branch probabilities at or below this are reported as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-20;

/// A named qubit. Its index is its position in whichever register holds it;
/// see [`QuantumRegister::index_of`]. Cloning shares the name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(Arc<str>);

impl QubitId {
    pub fn new(name: impl Into<String>) -> Self {
        QubitId(Arc::from(name.into()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for QubitId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for QubitId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d).map(QubitId::new)
    }
}

impl From<&str> for QubitId {
    fn from(s: &str) -> Self {
        QubitId::new(s)
    }
}

pub(crate) fn check_unique(qubits: &[QubitId]) -> crate::Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(crate::Error::DuplicateQubit(q.to_string()));
        }
    }
    Ok(())
}

pub(crate) fn check_capacity(n: usize) -> crate::Result<()> {
    if n > MAX_QUBITS {
        return Err(crate::Error::Capacity {
            what: "dense register qubits",
            requested: n as u128,
            limit: MAX_QUBITS as u128,
        });
    }
    Ok(())
}

/// Bit position (from the least significant end) of register slot `index`.
#[inline]
pub(crate) fn bit_of(n: usize, index: usize) -> usize {
    n - 1 - index
}

/// Spreads the bits of `value` over `positions` (listed most significant first).
#[inline]
pub(crate) fn scatter(value: usize, positions: &[usize]) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(0, |acc, (j, &pos)| {
        acc | (((value >> (k - 1 - j)) & 1) << pos)
    })
}
