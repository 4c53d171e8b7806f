//! Haar-random unitaries and pure states for property tests.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{QuantumRegister, QubitId, C64};
use crate::Result;

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// A `dim × dim` unitary from the Haar measure: QR of a complex Gaussian
/// matrix, with the phases of R's diagonal moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = ginibre(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A uniformly random pure state on the given qubits.
pub fn haar_state<R: Rng + ?Sized>(qubits: Vec<QubitId>, rng: &mut R) -> Result<QuantumRegister> {
    let dim = 1usize << qubits.len();
    let v = ginibre(dim, 1, rng);
    let norm = v.norm();
    QuantumRegister::new(qubits, v.iter().map(|x| x / norm).collect())
}

/// Random unit vector of arbitrary dimension (not necessarily a power of two).
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v = ginibre(dim, 1, rng);
    let norm = v.norm();
    v.iter().map(|x| x / norm).collect()
}
