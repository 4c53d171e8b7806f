//! The reduced-state trace bound `Tr ρ₁ˢ ≤ min(d₁, d₂)^{1-s}` for a pure
//! bipartite state, `0 < s < 1`, checked numerically.

use nalgebra::DMatrix;

use crate::state::{hermitian_eigenvalues, C64, NORM_TOLERANCE};
use crate::{Error, Result};

/// Both sides of the bound for one state and one `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl TraceBound {
    /// `rhs - lhs`; nonnegative when the bound holds.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// `Tr ρˢ` from the spectrum, with tiny negative eigenvalues treated as zero.
pub fn trace_power(rho: &DMatrix<C64>, s: f64) -> Result<f64> {
    Ok(hermitian_eigenvalues(rho)?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| l.powf(s))
        .sum())
}

/// Reduced state on the first factor of `psi ∈ C^{d1} ⊗ C^{d2}`, the
/// amplitude of `|i⟩|j⟩` being `psi[i * d2 + j]`.
pub fn reduced_first(psi: &[C64], d1: usize, d2: usize) -> Result<DMatrix<C64>> {
    if psi.len() != d1 * d2 {
        return Err(Error::InvalidConfig(format!(
            "{} amplitudes for a {d1}x{d2} system",
            psi.len()
        )));
    }
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let m = DMatrix::from_fn(d1, d2, |i, j| psi[i * d2 + j]);
    Ok(&m * m.adjoint())
}

pub fn reduced_state_bound(psi: &[C64], d1: usize, d2: usize, s: f64) -> Result<TraceBound> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidConfig(format!("exponent {s} outside (0, 1)")));
    }
    let rho = reduced_first(psi, d1, d2)?;
    Ok(TraceBound {
        lhs: trace_power(&rho, s)?,
        rhs: (d1.min(d2) as f64).powf(1.0 - s),
    })
}
