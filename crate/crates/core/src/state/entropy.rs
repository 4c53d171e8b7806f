//! Entropies and distances. All information quantities are in bits.

use nalgebra::{DMatrix, SymmetricEigen};

use super::density::hermitian_deviation;
use super::{DensityMatrix, C64, EIGENVALUE_CLIP, HERMITIAN_TOLERANCE, NORM_TOLERANCE};
use crate::{Error, Result};

/// Eigenvalues of a Hermitian matrix.
///
/// Matrices with an exactly zero imaginary part take the real symmetric
/// solver, which has the same spectrum and is several times faster.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian(dev));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    if is_diagonal(m) {
        return Ok((0..n).map(|i| m[(i, i)].re).collect());
    }
    if m.iter().all(|x| x.im == 0.0) {
        let real = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
        return Ok(SymmetricEigen::new(real)
            .eigenvalues
            .iter()
            .copied()
            .collect());
    }
    Ok(SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect())
}

fn is_diagonal(m: &DMatrix<C64>) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

/// `-Σ λ log2 λ`, ignoring eigenvalues below the clip threshold.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > EIGENVALUE_CLIP)
        .map(|&l| -l * l.log2())
        .sum()
}

pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    spectrum_entropy(probabilities)
}

pub fn von_neumann_entropy(dm: &DensityMatrix) -> Result<f64> {
    Ok(spectrum_entropy(&hermitian_eigenvalues(dm.matrix())?))
}

/// `S(Σ p_i ρ_i) - Σ p_i S(ρ_i)` for a classical–quantum ensemble.
pub fn holevo_information(ensemble: &[(f64, DensityMatrix)]) -> Result<f64> {
    let Some((_, first)) = ensemble.first() else {
        return Ok(0.0);
    };
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(total));
    }
    let mut average = DMatrix::<C64>::zeros(first.dim(), first.dim());
    let mut conditional = 0.0;
    for (p, rho) in ensemble {
        if rho.qubits() != first.qubits() {
            return Err(Error::MismatchedRegisters);
        }
        average += rho.matrix() * C64::new(*p, 0.0);
        if *p > 0.0 {
            conditional += p * von_neumann_entropy(rho)?;
        }
    }
    let joint = spectrum_entropy(&hermitian_eigenvalues(&average)?);
    Ok(joint - conditional)
}

/// `½ ‖ρ - σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.qubits() != sigma.qubits() {
        return Err(Error::MismatchedRegisters);
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5
        * hermitian_eigenvalues(&diff)?
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}
