use nalgebra::DMatrix;

use super::{bit_of, check_unique, scatter, QuantumRegister, QubitId, C64};
use super::{HERMITIAN_TOLERANCE, NORM_TOLERANCE};
use crate::{Error, Result};

/// A density matrix over an ordered list of named qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: Vec<QubitId>,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace.
    pub fn new(qubits: Vec<QubitId>, matrix: DMatrix<C64>) -> Result<Self> {
        check_unique(&qubits)?;
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::MismatchedRegisters);
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOLERANCE {
            return Err(Error::NonHermitian(dev));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(tr));
        }
        Ok(DensityMatrix { qubits, matrix })
    }

    /// Wraps a matrix without the Hermiticity and trace checks; used for
    /// sub-normalized blocks.
    pub(crate) fn unchecked(qubits: Vec<QubitId>, matrix: DMatrix<C64>) -> Self {
        DensityMatrix { qubits, matrix }
    }

    pub fn from_pure(reg: &QuantumRegister) -> Self {
        let amps = reg.amplitudes();
        let dim = amps.len();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj());
        DensityMatrix {
            qubits: reg.qubits().to_vec(),
            matrix,
        }
    }

    pub fn maximally_mixed(qubits: Vec<QubitId>) -> Result<Self> {
        check_unique(&qubits)?;
        let dim = 1usize << qubits.len();
        let matrix = DMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix { qubits, matrix })
    }

    /// Diagonal state `Σ p_i |i⟩⟨i|` on the given qubits.
    pub fn diagonal(qubits: Vec<QubitId>, probabilities: &[f64]) -> Result<Self> {
        let dim = 1usize << qubits.len();
        if probabilities.len() != dim {
            return Err(Error::MismatchedRegisters);
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        for (i, &p) in probabilities.iter().enumerate() {
            matrix[(i, i)] = C64::new(p, 0.0);
        }
        Self::new(qubits, matrix)
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Reduced state on `keep`, listed in this matrix's qubit order.
    pub fn partial_trace(&self, keep: &[QubitId]) -> Result<DensityMatrix> {
        for q in keep {
            if !self.qubits.contains(q) {
                return Err(Error::UnknownQubit(q.to_string()));
            }
        }
        check_unique(keep)?;
        let n = self.qubits.len();
        let (kept, traced): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| keep.contains(&self.qubits[i]));
        let kept_pos: Vec<usize> = kept.iter().map(|&i| bit_of(n, i)).collect();
        let traced_pos: Vec<usize> = traced.iter().map(|&i| bit_of(n, i)).collect();
        let dk = 1usize << kept.len();
        let dt = 1usize << traced.len();
        let kept_off: Vec<usize> = (0..dk).map(|k| scatter(k, &kept_pos)).collect();
        let traced_off: Vec<usize> = (0..dt).map(|t| scatter(t, &traced_pos)).collect();

        let matrix = DMatrix::from_fn(dk, dk, |i, j| {
            traced_off
                .iter()
                .map(|&t| self.matrix[(kept_off[i] | t, kept_off[j] | t)])
                .sum()
        });
        Ok(DensityMatrix {
            qubits: kept.iter().map(|&i| self.qubits[i].clone()).collect(),
            matrix,
        })
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mut qubits = self.qubits.clone();
        qubits.extend(other.qubits.iter().cloned());
        check_unique(&qubits)?;
        Ok(DensityMatrix {
            qubits,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Conjugation `U ρ U†` by a full-register unitary.
    pub fn conjugate(&self, unitary: &DMatrix<C64>) -> Result<DensityMatrix> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::MismatchedRegisters);
        }
        Ok(DensityMatrix {
            qubits: self.qubits.clone(),
            matrix: unitary * &self.matrix * unitary.adjoint(),
        })
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.qubits != other.qubits {
            return Err(Error::MismatchedRegisters);
        }
        Ok((&self.matrix - &other.matrix)
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}
