//! Hybrid classical–quantum states.
//!
//! A message the user receives as classical bits is equivalent to a quantum
//! register prepared in an orthogonal basis state. Embedding it that way turns
//! the whole view into one block-diagonal density matrix
//! `Σ_c |c⟩⟨c| ⊗ ρ_c`; [`CqState`] stores just the blocks. Spectra, entropies
//! and trace distances of the embedded matrix are the unions and sums of the
//! per-block ones, and [`CqState::embed`] materializes the full matrix when a
//! direct check is wanted.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::entropy::{hermitian_eigenvalues, spectrum_entropy};
use super::{check_unique, DensityMatrix, QuantumRegister, QubitId, C64, NORM_TOLERANCE};
use crate::{Error, Result};

/// Every classical register holds one 2-bit value.
pub const CLASSICAL_REGISTER_VALUES: u8 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CqState {
    registers: Vec<String>,
    qubits: Vec<QubitId>,
    /// Sub-normalized blocks keyed by the classical register values.
    blocks: BTreeMap<Vec<u8>, DMatrix<C64>>,
}

impl CqState {
    /// The zero operator over the given registers; fill it with [`Self::add_pure`].
    pub fn new(registers: Vec<String>, qubits: Vec<QubitId>) -> Result<Self> {
        check_unique(&qubits)?;
        let names: Vec<QubitId> = registers.iter().map(|r| QubitId::new(r.clone())).collect();
        check_unique(&names)?;
        Ok(CqState {
            registers,
            qubits,
            blocks: BTreeMap::new(),
        })
    }

    pub fn registers(&self) -> &[String] {
        &self.registers
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&[u8], &DMatrix<C64>)> {
        self.blocks.iter().map(|(k, v)| (k.as_slice(), v))
    }

    fn quantum_dim(&self) -> usize {
        1 << self.qubits.len()
    }

    /// Adds `weight · |key⟩⟨key| ⊗ |ψ⟩⟨ψ|`. The register must list exactly
    /// this state's qubits, in order.
    pub fn add_pure(&mut self, key: &[u8], weight: f64, state: &QuantumRegister) -> Result<()> {
        if key.len() != self.registers.len() || key.iter().any(|&v| v >= CLASSICAL_REGISTER_VALUES)
        {
            return Err(Error::MismatchedRegisters);
        }
        if state.qubits() != self.qubits.as_slice() {
            return Err(Error::MismatchedRegisters);
        }
        let d = self.quantum_dim();
        let amps = state.amplitudes();
        let block = self
            .blocks
            .entry(key.to_vec())
            .or_insert_with(|| DMatrix::zeros(d, d));
        for j in 0..d {
            let cj = amps[j].conj() * weight;
            if cj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..d {
                block[(i, j)] += amps[i] * cj;
            }
        }
        Ok(())
    }

    /// `self += weight · other`.
    pub fn add_scaled(&mut self, other: &CqState, weight: f64) -> Result<()> {
        if other.registers != self.registers || other.qubits != self.qubits {
            return Err(Error::MismatchedRegisters);
        }
        let d = self.quantum_dim();
        for (key, m) in &other.blocks {
            let block = self
                .blocks
                .entry(key.clone())
                .or_insert_with(|| DMatrix::zeros(d, d));
            *block += m * C64::new(weight, 0.0);
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.blocks.values().map(|m| m.trace().re).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(tr));
        }
        Ok(())
    }

    /// Spectrum of the embedded block-diagonal matrix.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for m in self.blocks.values() {
            out.extend(hermitian_eigenvalues(m)?);
        }
        Ok(out)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        Ok(spectrum_entropy(&self.eigenvalues()?))
    }

    /// `self ⊗ other`; registers and qubits of `self` come first.
    pub fn tensor(&self, other: &CqState) -> Result<CqState> {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        let mut qubits = self.qubits.clone();
        qubits.extend(other.qubits.iter().cloned());
        let mut out = CqState::new(registers, qubits)?;
        for (ka, ma) in &self.blocks {
            for (kb, mb) in &other.blocks {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                out.blocks.insert(key, ma.kronecker(mb));
            }
        }
        Ok(out)
    }

    /// Marginal on the kept registers and qubits (both in this state's order).
    pub fn reduce(&self, keep_registers: &[String], keep_qubits: &[QubitId]) -> Result<CqState> {
        for r in keep_registers {
            if !self.registers.contains(r) {
                return Err(Error::UnknownQubit(r.clone()));
            }
        }
        let reg_idx: Vec<usize> = (0..self.registers.len())
            .filter(|&i| keep_registers.contains(&self.registers[i]))
            .collect();
        let kept_qubits: Vec<QubitId> = self
            .qubits
            .iter()
            .filter(|q| keep_qubits.contains(q))
            .cloned()
            .collect();
        for q in keep_qubits {
            if !self.qubits.contains(q) {
                return Err(Error::UnknownQubit(q.to_string()));
            }
        }
        let mut out = CqState::new(
            reg_idx.iter().map(|&i| self.registers[i].clone()).collect(),
            kept_qubits.clone(),
        )?;
        let d = out.quantum_dim();
        for (key, m) in &self.blocks {
            let reduced = if kept_qubits.len() == self.qubits.len() {
                m.clone()
            } else {
                partial_trace_matrix(m, &self.qubits, &kept_qubits)?
            };
            let new_key: Vec<u8> = reg_idx.iter().map(|&i| key[i]).collect();
            let block = out
                .blocks
                .entry(new_key)
                .or_insert_with(|| DMatrix::zeros(d, d));
            *block += reduced;
        }
        Ok(out)
    }

    /// `½ ‖self - other‖₁` of the embedded matrices.
    pub fn trace_distance(&self, other: &CqState) -> Result<f64> {
        if other.registers != self.registers || other.qubits != self.qubits {
            return Err(Error::MismatchedRegisters);
        }
        let d = self.quantum_dim();
        let zero = DMatrix::<C64>::zeros(d, d);
        let mut keys: Vec<&Vec<u8>> = self.blocks.keys().chain(other.blocks.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut total = 0.0;
        for key in keys {
            let a = self.blocks.get(key).unwrap_or(&zero);
            let b = other.blocks.get(key).unwrap_or(&zero);
            total += hermitian_eigenvalues(&(a - b))?
                .iter()
                .map(|l| l.abs())
                .sum::<f64>();
        }
        Ok(0.5 * total)
    }

    /// The full density matrix, each classical register becoming two qubits
    /// `<name>.a`, `<name>.b` placed before the quantum qubits.
    pub fn embed(&self) -> Result<DensityMatrix> {
        let mut qubits = Vec::new();
        for r in &self.registers {
            qubits.push(QubitId::new(format!("{r}.a")));
            qubits.push(QubitId::new(format!("{r}.b")));
        }
        qubits.extend(self.qubits.iter().cloned());
        super::check_capacity(qubits.len())?;
        let d = self.quantum_dim();
        let dim = d << (2 * self.registers.len());
        let mut full = DMatrix::<C64>::zeros(dim, dim);
        for (key, m) in &self.blocks {
            let offset = key.iter().fold(0usize, |acc, &v| (acc << 2) | v as usize) * d;
            full.view_mut((offset, offset), (d, d)).copy_from(m);
        }
        DensityMatrix::new(qubits, full)
    }
}

/// Holevo quantity `S(Σ p ρ) - Σ p S(ρ)` of an ensemble of hybrid states.
pub fn cq_holevo_information(ensemble: &[(f64, CqState)]) -> Result<f64> {
    let Some((_, first)) = ensemble.first() else {
        return Ok(0.0);
    };
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(total));
    }
    let mut average = CqState::new(first.registers.clone(), first.qubits.clone())?;
    let mut conditional = 0.0;
    for (p, rho) in ensemble {
        average.add_scaled(rho, *p)?;
        if *p > 0.0 {
            conditional += p * rho.entropy()?;
        }
    }
    Ok(average.entropy()? - conditional)
}

fn partial_trace_matrix(
    m: &DMatrix<C64>,
    qubits: &[QubitId],
    keep: &[QubitId],
) -> Result<DMatrix<C64>> {
    // Route through DensityMatrix's partial trace; blocks are sub-normalized,
    // so build the wrapper without the unit-trace check.
    let dm = DensityMatrix::unchecked(qubits.to_vec(), m.clone());
    Ok(dm.partial_trace(keep)?.into_matrix())
}
