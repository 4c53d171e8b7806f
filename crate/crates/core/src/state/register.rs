use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bit_of, check_capacity, check_unique, scatter, DensityMatrix, QubitId, C64};
use super::{NORM_TOLERANCE, ZERO_PROBABILITY};
use crate::pauli::{matrix, Matrix2, SignedWeyl, WeylLabel};
use crate::{Error, Result};

/// A normalized pure state over an ordered list of named qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegister {
    qubits: Vec<QubitId>,
    amplitudes: Vec<C64>,
}

/// One branch of a Bell-basis measurement.
#[derive(Debug, Clone)]
pub struct BellBranch {
    pub outcome: WeylLabel,
    pub probability: f64,
    /// State of the unmeasured qubits; `None` when the branch cannot occur.
    pub post_state: Option<QuantumRegister>,
}

impl QuantumRegister {
    pub fn new(qubits: Vec<QubitId>, amplitudes: Vec<C64>) -> Result<Self> {
        check_unique(&qubits)?;
        check_capacity(qubits.len())?;
        if amplitudes.len() != 1 << qubits.len() {
            return Err(Error::InvalidConfig(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                qubits.len()
            )));
        }
        let reg = QuantumRegister { qubits, amplitudes };
        let norm = reg.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(reg)
    }

    /// The zero-qubit register holding the scalar 1.
    pub fn empty() -> Self {
        QuantumRegister {
            qubits: Vec::new(),
            amplitudes: vec![C64::new(1.0, 0.0)],
        }
    }

    /// Computational basis state; `bits[i]` is the value of `qubits[i]`.
    pub fn basis(qubits: Vec<QubitId>, bits: &[u8]) -> Result<Self> {
        check_unique(&qubits)?;
        check_capacity(qubits.len())?;
        assert_eq!(qubits.len(), bits.len());
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << qubits.len()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(QuantumRegister { qubits, amplitudes })
    }

    /// `(|00⟩ + |11⟩)/√2` on `(q1, q2)`.
    pub fn make_bell_pair(q1: QubitId, q2: QubitId) -> Result<Self> {
        if q1 == q2 {
            return Err(Error::DuplicateQubit(q1.to_string()));
        }
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        Ok(QuantumRegister {
            qubits: vec![q1, q2],
            amplitudes: vec![h, z, z, h],
        })
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn index_of(&self, q: &QubitId) -> Result<usize> {
        self.qubits
            .iter()
            .position(|x| x == q)
            .ok_or_else(|| Error::UnknownQubit(q.to_string()))
    }

    pub fn contains(&self, q: &QubitId) -> bool {
        self.qubits.contains(q)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `self ⊗ other`, with `self`'s qubits first.
    pub fn tensor(&self, other: &QuantumRegister) -> Result<Self> {
        let mut qubits = self.qubits.clone();
        qubits.extend(other.qubits.iter().cloned());
        check_unique(&qubits)?;
        check_capacity(qubits.len())?;
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(QuantumRegister { qubits, amplitudes })
    }

    /// Applies a 2×2 unitary to qubit `q` in place.
    pub fn apply_matrix_mut(&mut self, q: &QubitId, m: &Matrix2) -> Result<()> {
        let n = self.num_qubits();
        let stride = 1usize << bit_of(n, self.index_of(q)?);
        for base in 0..self.amplitudes.len() {
            if base & stride != 0 {
                continue;
            }
            let a0 = self.amplitudes[base];
            let a1 = self.amplitudes[base | stride];
            self.amplitudes[base] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[base | stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    pub fn apply_weyl_mut(&mut self, q: &QubitId, op: SignedWeyl) -> Result<()> {
        self.apply_matrix_mut(q, &matrix(op))
    }

    pub fn apply_weyl(&self, q: &QubitId, op: SignedWeyl) -> Result<Self> {
        let mut out = self.clone();
        out.apply_weyl_mut(q, op)?;
        Ok(out)
    }

    /// Projects `(q1, q2)` onto `(I ⊗ W(outcome))|Φ⟩` and removes both qubits.
    ///
    /// Returns the Born probability and the renormalized remainder, which is
    /// `None` for an impossible outcome. The remainder's phase follows the
    /// contraction with the bra `⟨Φ|(I ⊗ W(outcome))†`, so it is exact, not
    /// merely correct up to a global phase.
    pub fn project_bell(
        &self,
        q1: &QubitId,
        q2: &QubitId,
        outcome: WeylLabel,
    ) -> Result<(f64, Option<QuantumRegister>)> {
        if q1 == q2 {
            return Err(Error::DuplicateQubit(q1.to_string()));
        }
        let n = self.num_qubits();
        let (i1, i2) = (self.index_of(q1)?, self.index_of(q2)?);
        let (s1, s2) = (bit_of(n, i1), bit_of(n, i2));
        let rest_positions: Vec<usize> = (0..n)
            .filter(|&i| i != i1 && i != i2)
            .map(|i| bit_of(n, i))
            .collect();
        let (a, b) = (outcome.a() as usize, outcome.b() as usize);

        let mut out = Vec::with_capacity(1 << (n - 2));
        for rest in 0..1usize << (n - 2) {
            let base = scatter(rest, &rest_positions);
            let mut amp = C64::new(0.0, 0.0);
            for r in 0..2usize {
                let idx = base | (r << s1) | ((r ^ a) << s2);
                let term = self.amplitudes[idx];
                if r & b == 1 {
                    amp -= term;
                } else {
                    amp += term;
                }
            }
            out.push(amp * FRAC_1_SQRT_2);
        }

        let probability: f64 = out.iter().map(|x| x.norm_sqr()).sum();
        if probability <= ZERO_PROBABILITY {
            return Ok((0.0, None));
        }
        let scale = probability.sqrt().recip();
        for x in &mut out {
            *x *= scale;
        }
        let qubits = self
            .qubits
            .iter()
            .filter(|q| *q != q1 && *q != q2)
            .cloned()
            .collect();
        Ok((
            probability,
            Some(QuantumRegister {
                qubits,
                amplitudes: out,
            }),
        ))
    }

    /// All four branches of the Bell-basis PVM on `(q1, q2)`, in label order.
    pub fn bell_pvm_outcomes(&self, q1: &QubitId, q2: &QubitId) -> Result<Vec<BellBranch>> {
        WeylLabel::ALL
            .iter()
            .map(|&outcome| {
                let (probability, post_state) = self.project_bell(q1, q2, outcome)?;
                Ok(BellBranch {
                    outcome,
                    probability,
                    post_state,
                })
            })
            .collect()
    }

    /// Samples one Bell-basis outcome with its Born probability.
    pub fn sample_bell_pvm_with<R: Rng + ?Sized>(
        &self,
        q1: &QubitId,
        q2: &QubitId,
        rng: &mut R,
    ) -> Result<(WeylLabel, QuantumRegister)> {
        let branches = self.bell_pvm_outcomes(q1, q2)?;
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        let mut u = rng.random::<f64>() * total;
        let mut last = None;
        for branch in branches {
            if branch.post_state.is_none() {
                continue;
            }
            if u < branch.probability {
                return Ok((branch.outcome, branch.post_state.unwrap()));
            }
            u -= branch.probability;
            last = Some(branch);
        }
        // Rounding pushed `u` past the final possible branch.
        let last = last.expect("some branch has positive probability");
        Ok((last.outcome, last.post_state.unwrap()))
    }

    /// Deterministic sampling: the same seed always picks the same branch.
    pub fn sample_bell_pvm(
        &self,
        q1: &QubitId,
        q2: &QubitId,
        rng_seed: u64,
    ) -> Result<(WeylLabel, QuantumRegister)> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        self.sample_bell_pvm_with(q1, q2, &mut rng)
    }

    /// `-|ψ⟩`.
    pub fn negated(&self) -> Self {
        QuantumRegister {
            qubits: self.qubits.clone(),
            amplitudes: self.amplitudes.iter().map(|a| -a).collect(),
        }
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// The same state with its qubits listed in `order`.
    pub fn permuted(&self, order: &[QubitId]) -> Result<Self> {
        if order.len() != self.num_qubits() {
            return Err(Error::MismatchedRegisters);
        }
        check_unique(order)?;
        let n = self.num_qubits();
        // new slot j holds old slot perm[j]
        let perm: Vec<usize> = order
            .iter()
            .map(|q| self.index_of(q))
            .collect::<Result<_>>()?;
        let old_positions: Vec<usize> = perm.iter().map(|&i| bit_of(n, i)).collect();
        let amplitudes = (0..self.amplitudes.len())
            .map(|new_idx| self.amplitudes[scatter(new_idx, &old_positions)])
            .collect();
        Ok(QuantumRegister {
            qubits: order.to_vec(),
            amplitudes,
        })
    }

    pub fn renamed(&self, from: &QubitId, to: QubitId) -> Result<Self> {
        let i = self.index_of(from)?;
        let mut out = self.clone();
        out.qubits[i] = to;
        check_unique(&out.qubits)?;
        Ok(out)
    }

    /// `⟨self|other⟩`; both registers must list the same qubits in the same order.
    pub fn inner(&self, other: &QuantumRegister) -> Result<C64> {
        if self.qubits != other.qubits {
            return Err(Error::MismatchedRegisters);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest entrywise deviation after aligning `other` to this qubit order.
    pub fn max_abs_diff(&self, other: &QuantumRegister) -> Result<f64> {
        let other = other.permuted(&self.qubits)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Distance between the two states after removing the global phase.
    pub fn phase_insensitive_diff(&self, other: &QuantumRegister) -> Result<f64> {
        let other = other.permuted(&self.qubits)?;
        let overlap = self.inner(&other)?;
        if overlap.norm() == 0.0 {
            return Ok(f64::INFINITY);
        }
        let phase = overlap / overlap.norm();
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    /// Human-readable amplitude listing; basis labels read left to right in
    /// register order.
    pub fn dump(&self) -> String {
        let n = self.num_qubits();
        let names: Vec<&str> = self.qubits.iter().map(|q| q.name()).collect();
        let mut s = format!("[{}]\n", names.join(", "));
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let label: String = (0..n)
                .map(|j| {
                    if (i >> bit_of(n, j)) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect();
            let _ = writeln!(s, "|{label}⟩ {:+.12} {:+.12}i", a.re, a.im);
        }
        s
    }
}
