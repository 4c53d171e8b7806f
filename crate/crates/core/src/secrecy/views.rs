//! What the user holds after the download phase, per block and per answer
//! vector, and its average over the files the user should not learn.

use std::collections::HashMap;

use rayon::prelude::*;

use super::cell::Scheme;
use crate::pauli::WeylLabel;
use crate::protocol::{execute_block, Backend, BlockProgram, Exec, QuerySet};
use crate::state::{CqState, QubitId};
use crate::Result;

/// The user's block view for every answer vector `(H_1..H_N)`.
pub struct BlockViews {
    pub program: BlockProgram,
    states: Vec<CqState>,
}

/// Answer vector packed two bits per server, server 1 lowest.
pub fn answer_code(h: &[WeylLabel]) -> usize {
    h.iter()
        .enumerate()
        .fold(0, |acc, (t, l)| acc | (l.bits() as usize) << (2 * t))
}

impl BlockViews {
    pub fn build(scheme: Scheme, n: usize, block: usize) -> Result<Self> {
        let program = scheme.program(n, block)?;
        let qubits: Vec<QubitId> = program
            .transmitted
            .iter()
            .map(|t| t.qubit.clone())
            .collect();
        let registers: Vec<String> = program.classical.iter().map(|(r, _)| r.clone()).collect();
        let states = (0..1usize << (2 * n))
            .into_par_iter()
            .map(|code| {
                let h: Vec<WeylLabel> = (0..n)
                    .map(|t| WeylLabel::from_bits((code >> (2 * t)) as u8))
                    .collect();
                let branches = execute_block(&program, &h, Backend::Dense, Exec::Enumerate, true)?;
                let mut state = CqState::new(registers.clone(), qubits.clone())?;
                for b in branches {
                    let view = b.view.expect("views were requested");
                    let key: Vec<u8> = view.classical.iter().map(|l| l.bits()).collect();
                    state.add_pure(&key, b.probability.value, &view.quantum)?;
                }
                Ok(state)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockViews { program, states })
    }

    pub fn get(&self, h: &[WeylLabel]) -> &CqState {
        &self.states[answer_code(h)]
    }

    /// The block view with `W_i = w` and every other file uniform, for queries `q`.
    pub fn averaged(&self, q: &QuerySet, f: usize, i: usize, w: WeylLabel) -> Result<CqState> {
        let first = &self.states[0];
        let mut acc = CqState::new(first.registers().to_vec(), first.qubits().to_vec())?;
        let others = 4u64.pow((f - 1) as u32) as f64;
        for (code, count) in answer_distribution(q, f, i, w) {
            acc.add_scaled(&self.states[code], count as f64 / others)?;
        }
        Ok(acc)
    }
}

/// How often each answer vector occurs when `W_i = w` and the other `F - 1`
/// files range over all `4^{F-1}` values; sorted by answer code.
pub fn answer_distribution(q: &QuerySet, f: usize, i: usize, w: WeylLabel) -> Vec<(usize, u64)> {
    let n = q.n_servers();
    let mut counts: HashMap<usize, u64> = HashMap::new();
    let mut files = vec![WeylLabel::I; f];
    for code in 0..4usize.pow((f - 1) as u32) {
        let mut c = code;
        for (j, slot) in files.iter_mut().enumerate() {
            if j + 1 == i {
                *slot = w;
            } else {
                *slot = WeylLabel::from_bits((c & 0b11) as u8);
                c >>= 2;
            }
        }
        let h: Vec<WeylLabel> = (1..=n)
            .map(|t| {
                let mask = q.get(t);
                (0..f)
                    .filter(|j| mask >> j & 1 == 1)
                    .map(|j| files[j])
                    .sum()
            })
            .collect();
        *counts.entry(answer_code(&h)).or_default() += 1;
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_unstable();
    out
}

/// Parts of the view to discard before measuring information.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViewFilter {
    /// System names without the block suffix, e.g. `"H1"` or `"H2M"`.
    pub drop_qubits: Vec<String>,
    /// Register names without the block suffix, e.g. `"H2clear"`.
    pub drop_registers: Vec<String>,
}

impl ViewFilter {
    pub fn is_empty(&self) -> bool {
        self.drop_qubits.is_empty() && self.drop_registers.is_empty()
    }

    /// The qubits and registers of a block view that survive the filter.
    pub fn keep(
        &self,
        qubits: &[QubitId],
        registers: &[String],
        block: usize,
    ) -> (Vec<QubitId>, Vec<String>) {
        let suffix = format!("_p{block}");
        let base = |s: &str| s.strip_suffix(suffix.as_str()).unwrap_or(s).to_string();
        let keep_q = qubits
            .iter()
            .filter(|q| !self.drop_qubits.contains(&base(q.name())))
            .cloned()
            .collect();
        let keep_r = registers
            .iter()
            .filter(|r| !self.drop_registers.contains(&base(r)))
            .cloned()
            .collect();
        (keep_q, keep_r)
    }

    pub fn apply(&self, state: &CqState, block: usize) -> Result<CqState> {
        if self.is_empty() {
            return Ok(state.clone());
        }
        let (keep_q, keep_r) = self.keep(state.qubits(), state.registers(), block);
        state.reduce(&keep_r, &keep_q)
    }
}
