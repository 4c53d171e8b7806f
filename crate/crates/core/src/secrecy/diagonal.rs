//! Exact classical description of the user's views.
//!
//! On the frame backend every branch leaves a product of Bell links. A view
//! that holds both ends of some links and one end of others is, in the product
//! Bell basis of the held pairs, diagonal: the held pairs contribute their
//! frame labels, the half-held pairs contribute `I/2` whatever their frame.
//! Mixtures over branches, files and queries stay diagonal in that basis, so
//! entropies, Holevo quantities and trace distances reduce to integer counts.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::cell::Scheme;
use super::views::answer_distribution;
use crate::pauli::WeylLabel;
use crate::protocol::{execute_block, Backend, BellLink, BlockProgram, Exec, QuerySet};
use crate::state::{CqState, QuantumRegister, QubitId};
use crate::{Error, Result};

/// Counts over view keys; a key is the kept registers' labels followed by the
/// held pairs' frame labels, two bits per byte.
pub type Counts = BTreeMap<Vec<u8>, u128>;

/// Where each part of a kept view sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalLayout {
    pub registers: Vec<String>,
    /// Pairs with both ends kept, first end earlier in the kept order.
    pub pairs: Vec<(QubitId, QubitId)>,
    /// Kept qubits whose partner is not kept.
    pub halves: Vec<QubitId>,
    /// Kept qubits in view order.
    pub qubits: Vec<QubitId>,
}

struct Leaf {
    /// Numerator over `4^m`, `m` the block's measurement count.
    weight: u64,
    registers: Vec<WeylLabel>,
    links: Vec<BellLink>,
}

/// Frame-backend leaves at the checkpoint for every answer vector of one block.
pub struct DiagonalViews {
    pub program: BlockProgram,
    power: u32,
    leaves: Vec<Vec<Leaf>>,
}

impl DiagonalViews {
    pub fn build(scheme: Scheme, n: usize, block: usize) -> Result<Self> {
        let program = scheme.program(n, block)?;
        let power = program.measurements() as u32;
        let leaves = (0..1usize << (2 * n))
            .into_par_iter()
            .map(|code| {
                let h: Vec<WeylLabel> = (0..n)
                    .map(|t| WeylLabel::from_bits((code >> (2 * t)) as u8))
                    .collect();
                execute_block(&program, &h, Backend::Frame, Exec::Enumerate, true)?
                    .into_iter()
                    .map(|b| {
                        let k = b.probability.quarter_power.ok_or_else(|| {
                            Error::Invariant("frame branch without exact probability".into())
                        })?;
                        let view = b.view.expect("views were requested");
                        Ok(Leaf {
                            weight: 4u64.pow(power - k),
                            registers: view.classical,
                            links: view.links.expect("frame backend reports links"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagonalViews {
            program,
            power,
            leaves,
        })
    }

    /// Every transmitted qubit and classical register.
    pub fn full(&self) -> Result<DiagonalTable> {
        let qubits: Vec<QubitId> = self
            .program
            .transmitted
            .iter()
            .map(|t| t.qubit.clone())
            .collect();
        let registers: Vec<String> = self
            .program
            .classical
            .iter()
            .map(|(r, _)| r.clone())
            .collect();
        self.table(&qubits, &registers)
    }

    /// Distributions over keys of the kept part of the view, per answer vector.
    pub fn table(
        &self,
        keep_qubits: &[QubitId],
        keep_registers: &[String],
    ) -> Result<DiagonalTable> {
        let reg_index: Vec<usize> = keep_registers
            .iter()
            .map(|r| {
                self.program
                    .classical
                    .iter()
                    .position(|(name, _)| name == r)
                    .ok_or_else(|| Error::InvalidConfig(format!("no register {r}")))
            })
            .collect::<Result<_>>()?;
        let position = |q: &QubitId| keep_qubits.iter().position(|k| k == q);
        let reference = &self.leaves[0][0].links;
        let mut pairs = Vec::new();
        let mut halves = Vec::new();
        for link in reference {
            match (position(&link.endpoint_a), position(&link.endpoint_b)) {
                (Some(a), Some(b)) if a < b => {
                    pairs.push((link.endpoint_a.clone(), link.endpoint_b.clone()))
                }
                (Some(_), Some(_)) => {
                    pairs.push((link.endpoint_b.clone(), link.endpoint_a.clone()))
                }
                (Some(_), None) => halves.push(link.endpoint_a.clone()),
                (None, Some(_)) => halves.push(link.endpoint_b.clone()),
                (None, None) => {}
            }
        }
        if pairs.len() * 2 + halves.len() != keep_qubits.len() {
            return Err(Error::Invariant(
                "kept qubit outside every Bell link at the checkpoint".into(),
            ));
        }
        let dists = self
            .leaves
            .par_iter()
            .map(|leaves| {
                let mut counts = Counts::new();
                for leaf in leaves {
                    let mut key: Vec<u8> = reg_index
                        .iter()
                        .map(|&r| leaf.registers[r].bits())
                        .collect();
                    for (a, b) in &pairs {
                        let link = leaf
                            .links
                            .iter()
                            .find(|l| l.touches(a))
                            .filter(|l| l.touches(b))
                            .ok_or_else(|| {
                                Error::Invariant("Bell link layout differs between branches".into())
                            })?;
                        let oriented = if link.endpoint_a == *a {
                            link.clone()
                        } else {
                            link.flipped()
                        };
                        key.push(oriented.frame.label.bits());
                    }
                    *counts.entry(key).or_default() += leaf.weight as u128;
                }
                Ok(counts)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagonalTable {
            layout: DiagonalLayout {
                registers: keep_registers.to_vec(),
                pairs,
                halves,
                qubits: keep_qubits.to_vec(),
            },
            power: self.power,
            dists,
        })
    }
}

/// A kept view as one distribution per answer vector.
pub struct DiagonalTable {
    pub layout: DiagonalLayout,
    power: u32,
    dists: Vec<Counts>,
}

impl DiagonalTable {
    /// Counts for one answer vector, over `4^m`.
    pub fn get(&self, code: usize) -> &Counts {
        &self.dists[code]
    }

    /// The view with `W_i = w`, other files uniform; counts over `4^{m+F-1}`.
    pub fn averaged(&self, q: &QuerySet, f: usize, i: usize, w: WeylLabel) -> Counts {
        let mut acc = Counts::new();
        for (code, count) in answer_distribution(q, f, i, w) {
            for (k, v) in &self.dists[code] {
                *acc.entry(k.clone()).or_default() += v * count as u128;
            }
        }
        acc
    }

    /// The dense state of a distribution over this layout's keys.
    pub fn to_cq_state(&self, counts: &Counts) -> Result<CqState> {
        let total = total(counts) as f64;
        let nreg = self.layout.registers.len();
        let mut state = CqState::new(self.layout.registers.clone(), self.layout.qubits.clone())?;
        let halves = self.layout.halves.len();
        for (key, &count) in counts {
            let mut pure = QuantumRegister::empty();
            for ((a, b), &label) in self.layout.pairs.iter().zip(&key[nreg..]) {
                let pair = QuantumRegister::make_bell_pair(a.clone(), b.clone())?
                    .apply_weyl(b, WeylLabel::from_bits(label).unsigned())?;
                pure = pure.tensor(&pair)?;
            }
            for bits in 0..1usize << halves {
                let z: Vec<u8> = (0..halves).map(|j| (bits >> j & 1) as u8).collect();
                let basis = QuantumRegister::basis(self.layout.halves.clone(), &z)?;
                let full = pure.tensor(&basis)?.permuted(&self.layout.qubits)?;
                let weight = count as f64 / total / (1usize << halves) as f64;
                state.add_pure(&key[..nreg], weight, &full)?;
            }
        }
        Ok(state)
    }

    pub fn measurement_power(&self) -> u32 {
        self.power
    }

    /// Same distributions over the same key shape, whatever the system names.
    pub fn same_distributions(&self, other: &DiagonalTable) -> bool {
        let shape = |l: &DiagonalLayout| (l.registers.len(), l.pairs.len(), l.halves.len());
        self.power == other.power
            && shape(&self.layout) == shape(&other.layout)
            && self.dists == other.dists
    }
}

pub fn total(counts: &Counts) -> u128 {
    counts.values().sum()
}

/// Shannon entropy in bits. The maximally mixed halves add a constant that
/// cancels in every difference taken here, so it is left out.
pub fn entropy(counts: &Counts) -> f64 {
    let t = total(counts) as f64;
    -counts
        .values()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Holevo information of a uniform ensemble of diagonal states with equal
/// totals; exactly zero when all members coincide.
pub fn holevo(members: &[Counts]) -> f64 {
    if members.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    let mut avg = Counts::new();
    for m in members {
        for (k, v) in m {
            *avg.entry(k.clone()).or_default() += v;
        }
    }
    let mean: f64 = members.iter().map(entropy).sum::<f64>() / members.len() as f64;
    entropy(&avg) - mean
}

/// Largest trace distance between a member and the uniform average.
pub fn max_distance_to_average(members: &[Counts]) -> f64 {
    let n = members.len() as u128;
    let mut avg = Counts::new();
    for m in members {
        for (k, v) in m {
            *avg.entry(k.clone()).or_default() += v;
        }
    }
    let denom = total(&avg) as f64;
    members
        .iter()
        .map(|m| {
            let l1: u128 = avg
                .iter()
                .map(|(k, &a)| {
                    let x = n * m.get(k).copied().unwrap_or(0);
                    x.abs_diff(a)
                })
                .sum();
            l1 as f64 / 2.0 / denom
        })
        .fold(0.0, f64::max)
}

/// Product distribution of independent parts, keys concatenated.
pub fn product(a: &Counts, b: &Counts) -> Counts {
    let mut out = Counts::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let mut k = ka.clone();
            k.extend_from_slice(kb);
            out.insert(k, va * vb);
        }
    }
    out
}

/// Groups identical items, keeping their multiplicities.
pub fn group<T: std::hash::Hash + Eq>(items: impl IntoIterator<Item = T>) -> Vec<(T, u64)> {
    let mut map: HashMap<T, u64> = HashMap::new();
    for it in items {
        *map.entry(it).or_default() += 1;
    }
    map.into_iter().collect()
}
