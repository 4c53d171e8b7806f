use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::pauli::{LabelVector, WeylLabel};
use crate::protocol::config::{random_files, validate_shape};
use crate::protocol::{BlockProgram, Variant};
use crate::Result;

/// File assignments up to this many are enumerated exhaustively.
pub const EXHAUSTIVE_FILE_SETS: usize = 256;

/// Seeded file assignments used when exhaustive enumeration is too large.
pub const SAMPLED_FILE_SETS: u64 = 32;

/// The scheme under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Quantum(Variant),
    Classical,
}

impl Scheme {
    pub fn variant(self) -> Variant {
        match self {
            Scheme::Quantum(v) => v,
            Scheme::Classical => Variant::Qspir,
        }
    }

    pub fn program(self, n: usize, block: usize) -> Result<BlockProgram> {
        match self {
            Scheme::Quantum(v) => BlockProgram::qspir(n, block, v),
            Scheme::Classical => BlockProgram::classical(n, block),
        }
    }
}

/// One `(N, F, ℓ)` point of a parameter grid, with the scheme under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Cell {
    pub n: usize,
    pub f: usize,
    pub blocks: usize,
    pub scheme: Scheme,
}

impl Cell {
    pub fn new(n: usize, f: usize, blocks: usize) -> Self {
        Cell {
            n,
            f,
            blocks,
            scheme: Scheme::Quantum(Variant::Qspir),
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_shape(self.n, self.f, self.blocks)
    }

    /// Every file assignment when there are at most [`EXHAUSTIVE_FILE_SETS`],
    /// otherwise [`SAMPLED_FILE_SETS`] seeded ones.
    pub fn file_sets(&self) -> Vec<Vec<LabelVector>> {
        let symbols = self.f * self.blocks;
        let total = 4usize.checked_pow(symbols as u32);
        match total {
            Some(t) if t <= EXHAUSTIVE_FILE_SETS => (0..t)
                .map(|code| {
                    (0..self.f)
                        .map(|i| {
                            let labels: Vec<WeylLabel> = (0..self.blocks)
                                .map(|p| {
                                    let shift = 2 * (i * self.blocks + p);
                                    WeylLabel::from_bits((code >> shift) as u8)
                                })
                                .collect();
                            LabelVector::from_labels(&labels)
                        })
                        .collect()
                })
                .collect(),
            _ => (0..SAMPLED_FILE_SETS)
                .map(|seed| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    random_files(self.f, self.blocks, &mut rng)
                })
                .collect(),
        }
    }
}

/// Every cell of `n × f × blocks`, in lexicographic order.
pub fn grid(ns: &[usize], fs: &[usize], blocks: &[usize], scheme: Scheme) -> Vec<Cell> {
    let mut out = Vec::new();
    for &n in ns {
        for &f in fs {
            for &l in blocks {
                out.push(Cell::new(n, f, l).with_scheme(scheme));
            }
        }
    }
    out
}
