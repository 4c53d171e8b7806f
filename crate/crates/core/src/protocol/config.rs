use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::pauli::{LabelVector, WeylLabel};
use crate::{Error, Result};

/// Largest file count; query masks are 64-bit words.
pub const MAX_FILES: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Frame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sample,
    Enumerate,
}

/// The honest protocol and three deliberately broken variants used to show
/// that the verifiers can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Qspir,
    /// The user never applies the accumulated middle-server correction.
    #[serde(rename = "skip-correction")]
    SkipUserCorrection,
    /// The first query is always `{K}`.
    LeakyQuery,
    /// Server 2 also sends its answer `H_2` as cleartext bits.
    ClearH2,
}

macro_rules! string_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(Error::InvalidConfig(format!(
                        concat!("unknown ", stringify!($ty), " `{}`"), other
                    ))),
                }
            }
        }
    };
}

string_enum!(Backend { Dense => "dense", Frame => "frame" });
string_enum!(Mode { Sample => "sample", Enumerate => "enumerate" });
string_enum!(Variant {
    Qspir => "qspir",
    SkipUserCorrection => "skip-correction",
    LeakyQuery => "leaky-query",
    ClearH2 => "clear-h2",
});

/// One protocol instance: the replicated files, the wanted index and how to run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub n_servers: usize,
    pub n_files: usize,
    pub blocks: usize,
    /// `K`, 1-based.
    pub query_index: usize,
    pub files: Vec<LabelVector>,
    pub backend: Backend,
    pub rng_seed: u64,
    pub mode: Mode,
    pub variant: Variant,
}

impl ProtocolConfig {
    /// Files drawn uniformly from the seed; everything else at its default
    /// (frame backend, enumerate mode, honest protocol).
    pub fn random(n_servers: usize, n_files: usize, blocks: usize, k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ProtocolConfig {
            n_servers,
            n_files,
            blocks,
            query_index: k,
            files: random_files(n_files, blocks, &mut rng),
            backend: Backend::Frame,
            rng_seed: seed,
            mode: Mode::Enumerate,
            variant: Variant::Qspir,
        }
    }

    pub fn with_files(mut self, files: Vec<LabelVector>) -> Self {
        self.files = files;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_query_index(mut self, k: usize) -> Self {
        self.query_index = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_shape(self.n_servers, self.n_files, self.blocks)?;
        if self.query_index < 1 || self.query_index > self.n_files {
            return Err(Error::IndexOutOfRange {
                index: self.query_index,
                files: self.n_files,
            });
        }
        if self.files.len() != self.n_files {
            return Err(Error::InvalidConfig(format!(
                "{} files given, expected {}",
                self.files.len(),
                self.n_files
            )));
        }
        if let Some(bad) = self.files.iter().position(|f| f.len() != self.blocks) {
            return Err(Error::InvalidConfig(format!(
                "file {} has {} blocks, expected {}",
                bad + 1,
                self.files[bad].len(),
                self.blocks
            )));
        }
        Ok(())
    }

    /// The wanted file `W_K`.
    pub fn target(&self) -> &LabelVector {
        &self.files[self.query_index - 1]
    }
}

pub(crate) fn validate_shape(n: usize, f: usize, blocks: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 servers, got {n}"
        )));
    }
    if !(2..=MAX_FILES).contains(&f) {
        return Err(Error::InvalidConfig(format!(
            "file count must be in 2..={MAX_FILES}, got {f}"
        )));
    }
    if blocks < 1 {
        return Err(Error::InvalidConfig("need at least one block".into()));
    }
    Ok(())
}

pub fn random_files<R: Rng + ?Sized>(
    n_files: usize,
    blocks: usize,
    rng: &mut R,
) -> Vec<LabelVector> {
    (0..n_files)
        .map(|_| {
            let labels: Vec<WeylLabel> = (0..blocks)
                .map(|_| WeylLabel::from_bits(rng.random_range(0..4)))
                .collect();
            LabelVector::from_labels(&labels)
        })
        .collect()
}

/// Every assignment of `n_files` single-block files, in lexicographic order.
pub fn all_single_block_files(n_files: usize) -> impl Iterator<Item = Vec<LabelVector>> {
    (0..4usize.pow(n_files as u32)).map(move |code| {
        (0..n_files)
            .map(|i| {
                let bits = (code >> (2 * (n_files - 1 - i))) & 0b11;
                LabelVector::from_labels(&[WeylLabel::from_bits(bits as u8)])
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = ProtocolConfig::random(3, 2, 1, 2, 0);
        ok.validate().unwrap();
        assert!(matches!(
            ok.clone().with_query_index(3).validate(),
            Err(Error::IndexOutOfRange { index: 3, files: 2 })
        ));
        assert!(ProtocolConfig::random(1, 2, 1, 1, 0).validate().is_err());
        assert!(ProtocolConfig::random(2, 1, 1, 1, 0).validate().is_err());
        let short = ok.clone().with_files(vec![LabelVector::zeros(1)]);
        assert!(short.validate().is_err());
    }

    #[test]
    fn enum_names_roundtrip() {
        for v in [
            Variant::Qspir,
            Variant::SkipUserCorrection,
            Variant::LeakyQuery,
            Variant::ClearH2,
        ] {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{v}\""));
        }
        assert_eq!("frame".parse::<Backend>().unwrap(), Backend::Frame);
        assert!("fast".parse::<Backend>().is_err());
    }

    #[test]
    fn exhaustive_files() {
        let all: Vec<_> = all_single_block_files(2).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0], vec![LabelVector::zeros(1), LabelVector::zeros(1)]);
        assert_eq!(all[1][1].get(0), WeylLabel::Z);
        assert_eq!(all[4][0].get(0), WeylLabel::Z);
    }
}
