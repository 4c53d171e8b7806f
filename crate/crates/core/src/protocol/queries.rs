use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{validate_shape, Variant};
use crate::pauli::LabelVector;
use crate::{Error, Result};

/// Upper bound on the size of an enumerated query distribution.
pub const MAX_QUERY_SUPPORT: u128 = 1 << 22;

/// The queries `Q_1..Q_N`, each a subset of `{1..F}` stored as a mask with
/// bit `i-1` standing for file `i`. Their symmetric difference is `{K}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct QuerySet {
    subsets: Vec<u64>,
}

impl QuerySet {
    pub fn new(subsets: Vec<u64>, n_files: usize, k: usize) -> Result<Self> {
        check_index(k, n_files)?;
        let limit = 1u64 << n_files;
        if let Some(bad) = subsets.iter().find(|&&m| m >= limit) {
            return Err(Error::InvalidConfig(format!(
                "query mask {bad:#b} names files beyond {n_files}"
            )));
        }
        let xor = subsets.iter().fold(0, |acc, m| acc ^ m);
        if xor != 1 << (k - 1) {
            return Err(Error::InvalidConfig(format!(
                "queries combine to {xor:#b}, expected only file {k}"
            )));
        }
        Ok(QuerySet { subsets })
    }

    /// Completes `Q_1..Q_{N-1}` with `Q_N = Q_1 ⊕ … ⊕ Q_{N-1} ⊕ {K}`.
    pub fn complete(free: &[u64], n_files: usize, k: usize) -> Result<Self> {
        check_index(k, n_files)?;
        let last = free.iter().fold(1u64 << (k - 1), |acc, m| acc ^ m);
        let mut subsets = free.to_vec();
        subsets.push(last);
        Self::new(subsets, n_files, k)
    }

    pub fn subsets(&self) -> &[u64] {
        &self.subsets
    }

    pub fn n_servers(&self) -> usize {
        self.subsets.len()
    }

    /// `Q_t`, 1-based.
    pub fn get(&self, t: usize) -> u64 {
        self.subsets[t - 1]
    }

    /// `Q_t'`: every query except the one sent to server `t`.
    pub fn without(&self, t: usize) -> Vec<u64> {
        self.subsets
            .iter()
            .enumerate()
            .filter(|&(s, _)| s + 1 != t)
            .map(|(_, &m)| m)
            .collect()
    }
}

fn check_index(k: usize, n_files: usize) -> Result<()> {
    if k < 1 || k > n_files {
        return Err(Error::IndexOutOfRange {
            index: k,
            files: n_files,
        });
    }
    Ok(())
}

/// File indices (1-based) named by a mask.
pub fn mask_to_set(mask: u64) -> Vec<usize> {
    (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect()
}

pub fn set_to_mask(set: &[usize]) -> u64 {
    set.iter().fold(0, |acc, &i| acc | 1 << (i - 1))
}

/// Samples queries for the honest protocol.
pub fn make_queries(n: usize, f: usize, k: usize, rng_seed: u64) -> Result<QuerySet> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    make_queries_with(n, f, k, Variant::Qspir, &mut rng)
}

pub fn make_queries_with<R: Rng + ?Sized>(
    n: usize,
    f: usize,
    k: usize,
    variant: Variant,
    rng: &mut R,
) -> Result<QuerySet> {
    validate_shape(n, f, 1)?;
    check_index(k, f)?;
    let limit = 1u64 << f;
    let free: Vec<u64> = (0..n - 1)
        .map(|t| {
            if t == 0 && variant == Variant::LeakyQuery {
                1 << (k - 1)
            } else {
                rng.random_range(0..limit)
            }
        })
        .collect();
    QuerySet::complete(&free, f, k)
}

/// Number of equally likely query sets for index `k`.
pub fn query_support_size(n: usize, f: usize, variant: Variant) -> u128 {
    let free = if variant == Variant::LeakyQuery {
        n - 2
    } else {
        n - 1
    };
    1u128 << (f * free).min(127)
}

/// Every query set the user can send for index `k`, each equally likely,
/// in lexicographic order of `(Q_1, …, Q_{N-1})`.
pub fn query_support(n: usize, f: usize, k: usize, variant: Variant) -> Result<Vec<QuerySet>> {
    validate_shape(n, f, 1)?;
    check_index(k, f)?;
    let size = query_support_size(n, f, variant);
    if size > MAX_QUERY_SUPPORT {
        return Err(Error::Capacity {
            what: "enumerated query sets",
            requested: size,
            limit: MAX_QUERY_SUPPORT,
        });
    }
    let leaky = variant == Variant::LeakyQuery;
    let n_free = if leaky { n - 2 } else { n - 1 };
    let base = 1u64 << f;
    (0..size as u64)
        .map(|code| {
            let mut free = Vec::with_capacity(n - 1);
            if leaky {
                free.push(1 << (k - 1));
            }
            for j in 0..n_free {
                let shift = f * (n_free - 1 - j);
                free.push((code >> shift) % base);
            }
            QuerySet::complete(&free, f, k)
        })
        .collect()
}

/// `H = Σ_{i∈q} W_i`, block by block.
pub fn server_answer(files: &[LabelVector], q: u64) -> Result<LabelVector> {
    let blocks = files.first().map_or(0, LabelVector::len);
    let mut out = LabelVector::zeros(blocks);
    for i in mask_to_set(q) {
        let file = files.get(i - 1).ok_or(Error::IndexOutOfRange {
            index: i,
            files: files.len(),
        })?;
        out += file;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::WeylLabel;

    #[test]
    fn completion_examples() {
        let q = QuerySet::complete(&[set_to_mask(&[1]), set_to_mask(&[2])], 2, 1).unwrap();
        assert_eq!(mask_to_set(q.get(3)), vec![2]);
        let q = QuerySet::complete(&[0], 2, 2).unwrap();
        assert_eq!(mask_to_set(q.get(2)), vec![2]);
        assert_eq!(q.without(1), vec![0b10]);
    }

    #[test]
    fn invalid_queries() {
        assert!(QuerySet::new(vec![0b01, 0b01], 2, 1).is_err());
        assert!(QuerySet::new(vec![0b100, 0b101], 2, 1).is_err());
        assert!(matches!(
            make_queries(3, 2, 3, 0),
            Err(Error::IndexOutOfRange { index: 3, files: 2 })
        ));
    }

    #[test]
    fn sampled_queries_satisfy_invariant() {
        for seed in 0..50 {
            let q = make_queries(4, 3, 2, seed).unwrap();
            assert_eq!(q.subsets().iter().fold(0, |a, m| a ^ m), 0b010);
        }
    }

    #[test]
    fn first_query_marginal_is_uniform() {
        let f = 3;
        let samples = 100_000;
        let mut counts = vec![0usize; 1 << f];
        for seed in 0..samples {
            counts[make_queries(3, f, 1, seed).unwrap().get(1) as usize] += 1;
        }
        let expected = 1.0 / (1 << f) as f64;
        for c in counts {
            assert!((c as f64 / samples as f64 - expected).abs() < 0.01);
        }
    }

    #[test]
    fn support_enumeration() {
        let all = query_support(3, 2, 1, Variant::Qspir).unwrap();
        assert_eq!(all.len(), 16);
        let leaky = query_support(3, 2, 2, Variant::LeakyQuery).unwrap();
        assert_eq!(leaky.len(), 4);
        assert!(leaky.iter().all(|q| q.get(1) == 0b10));
        assert!(query_support(40, 3, 1, Variant::Qspir)
            .unwrap_err()
            .is_capacity());
    }

    #[test]
    fn answers() {
        let files = vec![
            LabelVector::from_labels(&[WeylLabel::X]),
            LabelVector::from_labels(&[WeylLabel::Z]),
        ];
        assert!(server_answer(&files, 0).unwrap().is_zero());
        assert_eq!(server_answer(&files, 0b11).unwrap().get(0), WeylLabel::XZ);
        assert!(matches!(
            server_answer(&files, 0b100),
            Err(Error::IndexOutOfRange { index: 3, files: 2 })
        ));
    }
}
