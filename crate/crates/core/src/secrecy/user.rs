use std::collections::BTreeMap;

use super::cell::Cell;
use crate::protocol::queries::query_support;
use crate::state::{cq_holevo_information, CqState, QuantumRegister, NORM_TOLERANCE};
use crate::{Error, Result};

/// `I(K; Q_t')` for one server `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaEntry {
    pub server: usize,
    pub bits: f64,
    /// `"0"` for exact independence, `"log2(F)"` when `Q_t'` determines `K`.
    pub exact: Option<String>,
    /// The same quantity as a Holevo information of diagonal states.
    pub holevo_bits: f64,
}

#[derive(Debug, Clone)]
pub struct UserReport {
    pub cell: Cell,
    pub per_server: Vec<GammaEntry>,
    pub gamma_bits: f64,
    pub gamma_exact: Option<String>,
}

/// Exact joint counts of `(K, Q_t')` under uniform `K`, then the mutual
/// information in bits, for every server `t`.
pub fn user_secrecy(cell: &Cell) -> Result<UserReport> {
    cell.validate()?;
    let supports = (1..=cell.f)
        .map(|k| query_support(cell.n, cell.f, k, cell.scheme.variant()))
        .collect::<Result<Vec<_>>>()?;
    let mut per_server = Vec::new();
    for t in 1..=cell.n {
        let mut joint: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
        for (k, support) in supports.iter().enumerate() {
            for q in support {
                joint.entry(q.without(t)).or_insert_with(|| vec![0; cell.f])[k] += 1;
            }
        }
        per_server.push(gamma_entry(t, cell, &joint, supports[0].len())?);
    }
    let top = per_server
        .iter()
        .max_by(|a, b| a.bits.total_cmp(&b.bits))
        .expect("at least two servers");
    Ok(UserReport {
        cell: *cell,
        gamma_bits: top.bits,
        gamma_exact: top.exact.clone(),
        per_server,
    })
}

fn gamma_entry(
    t: usize,
    cell: &Cell,
    joint: &BTreeMap<Vec<u64>, Vec<u64>>,
    per_k: usize,
) -> Result<GammaEntry> {
    let f = cell.f as f64;
    let total = per_k as f64 * f;
    let mut bits = 0.0;
    for counts in joint.values() {
        let marginal: u64 = counts.iter().sum();
        for &c in counts {
            if c > 0 {
                let p = c as f64 / total;
                bits += p * (c as f64 * f / marginal as f64).log2();
            }
        }
    }
    let independent = joint.values().all(|c| c.iter().all(|&x| x == c[0]));
    let determined = joint
        .values()
        .all(|c| c.iter().filter(|&&x| x > 0).count() == 1);
    let exact = if independent {
        bits = 0.0;
        Some("0".to_string())
    } else if determined {
        bits = f.log2();
        Some(format!("log2({})", cell.f))
    } else {
        None
    };

    // Same quantity as a Holevo information: K labels diagonal states on
    // 2-bit registers holding Q_t'.
    let width = cell.f * (cell.n - 1);
    let registers: Vec<String> = (0..width.div_ceil(2)).map(|r| format!("q{r}")).collect();
    let ensemble = (0..cell.f)
        .map(|k| {
            let mut rho = CqState::new(registers.clone(), vec![])?;
            for (masks, counts) in joint {
                if counts[k] == 0 {
                    continue;
                }
                let packed = masks
                    .iter()
                    .fold(0u128, |acc, &m| (acc << cell.f) | m as u128);
                let key: Vec<u8> = (0..registers.len())
                    .map(|r| (packed >> (2 * r) & 0b11) as u8)
                    .collect();
                rho.add_pure(
                    &key,
                    counts[k] as f64 / per_k as f64,
                    &QuantumRegister::empty(),
                )?;
            }
            Ok((1.0 / f, rho))
        })
        .collect::<Result<Vec<_>>>()?;
    let holevo_bits = cq_holevo_information(&ensemble)?;
    if (holevo_bits - bits).abs() > NORM_TOLERANCE {
        return Err(Error::Invariant(format!(
            "server {t}: classical mutual information {bits} and Holevo information {holevo_bits} disagree"
        )));
    }
    Ok(GammaEntry {
        server: t,
        bits,
        exact,
        holevo_bits,
    })
}
