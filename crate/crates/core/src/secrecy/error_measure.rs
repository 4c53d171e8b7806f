use num_bigint::BigUint;
use num_rational::BigRational;
use rayon::prelude::*;

use super::cell::Cell;
use super::views::answer_code;
use crate::pauli::WeylLabel;
use crate::protocol::queries::query_support;
use crate::protocol::{execute_block, Backend, Exec};
use crate::{Error, Result};

/// `α = E_{W,K,Q}[1 - Pr(Ŵ_K = W_K)]` over the cell's file sets, every `K`
/// and every query set.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub cell: Cell,
    pub backend: Backend,
    pub alpha: f64,
    /// Exact value; only the frame backend knows probabilities exactly.
    pub alpha_exact: Option<BigRational>,
    /// Number of `(W, K, Q)` triples averaged.
    pub evaluations: u64,
}

/// Output distribution of one block for one answer vector. Exact entries are
/// numerators over `4^m`, `m` being the block's measurement count.
struct OutputDistribution {
    exact: Option<[u64; 4]>,
    approx: [f64; 4],
}

pub fn error_measure(cell: &Cell, backend: Backend) -> Result<ErrorReport> {
    cell.validate()?;
    let program = cell.scheme.program(cell.n, 0)?;
    let m = program.measurements() as u32;
    if m as usize * cell.blocks > 48 {
        return Err(Error::Capacity {
            what: "exact error-measure exponent",
            requested: (m as usize * cell.blocks) as u128,
            limit: 48,
        });
    }
    let dists = (0..1usize << (2 * cell.n))
        .into_par_iter()
        .map(|code| {
            let h: Vec<WeylLabel> = (0..cell.n)
                .map(|t| WeylLabel::from_bits((code >> (2 * t)) as u8))
                .collect();
            let mut exact = Some([0u64; 4]);
            let mut approx = [0.0; 4];
            for b in execute_block(&program, &h, backend, Exec::Enumerate, false)? {
                let o = b.output.bits() as usize;
                approx[o] += b.probability.value;
                match (b.probability.quarter_power, exact.as_mut()) {
                    (Some(power), Some(e)) => e[o] += 1u64 << (2 * (m - power)),
                    _ => exact = None,
                }
            }
            Ok(OutputDistribution { exact, approx })
        })
        .collect::<Result<Vec<_>>>()?;

    let file_sets = cell.file_sets();
    let jobs: Vec<(usize, usize)> = (1..=cell.f)
        .flat_map(|k| (0..file_sets.len()).map(move |w| (k, w)))
        .collect();
    let partial = jobs
        .par_iter()
        .map(|&(k, w)| {
            let files = &file_sets[w];
            let mut exact_sum: Option<u128> = Some(0);
            let mut approx_sum = 0.0;
            let mut count = 0u64;
            for q in query_support(cell.n, cell.f, k, cell.scheme.variant())? {
                let masks = q.subsets();
                let mut e: Option<u128> = Some(1);
                let mut a = 1.0;
                for p in 0..cell.blocks {
                    let h: Vec<WeylLabel> = masks
                        .iter()
                        .map(|&mask| {
                            (0..cell.f)
                                .filter(|j| mask >> j & 1 == 1)
                                .map(|j| files[j].get(p))
                                .sum()
                        })
                        .collect();
                    let d = &dists[answer_code(&h)];
                    let target = files[k - 1].get(p).bits() as usize;
                    a *= d.approx[target];
                    e = e.zip(d.exact).map(|(acc, ex)| acc * ex[target] as u128);
                }
                approx_sum += a;
                exact_sum = exact_sum.zip(e).map(|(s, x)| s + x);
                count += 1;
            }
            Ok((exact_sum, approx_sum, count))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut exact_total = Some(BigUint::from(0u8));
    let mut approx_total = 0.0;
    let mut count = 0u64;
    for (e, a, c) in partial {
        exact_total = exact_total.zip(e).map(|(t, x)| t + BigUint::from(x));
        approx_total += a;
        count += c;
    }
    let alpha = 1.0 - approx_total / count as f64;
    let alpha_exact = exact_total.map(|num| {
        let denom = BigUint::from(count) << (2 * m as usize * cell.blocks);
        let correct = BigRational::new(num.into(), denom.into());
        BigRational::from_integer(1.into()) - correct
    });
    Ok(ErrorReport {
        cell: *cell,
        backend,
        alpha,
        alpha_exact,
        evaluations: count,
    })
}
