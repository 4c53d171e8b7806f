use rayon::prelude::*;

use super::cell::Cell;
use super::diagonal::{group, max_distance_to_average, product, Counts, DiagonalViews};
use super::server::{cell_views, labelled_states};
use crate::pauli::WeylLabel;
use crate::protocol::queries::query_support;
use crate::state::CqState;
use crate::{Error, Result};

/// Bound on the summed support of the per-file joint distributions.
pub const LEMMA1_JOINT_LIMIT: u128 = 1 << 22;

/// Largest dependence of the other servers' transmitted systems on `W_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Entry {
    /// The excluded server `t`.
    pub server: usize,
    pub k: usize,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct Lemma1Report {
    pub cell: Cell,
    pub entries: Vec<Lemma1Entry>,
    pub max_distance: f64,
}

/// For every `k` and `t`: the systems sent by all servers except `t`, given
/// `K = k` and `W_k = w`, averaged over queries and the other files; returns
/// the largest trace distance between any such state and its average over `w`.
pub fn lemma1_check(cell: &Cell) -> Result<Lemma1Report> {
    cell.validate()?;
    let views = (0..cell.blocks)
        .map(|p| DiagonalViews::build(cell.scheme, cell.n, p))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (1..=cell.f)
        .flat_map(|k| (1..=cell.n).map(move |t| (k, t)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(k, t)| {
            let tables = views
                .iter()
                .map(|v| {
                    let (qubits, registers) = v.program.complement_of(t);
                    v.table(&qubits, &registers)
                })
                .collect::<Result<Vec<_>>>()?;
            // Every block runs the same program under other names, so one
            // block's conditionals serve all of them; checked, not assumed.
            if let Some(p) = tables
                .iter()
                .position(|tb| !tb.same_distributions(&tables[0]))
            {
                return Err(Error::Invariant(format!(
                    "block {p} view differs from block 0"
                )));
            }
            let support = query_support(cell.n, cell.f, k, cell.scheme.variant())?;
            // The four conditional distributions for one block's W_k.
            let groups = group(
                support
                    .iter()
                    .map(|q| WeylLabel::ALL.map(|w| tables[0].averaged(q, cell.f, k, w))),
            );
            check_joint_size(&groups, cell.blocks)?;
            let mut joint: Vec<Counts> = vec![Counts::new(); 1 << (2 * cell.blocks)];
            for (conditional, mult) in &groups {
                for (code, slot) in joint.iter_mut().enumerate() {
                    let mut d: Counts = [(Vec::new(), *mult as u128)].into_iter().collect();
                    for p in 0..cell.blocks {
                        d = product(&d, &conditional[code >> (2 * p) & 0b11]);
                    }
                    for (key, v) in d {
                        *slot.entry(key).or_default() += v;
                    }
                }
            }
            Ok(Lemma1Entry {
                server: t,
                k,
                distance: max_distance_to_average(&joint),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(cell, entries))
}

/// Entries the joint distributions over all blocks may need.
fn check_joint_size(groups: &[([Counts; 4], u64)], blocks: usize) -> Result<()> {
    let limit = LEMMA1_JOINT_LIMIT;
    let mut size: u128 = 0;
    for (conditional, _) in groups {
        let widest = conditional
            .iter()
            .map(|d| d.len() as u128)
            .max()
            .unwrap_or(0);
        size = size.saturating_add(widest.saturating_pow(blocks as u32) << (2 * blocks).min(64));
    }
    if size > limit {
        return Err(Error::Capacity {
            what: "Lemma 1 joint distribution entries",
            requested: size,
            limit,
        });
    }
    Ok(())
}

fn report(cell: &Cell, entries: Vec<Lemma1Entry>) -> Lemma1Report {
    let max_distance = entries.iter().map(|e| e.distance).fold(0.0, f64::max);
    Lemma1Report {
        cell: *cell,
        entries,
        max_distance,
    }
}

/// The same check on dense block states.
pub fn lemma1_check_dense(cell: &Cell) -> Result<Lemma1Report> {
    let views = cell_views(cell)?;
    let jobs: Vec<(usize, usize)> = (1..=cell.f)
        .flat_map(|k| (1..=cell.n).map(move |t| (k, t)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(k, t)| {
            let support = query_support(cell.n, cell.f, k, cell.scheme.variant())?;
            let weight = 1.0 / support.len() as f64;
            let mut acc: Option<Vec<CqState>> = None;
            for q in &support {
                let states = labelled_states(cell, &views, q, k, |p, s| {
                    let (qubits, registers) = views[p].program.complement_of(t);
                    s.reduce(&registers, &qubits)
                })?;
                match acc.as_mut() {
                    None => {
                        let mut first = Vec::with_capacity(states.len());
                        for s in &states {
                            let mut z = CqState::new(s.registers().to_vec(), s.qubits().to_vec())?;
                            z.add_scaled(s, weight)?;
                            first.push(z);
                        }
                        acc = Some(first);
                    }
                    Some(a) => {
                        for (slot, s) in a.iter_mut().zip(&states) {
                            slot.add_scaled(s, weight)?;
                        }
                    }
                }
            }
            let conditional = acc.expect("query support is never empty");
            let first = &conditional[0];
            let mut average = CqState::new(first.registers().to_vec(), first.qubits().to_vec())?;
            for s in &conditional {
                average.add_scaled(s, 1.0 / conditional.len() as f64)?;
            }
            let mut distance: f64 = 0.0;
            for s in &conditional {
                distance = distance.max(s.trace_distance(&average)?);
            }
            Ok(Lemma1Entry {
                server: t,
                k,
                distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(cell, entries))
}
