use rayon::prelude::*;

use super::cell::Cell;
use super::diagonal::{holevo, DiagonalTable, DiagonalViews};
use super::views::{BlockViews, ViewFilter};
use crate::pauli::WeylLabel;
use crate::protocol::queries::query_support;
use crate::protocol::QuerySet;
use crate::state::{cq_holevo_information, CqState};
use crate::{Error, Result};

/// Information quantities below this are treated as rounding noise.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

/// `I(W_i; user view | K = k)` in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaEntry {
    pub i: usize,
    pub k: usize,
    pub bits: f64,
}

#[derive(Debug, Clone)]
pub struct ServerReport {
    pub cell: Cell,
    pub per_pair: Vec<BetaEntry>,
    pub beta_bits: f64,
}

/// Builds the block views of every block of a cell.
pub fn cell_views(cell: &Cell) -> Result<Vec<BlockViews>> {
    cell.validate()?;
    (0..cell.blocks)
        .map(|p| BlockViews::build(cell.scheme, cell.n, p))
        .collect()
}

/// Server secrecy over the user's whole view.
pub fn server_secrecy(cell: &Cell) -> Result<ServerReport> {
    server_secrecy_filtered(cell, &ViewFilter::default())
}

/// Diagonal tables of every block of a cell, after a filter.
pub(crate) fn filtered_tables(cell: &Cell, filter: &ViewFilter) -> Result<Vec<DiagonalTable>> {
    cell.validate()?;
    (0..cell.blocks)
        .map(|p| {
            let views = DiagonalViews::build(cell.scheme, cell.n, p)?;
            let qubits: Vec<_> = views
                .program
                .transmitted
                .iter()
                .map(|t| t.qubit.clone())
                .collect();
            let registers: Vec<_> = views
                .program
                .classical
                .iter()
                .map(|(r, _)| r.clone())
                .collect();
            let (q, r) = filter.keep(&qubits, &registers, p);
            views.table(&q, &r)
        })
        .collect()
}

/// Server secrecy over the user's view with the filtered parts discarded.
///
/// The view is every transmitted qubit and classical message of every block
/// together with the user's own queries. Queries are independent of the files,
/// so the information splits as `Σ_q Pr(q) χ_q`, with `χ_q` the Holevo
/// information of the `W_i`-labelled ensemble for fixed queries. For fixed
/// queries the blocks carry independent uniform parts of `W_i` in product
/// states, so `χ_q` is the sum of the per-block Holevo informations.
pub fn server_secrecy_filtered(cell: &Cell, filter: &ViewFilter) -> Result<ServerReport> {
    let tables = filtered_tables(cell, filter)?;
    per_pair_report(cell, |i, k| {
        let support = query_support(cell.n, cell.f, k, cell.scheme.variant())?;
        // Collected before summing so the result does not depend on scheduling.
        let chis: Vec<f64> = support
            .par_iter()
            .map(|q| {
                tables
                    .iter()
                    .map(|t| {
                        let members: Vec<_> = WeylLabel::ALL
                            .iter()
                            .map(|&w| t.averaged(q, cell.f, i, w))
                            .collect();
                        holevo(&members)
                    })
                    .sum::<f64>()
            })
            .collect();
        check_sign(chis.iter().sum::<f64>() / chis.len() as f64, i)
    })
}

/// The same quantity from dense block states, with the blocks of each query
/// set tensored together before taking the Holevo information.
pub fn server_secrecy_dense(cell: &Cell, filter: &ViewFilter) -> Result<ServerReport> {
    let views = cell_views(cell)?;
    per_pair_report(cell, |i, k| {
        let support = query_support(cell.n, cell.f, k, cell.scheme.variant())?;
        let chis = support
            .par_iter()
            .map(|q| holevo_for_queries(cell, &views, filter, q, i))
            .collect::<Result<Vec<_>>>()?;
        check_sign(chis.iter().sum::<f64>() / chis.len() as f64, i)
    })
}

fn per_pair_report(
    cell: &Cell,
    entry: impl Fn(usize, usize) -> Result<f64> + Sync,
) -> Result<ServerReport> {
    let pairs: Vec<(usize, usize)> = (1..=cell.f)
        .flat_map(|k| (1..=cell.f).filter(move |&i| i != k).map(move |i| (i, k)))
        .collect();
    let per_pair = pairs
        .par_iter()
        .map(|&(i, k)| {
            Ok(BetaEntry {
                i,
                k,
                bits: entry(i, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let beta_bits = per_pair.iter().map(|b| b.bits).fold(0.0, f64::max);
    Ok(ServerReport {
        cell: *cell,
        per_pair,
        beta_bits,
    })
}

fn check_sign(chi: f64, i: usize) -> Result<f64> {
    if chi < -NEGATIVE_TOLERANCE {
        return Err(Error::Invariant(format!(
            "negative Holevo information {chi} for file {i}"
        )));
    }
    Ok(clip(chi))
}

/// Block-product states of the user's view for every value of `W_i`
/// (uniform over `4^ℓ` values), other files averaged out.
pub(crate) fn labelled_states(
    cell: &Cell,
    views: &[BlockViews],
    q: &QuerySet,
    i: usize,
    per_block: impl Fn(usize, CqState) -> Result<CqState>,
) -> Result<Vec<CqState>> {
    let blocks: Vec<Vec<CqState>> = views
        .iter()
        .enumerate()
        .map(|(p, v)| {
            WeylLabel::ALL
                .iter()
                .map(|&w| per_block(p, v.averaged(q, cell.f, i, w)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut joint: Vec<CqState> = blocks[0].clone();
    for block in &blocks[1..] {
        let mut next = Vec::with_capacity(joint.len() * 4);
        for a in &joint {
            for b in block {
                next.push(a.tensor(b)?);
            }
        }
        joint = next;
    }
    Ok(joint)
}

fn holevo_for_queries(
    cell: &Cell,
    views: &[BlockViews],
    filter: &ViewFilter,
    q: &QuerySet,
    i: usize,
) -> Result<f64> {
    let states = labelled_states(cell, views, q, i, |p, s| filter.apply(&s, p))?;
    let weight = 1.0 / states.len() as f64;
    let ensemble: Vec<(f64, CqState)> = states.into_iter().map(|s| (weight, s)).collect();
    check_sign(cq_holevo_information(&ensemble)?, i)
}

/// Rounds tiny negative values from the eigensolver up to zero.
pub fn clip(x: f64) -> f64 {
    if x < 0.0 && x >= -NEGATIVE_TOLERANCE {
        0.0
    } else {
        x
    }
}
