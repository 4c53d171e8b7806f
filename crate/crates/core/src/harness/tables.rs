use num_rational::BigRational;
use serde::Serialize;

use super::metrics::{classical_rate, quantum_rate, Costs};
use crate::protocol::{run_classical_baseline, run_qspir, Mode, ProtocolConfig};
use crate::secrecy::rational;
use crate::{Error, Result};

/// Measured against predicted rates for one server count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub blocks: usize,
    #[serde(serialize_with = "as_ratio")]
    pub quantum: BigRational,
    #[serde(serialize_with = "as_ratio")]
    pub quantum_expected: BigRational,
    #[serde(serialize_with = "as_ratio")]
    pub classical: BigRational,
    #[serde(serialize_with = "as_ratio")]
    pub classical_expected: BigRational,
    pub quantum_ok: bool,
    pub classical_ok: bool,
}

fn as_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational(r))
}

fn sampled_costs(n: usize, f: usize, blocks: usize) -> Result<(Costs, Costs)> {
    let config = ProtocolConfig::random(n, f, blocks, 1, 0).with_mode(Mode::Sample);
    let quantum = run_qspir(&config)?;
    let classical = run_classical_baseline(&config)?;
    Ok((Costs::of(&quantum[0]), Costs::of(&classical)))
}

/// One sampled run of each protocol per `N`, rates compared exactly.
pub fn rate_table(ns: impl IntoIterator<Item = usize>, blocks: usize) -> Result<Vec<RateRow>> {
    ns.into_iter()
        .map(|n| {
            if !(2..=7).contains(&n) {
                return Err(Error::InvalidConfig(format!(
                    "rate table covers N in 2..=7, got {n}"
                )));
            }
            let (q, c) = sampled_costs(n, 2, blocks)?;
            let quantum = q.rate(blocks);
            let classical = c.rate(blocks);
            Ok(RateRow {
                n,
                blocks,
                quantum_ok: quantum == quantum_rate(n),
                classical_ok: classical == classical_rate(n),
                quantum,
                quantum_expected: quantum_rate(n),
                classical,
                classical_expected: classical_rate(n),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaPoint {
    pub blocks: usize,
    #[serde(serialize_with = "as_ratio")]
    pub theta: BigRational,
}

/// `θ = NF / download` for each block count, from sampled runs.
pub fn theta_trend(
    n: usize,
    f: usize,
    blocks: impl IntoIterator<Item = usize>,
) -> Result<Vec<ThetaPoint>> {
    let mut out: Vec<ThetaPoint> = Vec::new();
    for l in blocks {
        if out.last().is_some_and(|p| p.blocks >= l) {
            return Err(Error::InvalidConfig("block counts must increase".into()));
        }
        let (q, _) = sampled_costs(n, f, l)?;
        out.push(ThetaPoint {
            blocks: l,
            theta: q.theta(),
        });
    }
    Ok(out)
}

pub fn strictly_decreasing(points: &[ThetaPoint]) -> bool {
    points.windows(2).all(|w| w[1].theta < w[0].theta)
}
