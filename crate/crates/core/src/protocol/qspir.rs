use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Mode, ProtocolConfig, Variant};
use super::engine::{execute_block, BlockBranch, BranchProbability, Exec};
use super::program::{two_sum_pairs, BlockProgram, SlotKind};
use super::queries::{make_queries_with, server_answer, QuerySet};
use super::transcript::{ProtocolKind, ProtocolTranscript};
use crate::pauli::{LabelVector, WeylLabel};
use crate::state::{QuantumRegister, QubitId};
use crate::{Error, Result};

/// Enumerate mode refuses runs with more than `4^12` potential branches.
pub const MAX_BRANCH_EXPONENT: usize = 12;

/// `e` such that an enumerated run has at most `4^e` branches:
/// `((N-2) + pairs + 1)·ℓ`.
pub fn branch_exponent(n: usize, blocks: usize) -> usize {
    (n - 2 + two_sum_pairs(n).len() + 1) * blocks
}

fn check_branch_capacity(n: usize, blocks: usize) -> Result<()> {
    let e = branch_exponent(n, blocks);
    if e > MAX_BRANCH_EXPONENT {
        return Err(Error::Capacity {
            what: "enumerated branches",
            requested: 1u128.checked_shl(2 * e as u32).unwrap_or(u128::MAX),
            limit: 1u128 << (2 * MAX_BRANCH_EXPONENT),
        });
    }
    Ok(())
}

struct Prepared {
    rng: ChaCha8Rng,
    queries: QuerySet,
    answers: Vec<LabelVector>,
}

fn prepare(config: &ProtocolConfig) -> Result<Prepared> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let queries = make_queries_with(
        config.n_servers,
        config.n_files,
        config.query_index,
        config.variant,
        &mut rng,
    )?;
    let answers = (1..=config.n_servers)
        .map(|t| server_answer(&config.files, queries.get(t)))
        .collect::<Result<_>>()?;
    Ok(Prepared {
        rng,
        queries,
        answers,
    })
}

fn block_answers(answers: &[LabelVector], p: usize) -> Vec<WeylLabel> {
    answers.iter().map(|h| h.get(p)).collect()
}

/// Runs the `N`-server protocol block by block.
///
/// Queries are drawn from the seed. Sample mode follows one measurement
/// branch per block and returns one transcript; enumerate mode returns every
/// branch combination, in canonical order, with probabilities summing to 1.
pub fn run_qspir(config: &ProtocolConfig) -> Result<Vec<ProtocolTranscript>> {
    run_qspir_ordered(config, None)
}

/// [`run_qspir`] with the servers' download operations performed in `order`.
pub fn run_qspir_ordered(
    config: &ProtocolConfig,
    order: Option<&[usize]>,
) -> Result<Vec<ProtocolTranscript>> {
    let mut prep = prepare(config)?;
    if config.mode == Mode::Enumerate {
        check_branch_capacity(config.n_servers, config.blocks)?;
    }
    let programs = (0..config.blocks)
        .map(|p| {
            let program = BlockProgram::qspir(config.n_servers, p, config.variant)?;
            match order {
                Some(o) => program.with_server_order(o),
                None => Ok(program),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    run_programs(ProtocolKind::Qspir, config, &mut prep, &programs)
}

fn run_programs(
    kind: ProtocolKind,
    config: &ProtocolConfig,
    prep: &mut Prepared,
    programs: &[BlockProgram],
) -> Result<Vec<ProtocolTranscript>> {
    let mut per_block: Vec<Vec<BlockBranch>> = Vec::with_capacity(programs.len());
    for (p, program) in programs.iter().enumerate() {
        let h = block_answers(&prep.answers, p);
        let exec = match config.mode {
            Mode::Enumerate => Exec::Enumerate,
            Mode::Sample => Exec::Sample(&mut prep.rng),
        };
        per_block.push(execute_block(program, &h, config.backend, exec, false)?);
    }
    let mut out = Vec::new();
    let mut index = vec![0usize; per_block.len()];
    loop {
        let chosen: Vec<&BlockBranch> = index.iter().zip(&per_block).map(|(&i, b)| &b[i]).collect();
        out.push(ProtocolTranscript::assemble(
            kind,
            config,
            &prep.queries,
            &prep.answers,
            programs,
            &chosen,
        ));
        // Odometer over block branches, last block fastest.
        let mut p = per_block.len();
        loop {
            if p == 0 {
                return Ok(out);
            }
            p -= 1;
            index[p] += 1;
            if index[p] < per_block[p].len() {
                break;
            }
            index[p] = 0;
        }
    }
}

/// The classical XOR scheme: every server sends `H_t` in the clear and the
/// user adds them up. The backend and mode are irrelevant.
pub fn run_classical_baseline(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    let mut prep = prepare(&ProtocolConfig {
        variant: Variant::Qspir,
        ..config.clone()
    })?;
    let programs = (0..config.blocks)
        .map(|p| BlockProgram::classical(config.n_servers, p))
        .collect::<Result<Vec<_>>>()?;
    let config = ProtocolConfig {
        mode: Mode::Enumerate,
        ..config.clone()
    };
    let mut all = run_programs(ProtocolKind::Classical, &config, &mut prep, &programs)?;
    debug_assert_eq!(all.len(), 1);
    Ok(all.remove(0))
}

/// One measurement branch of the three-server protocol, with the joint state
/// of `(H1, H3)` at each stage.
#[derive(Debug, Clone)]
pub struct ThreeServerBranch {
    /// Server 2's Bell outcome `(a,b)`.
    pub ab: WeylLabel,
    pub probability: f64,
    /// `(H1, H3)` after server 2's measurement.
    pub before_correction: QuantumRegister,
    /// `(H1, H3)` after the user's `W(a,b)` on `H3`.
    pub after_correction: QuantumRegister,
    /// Distribution of the user's final Bell outcome.
    pub outcomes: Vec<(WeylLabel, f64)>,
}

/// The three-server, single-block protocol written out directly on one
/// four-qubit register, independent of the step-program machinery.
pub fn three_server_branches(h: [WeylLabel; 3]) -> Result<Vec<ThreeServerBranch>> {
    let [h1, h2l, h2r, h3] = ["H1", "H2L", "H2R", "H3"].map(QubitId::new);
    let reg = QuantumRegister::make_bell_pair(h1.clone(), h2l.clone())?
        .tensor(&QuantumRegister::make_bell_pair(h2r.clone(), h3.clone())?)?
        .apply_weyl(&h1, h[0].unsigned())?
        .apply_weyl(&h2l, h[1].unsigned())?
        .apply_weyl(&h3, h[2].unsigned())?;
    let mut out = Vec::new();
    for branch in reg.bell_pvm_outcomes(&h2l, &h2r)? {
        let Some(before) = branch.post_state else {
            continue;
        };
        let after = before.apply_weyl(&h3, branch.outcome.unsigned())?;
        let outcomes = after
            .bell_pvm_outcomes(&h1, &h3)?
            .into_iter()
            .filter(|b| b.post_state.is_some())
            .map(|b| (b.outcome, b.probability))
            .collect();
        out.push(ThreeServerBranch {
            ab: branch.outcome,
            probability: branch.probability,
            before_correction: before,
            after_correction: after,
            outcomes,
        });
    }
    Ok(out)
}

/// Runs the three-server single-block protocol through [`three_server_branches`].
pub fn run_qspir_three_server(config: &ProtocolConfig) -> Result<Vec<ProtocolTranscript>> {
    if config.n_servers != 3 || config.blocks != 1 {
        return Err(Error::InvalidConfig(format!(
            "the three-server protocol needs N=3 and one block, got N={} and {} blocks",
            config.n_servers, config.blocks
        )));
    }
    if config.variant != Variant::Qspir && config.variant != Variant::LeakyQuery {
        return Err(Error::InvalidConfig(format!(
            "variant {} is not available for the three-server protocol",
            config.variant
        )));
    }
    let mut prep = prepare(config)?;
    let h = block_answers(&prep.answers, 0);
    let program = BlockProgram::qspir(3, 0, config.variant)?;
    let mut leaves = Vec::new();
    for branch in three_server_branches([h[0], h[1], h[2]])? {
        for &(outcome, p) in &branch.outcomes {
            leaves.push((branch.ab, outcome, branch.probability * p));
        }
    }
    if config.mode == Mode::Sample {
        let total: f64 = leaves.iter().map(|l| l.2).sum();
        let mut u = prep.rng.random::<f64>() * total;
        let mut pick = leaves.len() - 1;
        for (i, l) in leaves.iter().enumerate() {
            if u < l.2 {
                pick = i;
                break;
            }
            u -= l.2;
        }
        leaves = vec![leaves[pick]];
    }
    Ok(leaves
        .into_iter()
        .map(|(ab, outcome, p)| {
            let slots = program
                .slots
                .iter()
                .map(|k| match k {
                    SlotKind::Output => outcome,
                    _ => ab,
                })
                .collect();
            let branch = BlockBranch {
                slots,
                probability: BranchProbability::approximate(p),
                correction: Some(ab),
                output: outcome,
                view: None,
            };
            ProtocolTranscript::assemble(
                ProtocolKind::Qspir3,
                config,
                &prep.queries,
                &prep.answers,
                std::slice::from_ref(&program),
                &[&branch],
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::config::Backend;

    fn files(labels: &[WeylLabel]) -> Vec<LabelVector> {
        labels
            .iter()
            .map(|&l| LabelVector::from_labels(&[l]))
            .collect()
    }

    #[test]
    fn three_servers_retrieve_the_second_file() {
        let config =
            ProtocolConfig::random(3, 2, 1, 2, 5).with_files(files(&[WeylLabel::X, WeylLabel::Z]));
        for backend in [Backend::Dense, Backend::Frame] {
            let runs = run_qspir(&config.clone().with_backend(backend)).unwrap();
            assert_eq!(runs.len(), 4);
            let total: f64 = runs.iter().map(|t| t.branch_probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(runs.iter().all(|t| t.outcome.get(0) == WeylLabel::Z));
        }
        let literal = run_qspir_three_server(&config).unwrap();
        assert_eq!(literal.len(), 4);
        assert!(literal.iter().all(|t| t.is_correct()));
    }

    #[test]
    fn costs() {
        let t = &run_qspir(&ProtocolConfig::random(4, 2, 1, 1, 0)).unwrap()[0];
        assert_eq!(
            (t.uploaded_bits, t.downloaded_qubits, t.downloaded_cbits),
            (8, 4, 0)
        );
        let t = &run_qspir(&ProtocolConfig::random(3, 3, 2, 1, 0)).unwrap()[0];
        assert_eq!(
            (
                t.downloaded_qubits,
                t.downloaded_cbits,
                t.download_qubit_equivalents
            ),
            (4, 4, 8)
        );
        let t = run_classical_baseline(&ProtocolConfig::random(4, 2, 3, 2, 0)).unwrap();
        assert_eq!(t.download_qubit_equivalents, 24);
        assert!(t.is_correct());
    }

    #[test]
    fn capacity() {
        let config = ProtocolConfig::random(6, 2, 8, 1, 0);
        assert!(run_qspir(&config).unwrap_err().is_capacity());
        let sampled = run_qspir(&config.with_mode(Mode::Sample)).unwrap();
        assert_eq!(sampled.len(), 1);
        assert!(sampled[0].is_correct());
        assert_eq!(branch_exponent(5, 2), 10);
    }

    #[test]
    fn three_server_shape_is_enforced() {
        assert!(run_qspir_three_server(&ProtocolConfig::random(4, 2, 1, 1, 0)).is_err());
        assert!(run_qspir_three_server(&ProtocolConfig::random(3, 2, 2, 1, 0)).is_err());
    }

    #[test]
    fn transcript_json_shape() {
        let t = &run_qspir(&ProtocolConfig::random(3, 2, 1, 1, 9)).unwrap()[0];
        let v = t.to_json();
        assert_eq!(v["branch_probability"], "0.25");
        assert_eq!(v["branch_probability_exact"], "1/4");
        assert!(v["queries"].as_array().unwrap().iter().all(|q| q.is_u64()));
        assert_eq!(v["middle_outcomes"][0][0].as_array().unwrap().len(), 2);
        assert_eq!(v["config"]["backend"], "frame");
    }
}
