//! Interprets a [`BlockProgram`] on either backend, enumerating or sampling
//! measurement branches.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::Backend;
use super::frame::{BellLink, FrameOutcome, FrameState};
use super::program::{BlockProgram, Step};
use crate::pauli::WeylLabel;
use crate::state::{QuantumRegister, QubitId, C64};
use crate::{Error, Result};

/// A branch probability, with its exact value `4^-m` when the backend knows it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchProbability {
    pub value: f64,
    pub quarter_power: Option<u32>,
}

impl BranchProbability {
    pub const ONE: BranchProbability = BranchProbability {
        value: 1.0,
        quarter_power: Some(0),
    };

    pub const QUARTER: BranchProbability = BranchProbability {
        value: 0.25,
        quarter_power: Some(1),
    };

    pub fn approximate(value: f64) -> Self {
        BranchProbability {
            value,
            quarter_power: None,
        }
    }

    pub fn times(self, other: BranchProbability) -> BranchProbability {
        BranchProbability {
            value: self.value * other.value,
            quarter_power: self
                .quarter_power
                .zip(other.quarter_power)
                .map(|(a, b)| a + b),
        }
    }

    pub fn exact(&self) -> Option<BigRational> {
        self.quarter_power.map(|m| {
            let denom = BigUint::one() << (2 * m as usize);
            BigRational::new(1.into(), denom.into())
        })
    }
}

impl fmt::Display for BranchProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}", self.value),
        }
    }
}

/// What the user holds at the end of the download phase of one block.
#[derive(Debug, Clone)]
pub struct BlockView {
    /// The transmitted qubits, in the program's view order.
    pub quantum: QuantumRegister,
    /// The classical registers, in the program's view order.
    pub classical: Vec<WeylLabel>,
    /// The Bell links still alive, on the frame backend only.
    pub links: Option<Vec<BellLink>>,
}

#[derive(Debug, Clone)]
pub struct BlockBranch {
    pub slots: Vec<WeylLabel>,
    pub probability: BranchProbability,
    pub correction: Option<WeylLabel>,
    pub output: WeylLabel,
    pub view: Option<BlockView>,
}

/// Enumerate every branch, or follow one sampled branch.
pub enum Exec<'a> {
    Enumerate,
    Sample(&'a mut ChaCha8Rng),
}

trait Machine: Clone + Sized {
    fn prepare(pairs: &[(QubitId, QubitId)]) -> Result<Self>;
    fn apply(&mut self, q: &QubitId, label: WeylLabel) -> Result<()>;
    fn measure(
        &self,
        first: &QubitId,
        second: &QubitId,
    ) -> Result<Vec<(WeylLabel, BranchProbability, Self)>>;
    fn view(&self, order: &[QubitId]) -> Result<QuantumRegister>;
    fn links(&self) -> Option<Vec<BellLink>>;

    fn measure_sampled(
        &self,
        first: &QubitId,
        second: &QubitId,
        rng: &mut ChaCha8Rng,
    ) -> Result<(WeylLabel, BranchProbability, Self)> {
        let branches = self.measure(first, second)?;
        let probs: Vec<f64> = branches.iter().map(|b| b.1.value).collect();
        let k = pick_index(&probs, rng);
        Ok(branches
            .into_iter()
            .nth(k)
            .expect("index from the same list"))
    }
}

/// Dense backend: separate registers for unentangled groups, merged on demand.
#[derive(Clone)]
struct DenseMachine {
    parts: Vec<QuantumRegister>,
    /// Scalar left behind by fully measured parts.
    phase: C64,
}

impl DenseMachine {
    fn part_of(&self, q: &QubitId) -> Result<usize> {
        self.parts
            .iter()
            .position(|p| p.contains(q))
            .ok_or_else(|| Error::UnknownQubit(q.to_string()))
    }
}

impl Machine for DenseMachine {
    fn prepare(pairs: &[(QubitId, QubitId)]) -> Result<Self> {
        let mut all = Vec::new();
        for (a, b) in pairs {
            all.push(a.clone());
            all.push(b.clone());
        }
        crate::state::check_unique(&all)?;
        let parts = pairs
            .iter()
            .map(|(a, b)| QuantumRegister::make_bell_pair(a.clone(), b.clone()))
            .collect::<Result<_>>()?;
        Ok(DenseMachine {
            parts,
            phase: C64::new(1.0, 0.0),
        })
    }

    fn apply(&mut self, q: &QubitId, label: WeylLabel) -> Result<()> {
        let i = self.part_of(q)?;
        self.parts[i].apply_weyl_mut(q, label.unsigned())
    }

    fn measure(
        &self,
        first: &QubitId,
        second: &QubitId,
    ) -> Result<Vec<(WeylLabel, BranchProbability, Self)>> {
        let i = self.part_of(first)?;
        let j = self.part_of(second)?;
        let mut rest = self.clone();
        let joint = if i == j {
            rest.parts.remove(i)
        } else {
            let (hi, lo) = (i.max(j), i.min(j));
            let b = rest.parts.remove(hi);
            let a = rest.parts.remove(lo);
            a.tensor(&b)?
        };
        let mut out = Vec::new();
        for branch in joint.bell_pvm_outcomes(first, second)? {
            let Some(post) = branch.post_state else {
                continue;
            };
            let mut next = rest.clone();
            if post.num_qubits() == 0 {
                next.phase *= post.amplitudes()[0];
            } else {
                next.parts.push(post);
            }
            out.push((
                branch.outcome,
                BranchProbability::approximate(branch.probability),
                next,
            ));
        }
        Ok(out)
    }

    fn view(&self, order: &[QubitId]) -> Result<QuantumRegister> {
        let mut reg = QuantumRegister::empty();
        for p in &self.parts {
            reg = reg.tensor(p)?;
        }
        let reg = reg.permuted(order)?;
        let amplitudes = reg.amplitudes().iter().map(|a| a * self.phase).collect();
        QuantumRegister::new(reg.qubits().to_vec(), amplitudes)
    }

    fn links(&self) -> Option<Vec<BellLink>> {
        None
    }
}

impl Machine for FrameState {
    fn prepare(pairs: &[(QubitId, QubitId)]) -> Result<Self> {
        FrameState::new(pairs)
    }

    fn apply(&mut self, q: &QubitId, label: WeylLabel) -> Result<()> {
        FrameState::apply(self, q, label.unsigned())
    }

    fn measure(
        &self,
        first: &QubitId,
        second: &QubitId,
    ) -> Result<Vec<(WeylLabel, BranchProbability, Self)>> {
        Ok(match FrameState::measure(self, first, second)? {
            FrameOutcome::Deterministic(g, next) => vec![(g, BranchProbability::ONE, next)],
            FrameOutcome::Uniform(all) => all
                .into_iter()
                .map(|(g, next)| (g, BranchProbability::QUARTER, next))
                .collect(),
        })
    }

    fn view(&self, order: &[QubitId]) -> Result<QuantumRegister> {
        self.to_register(order)
    }

    fn links(&self) -> Option<Vec<BellLink>> {
        Some(FrameState::links(self).to_vec())
    }

    fn measure_sampled(
        &self,
        first: &QubitId,
        second: &QubitId,
        rng: &mut ChaCha8Rng,
    ) -> Result<(WeylLabel, BranchProbability, Self)> {
        let (g, deterministic, next) = self.measure_one(first, second, |p| pick_index(p, rng))?;
        let p = if deterministic {
            BranchProbability::ONE
        } else {
            BranchProbability::QUARTER
        };
        Ok((g, p, next))
    }
}

/// Runs one block of `program` with the servers' answers `answers[t-1] = H_t`.
///
/// Branches come out in canonical order: outcome labels in `(0,0) < (0,1) <
/// (1,0) < (1,1)` order, earlier measurements varying slowest. With
/// `capture_view` each branch carries the user's state at the checkpoint.
pub fn execute_block(
    program: &BlockProgram,
    answers: &[WeylLabel],
    backend: Backend,
    exec: Exec<'_>,
    capture_view: bool,
) -> Result<Vec<BlockBranch>> {
    if answers.len() != program.n_servers {
        return Err(Error::InvalidConfig(format!(
            "{} answers for {} servers",
            answers.len(),
            program.n_servers
        )));
    }
    let mut run = Run {
        program,
        answers,
        exec,
        capture_view,
        out: Vec::new(),
    };
    let slots = vec![None; program.slots.len()];
    match backend {
        Backend::Dense => {
            let m = DenseMachine::prepare(&program.bell_pairs)?;
            run.walk(0, m, slots, BranchProbability::ONE, None)?;
        }
        Backend::Frame => {
            let m = FrameState::prepare(&program.bell_pairs)?;
            run.walk(0, m, slots, BranchProbability::ONE, None)?;
        }
    }
    Ok(run.out)
}

struct Run<'a, 'r> {
    program: &'a BlockProgram,
    answers: &'a [WeylLabel],
    exec: Exec<'r>,
    capture_view: bool,
    out: Vec<BlockBranch>,
}

impl Run<'_, '_> {
    fn walk<M: Machine>(
        &mut self,
        from: usize,
        mut machine: M,
        mut slots: Vec<Option<WeylLabel>>,
        probability: BranchProbability,
        mut view: Option<BlockView>,
    ) -> Result<()> {
        let steps = &self.program.steps;
        for pc in from..steps.len() {
            match &steps[pc] {
                Step::Apply { qubit, label, .. } => {
                    machine.apply(qubit, label.eval(self.answers, &slots))?;
                }
                Step::Send { label, slot, .. } => {
                    slots[*slot] = Some(label.eval(self.answers, &slots));
                }
                Step::Checkpoint => {
                    if self.capture_view {
                        let order: Vec<QubitId> = self
                            .program
                            .transmitted
                            .iter()
                            .map(|t| t.qubit.clone())
                            .collect();
                        let classical = self
                            .program
                            .slots
                            .iter()
                            .zip(&slots)
                            .filter(|(k, _)| matches!(k, super::program::SlotKind::Classical(_)))
                            .map(|(_, v)| v.expect("classical message sent before checkpoint"))
                            .collect();
                        view = Some(BlockView {
                            quantum: machine.view(&order)?,
                            classical,
                            links: machine.links(),
                        });
                    }
                }
                Step::Measure {
                    first,
                    second,
                    slot,
                    ..
                } => {
                    let chosen = match &mut self.exec {
                        Exec::Enumerate => machine.measure(first, second)?,
                        Exec::Sample(rng) => vec![machine.measure_sampled(first, second, rng)?],
                    };
                    for (g, p, next) in chosen {
                        let mut s = slots.clone();
                        s[*slot] = Some(g);
                        self.walk(pc + 1, next, s, probability.times(p), view.clone())?;
                    }
                    return Ok(());
                }
            }
        }
        let correction = self
            .program
            .correction
            .as_ref()
            .map(|c| c.eval(self.answers, &slots));
        let output = self.program.output.eval(self.answers, &slots);
        self.out.push(BlockBranch {
            slots: slots
                .into_iter()
                .map(|s| s.expect("every slot is written by the end of the block"))
                .collect(),
            probability,
            correction,
            output,
            view,
        });
        Ok(())
    }
}

/// Index drawn with weights `probs`, using one uniform variate. A lone
/// branch draws nothing, so both backends consume the stream alike.
fn pick_index(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    if probs.len() == 1 {
        return 0;
    }
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let last = probs.len() - 1;
    for (i, &p) in probs[..last].iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    last
}
