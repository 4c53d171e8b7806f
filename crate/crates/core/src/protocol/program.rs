//! Per-block step programs.
//!
//! Blocks never interact, so a run is `ℓ` independent copies of one small
//! program: which Bell pairs exist, who applies which Weyl operator, who
//! measures what, and what the user receives. Both backends interpret the
//! same program, which keeps them comparable step for step.

use serde::Serialize;

use super::config::Variant;
use crate::pauli::WeylLabel;
use crate::state::QubitId;
use crate::{Error, Result};

/// Who performs a step. Server indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Actor {
    Server(usize),
    User,
}

/// What a measurement slot holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SlotKind {
    /// `G_t`, the Bell outcome at middle server `t`.
    Middle(usize),
    /// Output of the two-sum transmission for servers `(2j, 2j+1)`.
    TwoSum(usize),
    /// A classical message named by the register.
    Classical(String),
    /// The user's final outcome for the block.
    Output,
}

/// `Σ H_t (t ∈ answers) + Σ slot values`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LabelExpr {
    pub answers: Vec<usize>,
    pub slots: Vec<usize>,
}

impl LabelExpr {
    pub fn answer(t: usize) -> Self {
        LabelExpr {
            answers: vec![t],
            slots: vec![],
        }
    }

    pub fn slot(s: usize) -> Self {
        LabelExpr {
            answers: vec![],
            slots: vec![s],
        }
    }

    pub fn slots(slots: Vec<usize>) -> Self {
        LabelExpr {
            answers: vec![],
            slots,
        }
    }

    /// `answers[t-1]` is `H_t` for this block; unset slots are a logic error.
    pub fn eval(&self, answers: &[WeylLabel], slots: &[Option<WeylLabel>]) -> WeylLabel {
        let from_answers: WeylLabel = self.answers.iter().map(|&t| answers[t - 1]).sum();
        let from_slots: WeylLabel = self
            .slots
            .iter()
            .map(|&s| slots[s].expect("slot read before it was written"))
            .sum();
        from_answers + from_slots
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Step {
    /// `W(label)` on one qubit.
    Apply {
        actor: Actor,
        qubit: QubitId,
        label: LabelExpr,
    },
    /// Bell-basis measurement of `(first, second)`, outcome stored in `slot`.
    Measure {
        actor: Actor,
        first: QubitId,
        second: QubitId,
        slot: usize,
    },
    /// A 2-bit classical message to the user, also stored in `slot`.
    Send {
        actor: Actor,
        register: String,
        label: LabelExpr,
        slot: usize,
    },
    /// End of the download phase: the user now holds everything transmitted.
    Checkpoint,
}

impl Step {
    pub fn actor(&self) -> Option<Actor> {
        match self {
            Step::Apply { actor, .. } | Step::Measure { actor, .. } | Step::Send { actor, .. } => {
                Some(*actor)
            }
            Step::Checkpoint => None,
        }
    }
}

/// A qubit handed to the user, and the server that sends it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transmission {
    pub qubit: QubitId,
    pub server: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockProgram {
    pub n_servers: usize,
    pub block: usize,
    pub bell_pairs: Vec<(QubitId, QubitId)>,
    pub steps: Vec<Step>,
    pub slots: Vec<SlotKind>,
    /// Qubits the user receives, in view order.
    pub transmitted: Vec<Transmission>,
    /// Classical registers the user receives, in view order, with their senders.
    pub classical: Vec<(String, usize)>,
    /// The user's Weyl correction before decoding, if the program has one.
    pub correction: Option<LabelExpr>,
    pub output: LabelExpr,
}

/// Naming scheme for the qubits of block `p` (0-based).
pub fn qubit_name(system: &str, block: usize) -> QubitId {
    QubitId::new(format!("{system}_p{block}"))
}

/// Servers `(2j, 2j+1)` joined by a two-sum pair, for `j = 1..⌊N/2⌋-1`.
pub fn two_sum_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..(n / 2)).map(|j| (2 * j, 2 * j + 1)).collect()
}

impl BlockProgram {
    /// The retrieval protocol for `n` servers (or one of its broken variants).
    pub fn qspir(n: usize, block: usize, variant: Variant) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 servers, got {n}"
            )));
        }
        let name = |s: String| qubit_name(&s, block);
        let first = name("H1".into());
        let last = name(format!("H{n}"));
        let left = |t: usize| name(format!("H{t}L"));
        let right = |t: usize| name(format!("H{t}R"));
        let middle = |t: usize| name(format!("H{t}M"));

        // Chain H1 - H2L, H2R - H3L, ..., H(N-1)R - HN.
        let mut bell_pairs = Vec::new();
        let mut prev = first.clone();
        for t in 2..n {
            bell_pairs.push((prev, left(t)));
            prev = right(t);
        }
        bell_pairs.push((prev, last.clone()));
        let pairs = two_sum_pairs(n);
        for &(s, t) in &pairs {
            bell_pairs.push((middle(s), middle(t)));
        }

        let mut slots = Vec::new();
        let mut steps = Vec::new();
        let mut classical = Vec::new();
        let mut g_slot = vec![usize::MAX; n + 1];
        let paired = |t: usize| pairs.iter().any(|&(s, u)| s == t || u == t);

        for t in 1..=n {
            let actor = Actor::Server(t);
            if t == 1 || t == n {
                let qubit = if t == 1 { first.clone() } else { last.clone() };
                steps.push(Step::Apply {
                    actor,
                    qubit,
                    label: LabelExpr::answer(t),
                });
            } else {
                steps.push(Step::Apply {
                    actor,
                    qubit: left(t),
                    label: LabelExpr::answer(t),
                });
                g_slot[t] = slots.len();
                slots.push(SlotKind::Middle(t));
                steps.push(Step::Measure {
                    actor,
                    first: left(t),
                    second: right(t),
                    slot: g_slot[t],
                });
                if paired(t) {
                    steps.push(Step::Apply {
                        actor,
                        qubit: middle(t),
                        label: LabelExpr::slot(g_slot[t]),
                    });
                } else {
                    let register = format!("G{t}_p{block}");
                    let slot = slots.len();
                    slots.push(SlotKind::Classical(register.clone()));
                    steps.push(Step::Send {
                        actor,
                        register: register.clone(),
                        label: LabelExpr::slot(g_slot[t]),
                        slot,
                    });
                    classical.push((register, t));
                }
            }
            if t == 2 && variant == Variant::ClearH2 {
                let register = format!("H2clear_p{block}");
                let slot = slots.len();
                slots.push(SlotKind::Classical(register.clone()));
                steps.push(Step::Send {
                    actor,
                    register: register.clone(),
                    label: LabelExpr::answer(2),
                    slot,
                });
                classical.push((register, 2));
            }
        }
        steps.push(Step::Checkpoint);

        let mut correction_slots = Vec::new();
        for (j, &(s, t)) in pairs.iter().enumerate() {
            let slot = slots.len();
            slots.push(SlotKind::TwoSum(j + 1));
            steps.push(Step::Measure {
                actor: Actor::User,
                first: middle(s),
                second: middle(t),
                slot,
            });
            correction_slots.push(slot);
        }
        for (i, kind) in slots.iter().enumerate() {
            if let SlotKind::Classical(reg) = kind {
                if reg.starts_with('G') {
                    correction_slots.push(i);
                }
            }
        }
        let correction = if variant == Variant::SkipUserCorrection {
            None
        } else {
            let expr = LabelExpr::slots(correction_slots);
            steps.push(Step::Apply {
                actor: Actor::User,
                qubit: last.clone(),
                label: expr.clone(),
            });
            Some(expr)
        };
        let out = slots.len();
        slots.push(SlotKind::Output);
        steps.push(Step::Measure {
            actor: Actor::User,
            first: first.clone(),
            second: last.clone(),
            slot: out,
        });

        let mut transmitted = vec![Transmission {
            qubit: first,
            server: 1,
        }];
        for &(s, t) in &pairs {
            transmitted.push(Transmission {
                qubit: middle(s),
                server: s,
            });
            transmitted.push(Transmission {
                qubit: middle(t),
                server: t,
            });
        }
        transmitted.push(Transmission {
            qubit: last,
            server: n,
        });

        Ok(BlockProgram {
            n_servers: n,
            block,
            bell_pairs,
            steps,
            slots,
            transmitted,
            classical,
            correction,
            output: LabelExpr::slot(out),
        })
    }

    /// Classical XOR retrieval: every server sends its answer in the clear.
    pub fn classical(n: usize, block: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 servers, got {n}"
            )));
        }
        let mut steps = Vec::new();
        let mut slots = Vec::new();
        let mut classical = Vec::new();
        for t in 1..=n {
            let register = format!("H{t}_p{block}");
            steps.push(Step::Send {
                actor: Actor::Server(t),
                register: register.clone(),
                label: LabelExpr::answer(t),
                slot: slots.len(),
            });
            slots.push(SlotKind::Classical(register.clone()));
            classical.push((register, t));
        }
        steps.push(Step::Checkpoint);
        Ok(BlockProgram {
            n_servers: n,
            block,
            bell_pairs: Vec::new(),
            steps,
            output: LabelExpr::slots((0..n).collect()),
            slots,
            transmitted: Vec::new(),
            classical,
            correction: None,
        })
    }

    /// The same program with the download-phase servers acting in `order`
    /// (a permutation of `1..=N`). Each server's own steps keep their order.
    pub fn with_server_order(&self, order: &[usize]) -> Result<Self> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=self.n_servers).collect::<Vec<_>>() {
            return Err(Error::InvalidConfig(format!(
                "{order:?} is not a permutation of the servers"
            )));
        }
        let checkpoint = self
            .steps
            .iter()
            .position(|s| *s == Step::Checkpoint)
            .expect("every program has a checkpoint");
        let mut download: Vec<Step> = self.steps[..checkpoint].to_vec();
        let rank = |s: &Step| match s.actor() {
            Some(Actor::Server(t)) => order.iter().position(|&o| o == t).unwrap(),
            _ => usize::MAX,
        };
        download.sort_by_key(rank);
        download.extend_from_slice(&self.steps[checkpoint..]);
        Ok(BlockProgram {
            steps: download,
            ..self.clone()
        })
    }

    /// Qubits sent per block.
    pub fn downloaded_qubits(&self) -> u64 {
        self.transmitted.len() as u64
    }

    /// Classical bits sent per block.
    pub fn downloaded_cbits(&self) -> u64 {
        2 * self.classical.len() as u64
    }

    /// Number of Bell measurements made per block.
    pub fn measurements(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Measure { .. }))
            .count()
    }

    /// Transmitted qubits and classical registers sent by servers other than `t`.
    pub fn complement_of(&self, t: usize) -> (Vec<QubitId>, Vec<String>) {
        (
            self.transmitted
                .iter()
                .filter(|x| x.server != t)
                .map(|x| x.qubit.clone())
                .collect(),
            self.classical
                .iter()
                .filter(|(_, s)| *s != t)
                .map(|(r, _)| r.clone())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[Transmission]) -> Vec<String> {
        v.iter().map(|x| x.qubit.to_string()).collect()
    }

    #[test]
    fn two_servers_share_one_pair() {
        let p = BlockProgram::qspir(2, 0, Variant::Qspir).unwrap();
        assert_eq!(
            p.bell_pairs,
            vec![(qubit_name("H1", 0), qubit_name("H2", 0))]
        );
        assert_eq!(p.downloaded_qubits() + p.downloaded_cbits(), 2);
        assert_eq!(p.measurements(), 1);
    }

    #[test]
    fn layouts() {
        let p = BlockProgram::qspir(4, 1, Variant::Qspir).unwrap();
        assert_eq!(p.bell_pairs.len(), 4);
        assert_eq!(
            names(&p.transmitted),
            ["H1_p1", "H2M_p1", "H3M_p1", "H4_p1"]
        );
        assert!(p.classical.is_empty());

        let p = BlockProgram::qspir(5, 0, Variant::Qspir).unwrap();
        assert_eq!(p.bell_pairs.len(), 5);
        assert_eq!(p.classical, vec![("G4_p0".to_string(), 4)]);
        assert_eq!(p.downloaded_qubits(), 4);
        assert_eq!(p.downloaded_cbits(), 2);

        let p = BlockProgram::qspir(3, 0, Variant::Qspir).unwrap();
        assert_eq!(names(&p.transmitted), ["H1_p0", "H3_p0"]);
        assert_eq!(p.classical, vec![("G2_p0".to_string(), 2)]);
    }

    #[test]
    fn variants() {
        let skip = BlockProgram::qspir(3, 0, Variant::SkipUserCorrection).unwrap();
        assert!(skip.correction.is_none());
        let clear = BlockProgram::qspir(2, 0, Variant::ClearH2).unwrap();
        assert_eq!(clear.classical, vec![("H2clear_p0".to_string(), 2)]);
        let base = BlockProgram::classical(3, 0).unwrap();
        assert_eq!(base.downloaded_cbits(), 6);
        assert_eq!(base.complement_of(2).1, ["H1_p0", "H3_p0"]);
    }

    #[test]
    fn reordering() {
        let p = BlockProgram::qspir(4, 0, Variant::Qspir).unwrap();
        let r = p.with_server_order(&[4, 3, 2, 1]).unwrap();
        assert_eq!(r.steps[0].actor(), Some(Actor::Server(4)));
        assert_eq!(r.steps.len(), p.steps.len());
        assert!(p.with_server_order(&[1, 1, 2, 3]).is_err());
    }
}
