//! Bell-frame backend.
//!
//! Every state the protocol produces is a product of Bell pairs, each of the
//! form `(I ⊗ F)|Φ⟩` for a signed Weyl operator `F`. Tracking only `F` per
//! pair makes a Weyl operation a group multiplication and a Bell measurement
//! either a label readout (both halves of one pair) or an entanglement swap
//! (halves of two pairs), with no amplitudes at all.

use serde::Serialize;

use crate::pauli::{bell_transfer, compose, SignedWeyl, WeylLabel};
use crate::state::{QuantumRegister, QubitId};
use crate::{Error, Result};

/// The state `(I ⊗ frame)|Φ⟩` on `(endpoint_a, endpoint_b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BellLink {
    pub endpoint_a: QubitId,
    pub endpoint_b: QubitId,
    pub frame: SignedWeyl,
}

impl BellLink {
    pub fn new(endpoint_a: QubitId, endpoint_b: QubitId) -> Self {
        BellLink {
            endpoint_a,
            endpoint_b,
            frame: SignedWeyl::IDENTITY,
        }
    }

    pub fn with_frame(mut self, frame: SignedWeyl) -> Self {
        self.frame = frame;
        self
    }

    pub fn touches(&self, q: &QubitId) -> bool {
        self.endpoint_a == *q || self.endpoint_b == *q
    }

    /// The same state with the endpoints listed the other way round.
    pub fn flipped(&self) -> BellLink {
        BellLink {
            endpoint_a: self.endpoint_b.clone(),
            endpoint_b: self.endpoint_a.clone(),
            frame: bell_transfer(self.frame),
        }
    }

    /// Applies `op` to one endpoint.
    pub fn apply(&mut self, q: &QubitId, op: SignedWeyl) -> Result<()> {
        if *q == self.endpoint_b {
            self.frame = compose(op, self.frame);
        } else if *q == self.endpoint_a {
            // (op ⊗ F)|Φ⟩ = (I ⊗ F·transfer(op))|Φ⟩
            self.frame = compose(self.frame, bell_transfer(op));
        } else {
            return Err(Error::UnknownQubit(q.to_string()));
        }
        Ok(())
    }

    /// Dense amplitudes on `(endpoint_a, endpoint_b)`.
    pub fn to_register(&self) -> Result<QuantumRegister> {
        QuantumRegister::make_bell_pair(self.endpoint_a.clone(), self.endpoint_b.clone())?
            .apply_weyl(&self.endpoint_b, self.frame)
    }
}

/// Entanglement swap: a Bell measurement of `link1.endpoint_b` with
/// `link2.endpoint_a` giving `outcome` leaves `(link1.endpoint_a, link2.endpoint_b)`
/// in the returned link, exactly (sign included) after renormalization.
pub fn frame_swap_update(
    link1: &BellLink,
    link2: &BellLink,
    outcome: WeylLabel,
) -> Result<BellLink> {
    let ends = [&link1.endpoint_a, &link1.endpoint_b];
    if ends.contains(&&link2.endpoint_a) || ends.contains(&&link2.endpoint_b) {
        return Err(Error::EndpointMismatch(format!(
            "({}, {}) and ({}, {}) share a qubit",
            link1.endpoint_a, link1.endpoint_b, link2.endpoint_a, link2.endpoint_b
        )));
    }
    Ok(BellLink {
        endpoint_a: link1.endpoint_a.clone(),
        endpoint_b: link2.endpoint_b.clone(),
        frame: compose(link2.frame, compose(outcome.unsigned(), link1.frame)),
    })
}

/// All links of one block plus the global sign left by consumed links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameState {
    links: Vec<BellLink>,
    sign: bool,
}

/// Result of a Bell measurement on the frame backend.
pub enum FrameOutcome {
    /// Both halves of one link: the outcome is fixed.
    Deterministic(WeylLabel, FrameState),
    /// Halves of two links: each outcome has probability 1/4.
    Uniform(Vec<(WeylLabel, FrameState)>),
}

impl FrameState {
    pub fn new(pairs: &[(QubitId, QubitId)]) -> Result<Self> {
        let mut seen = Vec::new();
        for (a, b) in pairs {
            seen.push(a.clone());
            seen.push(b.clone());
        }
        crate::state::check_unique(&seen)?;
        Ok(FrameState {
            links: pairs
                .iter()
                .map(|(a, b)| BellLink::new(a.clone(), b.clone()))
                .collect(),
            sign: false,
        })
    }

    pub fn links(&self) -> &[BellLink] {
        &self.links
    }

    pub fn sign(&self) -> bool {
        self.sign
    }

    fn find(&self, q: &QubitId) -> Result<usize> {
        self.links
            .iter()
            .position(|l| l.touches(q))
            .ok_or_else(|| Error::UnknownQubit(q.to_string()))
    }

    pub fn apply(&mut self, q: &QubitId, op: SignedWeyl) -> Result<()> {
        let i = self.find(q)?;
        self.links[i].apply(q, op)
    }

    pub fn measure(&self, first: &QubitId, second: &QubitId) -> Result<FrameOutcome> {
        if first == second {
            return Err(Error::DuplicateQubit(first.to_string()));
        }
        let i = self.find(first)?;
        let j = self.find(second)?;
        if i == j {
            let link = &self.links[i];
            let oriented = if link.endpoint_a == *first {
                link.clone()
            } else {
                link.flipped()
            };
            let mut next = self.clone();
            next.links.remove(i);
            next.sign ^= oriented.frame.sign;
            return Ok(FrameOutcome::Deterministic(oriented.frame.label, next));
        }
        WeylLabel::ALL
            .iter()
            .map(|&g| Ok((g, self.swap(i, j, first, second, g)?)))
            .collect::<Result<Vec<_>>>()
            .map(FrameOutcome::Uniform)
    }

    /// Like [`FrameState::measure`] but builds only the branch `pick` selects
    /// from the outcome probabilities.
    pub fn measure_one(
        &self,
        first: &QubitId,
        second: &QubitId,
        pick: impl FnOnce(&[f64]) -> usize,
    ) -> Result<(WeylLabel, bool, FrameState)> {
        if first == second {
            return Err(Error::DuplicateQubit(first.to_string()));
        }
        let i = self.find(first)?;
        let j = self.find(second)?;
        if i == j {
            let FrameOutcome::Deterministic(g, next) = self.measure(first, second)? else {
                unreachable!("both halves of one link");
            };
            return Ok((g, true, next));
        }
        let g = WeylLabel::ALL[pick(&[0.25; 4])];
        Ok((g, false, self.swap(i, j, first, second, g)?))
    }

    fn swap(
        &self,
        i: usize,
        j: usize,
        first: &QubitId,
        second: &QubitId,
        g: WeylLabel,
    ) -> Result<FrameState> {
        let l1 = &self.links[i];
        let l1 = if l1.endpoint_b == *first {
            l1.clone()
        } else {
            l1.flipped()
        };
        let l2 = &self.links[j];
        let l2 = if l2.endpoint_a == *second {
            l2.clone()
        } else {
            l2.flipped()
        };
        let mut next = FrameState {
            links: Vec::with_capacity(self.links.len() - 1),
            sign: self.sign,
        };
        next.links.extend(
            self.links
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, l)| l.clone()),
        );
        next.links.push(frame_swap_update(&l1, &l2, g)?);
        Ok(next)
    }

    /// Dense amplitudes of the remaining links, listed in `order`.
    pub fn to_register(&self, order: &[QubitId]) -> Result<QuantumRegister> {
        let mut reg = QuantumRegister::empty();
        for link in &self.links {
            reg = reg.tensor(&link.to_register()?)?;
        }
        if self.sign {
            reg = reg.negated();
        }
        reg.permuted(order)
    }
}
