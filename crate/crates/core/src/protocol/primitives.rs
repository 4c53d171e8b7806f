//! The two building blocks of the retrieval protocol on the dense backend:
//! teleportation with an operation and two-sum transmission.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::pauli::WeylLabel;
use crate::state::{QuantumRegister, QubitId};
use crate::{Error, Result};

const SENDER_HALF: &str = "teleport.sender";
const RECEIVER_HALF: &str = "teleport.receiver";

/// Which of the receiver's operation and the sender's measurement happens first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOrder {
    OperationFirst,
    MeasurementFirst,
}

/// One measurement branch of teleportation with an operation.
#[derive(Debug, Clone)]
pub struct TeleportBranch {
    pub outcome: WeylLabel,
    pub probability: f64,
    /// Receiver's state before applying `W(outcome)`.
    pub pre_correction: QuantumRegister,
    /// Receiver's state after the correction.
    pub post_correction: QuantumRegister,
}

/// Teleports `payload` through a fresh Bell pair while the receiver applies
/// `W(cd)` to its half.
///
/// The returned registers list the same qubits as `input`; the receiver's
/// qubit takes over the payload's name so states compare directly.
pub fn teleport_branches(
    input: &QuantumRegister,
    payload: &QubitId,
    cd: WeylLabel,
    order: StepOrder,
) -> Result<Vec<TeleportBranch>> {
    let (joint, sender, receiver) = attach_pair(input, payload)?;
    let joint = match order {
        StepOrder::OperationFirst => joint.apply_weyl(&receiver, cd.unsigned())?,
        StepOrder::MeasurementFirst => joint,
    };
    let mut out = Vec::with_capacity(4);
    for branch in joint.bell_pvm_outcomes(payload, &sender)? {
        let Some(post) = branch.post_state else {
            continue;
        };
        let pre = match order {
            StepOrder::OperationFirst => post,
            StepOrder::MeasurementFirst => post.apply_weyl(&receiver, cd.unsigned())?,
        };
        let post = pre.apply_weyl(&receiver, branch.outcome.unsigned())?;
        out.push(TeleportBranch {
            outcome: branch.outcome,
            probability: branch.probability,
            pre_correction: restore(&pre, &receiver, payload, input)?,
            post_correction: restore(&post, &receiver, payload, input)?,
        });
    }
    Ok(out)
}

/// Runs one sampled branch; returns the sender's outcome and the receiver's
/// final state (named as in [`teleport_branches`]).
pub fn teleport_with_operation(
    input: &QuantumRegister,
    payload: &QubitId,
    cd: WeylLabel,
    rng_seed: u64,
) -> Result<(WeylLabel, QuantumRegister)> {
    let (joint, sender, receiver) = attach_pair(input, payload)?;
    let joint = joint.apply_weyl(&receiver, cd.unsigned())?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (ab, post) = joint.sample_bell_pvm_with(payload, &sender, &mut rng)?;
    let post = post.apply_weyl(&receiver, ab.unsigned())?;
    Ok((ab, restore(&post, &receiver, payload, input)?))
}

fn attach_pair(
    input: &QuantumRegister,
    payload: &QubitId,
) -> Result<(QuantumRegister, QubitId, QubitId)> {
    if !input.contains(payload) {
        return Err(Error::UnknownQubit(payload.to_string()));
    }
    let sender = QubitId::new(SENDER_HALF);
    let receiver = QubitId::new(RECEIVER_HALF);
    let pair = QuantumRegister::make_bell_pair(sender.clone(), receiver.clone())?;
    Ok((input.tensor(&pair)?, sender, receiver))
}

fn restore(
    state: &QuantumRegister,
    receiver: &QubitId,
    payload: &QubitId,
    input: &QuantumRegister,
) -> Result<QuantumRegister> {
    state
        .renamed(receiver, payload.clone())?
        .permuted(input.qubits())
}

/// `(outcome, probability)` for every possible branch of two-sum transmission
/// of `ab` and `cd`.
pub fn two_sum_branches(ab: WeylLabel, cd: WeylLabel) -> Result<Vec<(WeylLabel, f64)>> {
    let (first, second) = (
        QubitId::new("two-sum.first"),
        QubitId::new("two-sum.second"),
    );
    let pair = QuantumRegister::make_bell_pair(first.clone(), second.clone())?
        .apply_weyl(&first, ab.unsigned())?
        .apply_weyl(&second, cd.unsigned())?;
    Ok(pair
        .bell_pvm_outcomes(&first, &second)?
        .into_iter()
        .filter(|b| b.post_state.is_some())
        .map(|b| (b.outcome, b.probability))
        .collect())
}

/// The receiver's output of two-sum transmission: always `ab + cd`.
pub fn two_sum_transmit(ab: WeylLabel, cd: WeylLabel, rng_seed: u64) -> Result<WeylLabel> {
    let (first, second) = (
        QubitId::new("two-sum.first"),
        QubitId::new("two-sum.second"),
    );
    let pair = QuantumRegister::make_bell_pair(first.clone(), second.clone())?
        .apply_weyl(&first, ab.unsigned())?
        .apply_weyl(&second, cd.unsigned())?;
    Ok(pair.sample_bell_pvm(&first, &second, rng_seed)?.0)
}
