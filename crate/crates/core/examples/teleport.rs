//! Teleportation while the receiver applies an operation: whatever the sender
//! measures, the receiver ends up with `W(c,d)` applied to the payload, up to
//! a known sign.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qspir::pauli::WeylLabel;
use qspir::protocol::{teleport_branches, teleport_with_operation, StepOrder};
use qspir::state::random::haar_state;
use qspir::state::QubitId;

fn main() -> qspir::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // A payload entangled with a reference qubit the receiver never touches.
    let (reference, payload) = (QubitId::new("R"), QubitId::new("Y"));
    let input = haar_state(vec![reference, payload.clone()], &mut rng)?;
    let cd = WeylLabel::XZ;
    let target = input.apply_weyl(&payload, cd.unsigned())?;

    for b in teleport_branches(&input, &payload, cd, StepOrder::OperationFirst)? {
        let (a, bb, c, d) = (b.outcome.a(), b.outcome.b(), cd.a(), cd.b());
        let sign = (a & bb) ^ (bb & c) ^ (a & d);
        let expected = if sign == 1 {
            target.negated()
        } else {
            target.clone()
        };
        println!(
            "outcome {}  p = {:.3}  sign (-1)^{sign}  max deviation {:.1e}",
            b.outcome,
            b.probability,
            b.post_correction.max_abs_diff(&expected)?
        );
    }

    let (ab, out) = teleport_with_operation(&input, &payload, cd, 5)?;
    println!(
        "sampled run: outcome {ab}, equal to W(c,d)|y> up to sign: {}",
        out.phase_insensitive_diff(&target)? < 1e-12
    );
    Ok(())
}
