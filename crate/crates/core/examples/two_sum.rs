//! Two senders share a Bell pair, each applies its own Weyl operator, and a
//! Bell measurement by the receiver reads out the sum of the two labels.

use qspir::pauli::WeylLabel;
use qspir::protocol::{two_sum_branches, two_sum_transmit};

fn main() -> qspir::Result<()> {
    for ab in WeylLabel::ALL {
        for cd in WeylLabel::ALL {
            let branches = two_sum_branches(ab, cd)?;
            let outcomes: Vec<String> = branches
                .iter()
                .map(|(o, p)| format!("{o} with p={p:.3}"))
                .collect();
            println!("{ab} + {cd}: {}", outcomes.join(", "));
        }
    }
    println!(
        "sampled: {}",
        two_sum_transmit(WeylLabel::X, WeylLabel::XZ, 3)?
    );
    Ok(())
}
