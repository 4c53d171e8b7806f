//! The three-server protocol for one block, written out on a four-qubit
//! register: server 2 swaps entanglement, the user corrects and reads out
//! `H_1 + H_2 + H_3`.

use qspir::pauli::WeylLabel;
use qspir::protocol::{run_qspir_three_server, three_server_branches, ProtocolConfig};

fn main() -> qspir::Result<()> {
    let h = [WeylLabel::X, WeylLabel::XZ, WeylLabel::Z];
    let sum: WeylLabel = h.iter().copied().sum();
    println!("answers {} {} {}, sum {sum}", h[0], h[1], h[2]);
    for b in three_server_branches(h)? {
        let outs: Vec<String> = b
            .outcomes
            .iter()
            .map(|(o, p)| format!("{o}: {p:.3}"))
            .collect();
        println!(
            "server 2 reads {} (p={:.2}) -> user sees {}",
            b.ab,
            b.probability,
            outs.join(", ")
        );
    }

    let config = ProtocolConfig::random(3, 4, 1, 3, 2024);
    let runs = run_qspir_three_server(&config)?;
    println!(
        "\nF=4, K=3: {} branches, all retrieve W_3 = {}: {}",
        runs.len(),
        config.target().get(0),
        runs.iter().all(|t| t.is_correct())
    );
    Ok(())
}
