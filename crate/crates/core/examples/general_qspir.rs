//! The general N-server protocol on ℓ blocks: one sampled transcript as JSON,
//! then every branch enumerated.
//!
//! `cargo run --example general_qspir -- [N] [F] [BLOCKS] [K]`

use qspir::protocol::{run_qspir, Mode, ProtocolConfig};

fn main() -> qspir::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(5);
    let f = args.get(1).copied().unwrap_or(3);
    let blocks = args.get(2).copied().unwrap_or(2);
    let k = args.get(3).copied().unwrap_or(2);
    let config = ProtocolConfig::random(n, f, blocks, k, 7);

    let sample = run_qspir(&config.clone().with_mode(Mode::Sample))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&sample[0].to_json()).expect("json")
    );

    let all = run_qspir(&config)?;
    let total: f64 = all.iter().map(|t| t.branch_probability).sum();
    println!(
        "{} branches, total probability {total}, all correct: {}",
        all.len(),
        all.iter().all(|t| t.is_correct())
    );
    let t = &all[0];
    println!(
        "upload {} bits, download {} qubits + {} bits = {} qubit-equivalents",
        t.uploaded_bits, t.downloaded_qubits, t.downloaded_cbits, t.download_qubit_equivalents
    );
    Ok(())
}
