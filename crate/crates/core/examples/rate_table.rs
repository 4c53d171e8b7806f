//! Download rates of the quantum protocol and the classical XOR baseline,
//! and how the upload cost fades relative to the download as files grow.

use qspir::harness::{rate_table, strictly_decreasing, theta_trend};

fn main() -> qspir::Result<()> {
    println!(
        "{:>3} {:>9} {:>9} {:>9} {:>9}",
        "N", "quantum", "expected", "classical", "expected"
    );
    for r in rate_table(2..=7, 1)? {
        println!(
            "{:>3} {:>9} {:>9} {:>9} {:>9}",
            r.n,
            r.quantum.to_string(),
            r.quantum_expected.to_string(),
            r.classical.to_string(),
            r.classical_expected.to_string()
        );
    }

    let points = theta_trend(4, 2, 1..=16)?;
    println!("\nupload/download exponent ratio, N=4, F=2:");
    for p in &points {
        println!("  blocks {:>2}: {}", p.blocks, p.theta);
    }
    println!("strictly decreasing: {}", strictly_decreasing(&points));
    Ok(())
}
