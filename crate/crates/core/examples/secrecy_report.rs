//! Error probability, user secrecy and server secrecy for one cell.
//!
//! `cargo run --example secrecy_report -- [N] [F] [BLOCKS]`

use std::time::Instant;

use qspir::protocol::Backend;
use qspir::secrecy::{Cell, Checks, SecurityReport};

fn main() -> qspir::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(3);
    let f = args.get(1).copied().unwrap_or(2);
    let blocks = args.get(2).copied().unwrap_or(1);
    let cell = Cell::new(n, f, blocks);
    let start = Instant::now();
    let r = SecurityReport::measure(&cell, Checks::ALL, Backend::Frame)?;
    println!("N={n} F={f} blocks={blocks}");
    println!(
        "alpha  = {} (exact {})",
        r.alpha.unwrap(),
        r.alpha_exact.as_deref().unwrap_or("-")
    );
    println!("gamma  = {} bits", r.gamma.unwrap());
    println!("beta   = {} bits", r.beta.unwrap());
    println!(
        "state independence: max trace distance {}",
        r.lemma1_max_distance.unwrap()
    );
    for b in &r.per_pair_beta {
        println!("  I(W_{}; view | K={}) = {:.3e}", b.i, b.k, b.bits);
    }
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
