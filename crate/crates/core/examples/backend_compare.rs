//! Dense state vectors against Bell frames: same branches, same
//! probabilities, very different cost.
//!
//! `cargo run --release --example backend_compare`

use std::time::Instant;

use qspir::protocol::{run_qspir, Backend, Mode, ProtocolConfig};

fn main() -> qspir::Result<()> {
    let config = ProtocolConfig::random(4, 3, 1, 2, 99);
    let frame = run_qspir(&config.clone().with_backend(Backend::Frame))?;
    let dense = run_qspir(&config.clone().with_backend(Backend::Dense))?;
    let worst = frame
        .iter()
        .zip(&dense)
        .map(|(a, b)| (a.branch_probability - b.branch_probability).abs())
        .fold(0.0, f64::max);
    let same = frame
        .iter()
        .zip(&dense)
        .all(|(a, b)| a.middle_outcomes == b.middle_outcomes && a.outcome == b.outcome);
    println!(
        "N=4: {} branches each, same outcomes {same}, max probability gap {worst:.1e}",
        frame.len()
    );

    let big = ProtocolConfig::random(6, 2, 8, 1, 3).with_mode(Mode::Sample);
    let time = |backend| -> qspir::Result<f64> {
        let start = Instant::now();
        for seed in 0..20 {
            run_qspir(&big.clone().with_backend(backend).with_seed(seed))?;
        }
        Ok(start.elapsed().as_secs_f64() / 20.0)
    };
    let (tf, td) = (time(Backend::Frame)?, time(Backend::Dense)?);
    println!(
        "N=6, 8 blocks, sampled: frame {:.1} us, dense {:.1} us, ratio {:.0}x",
        tf * 1e6,
        td * 1e6,
        td / tf
    );
    Ok(())
}
