//! The verifiers catch deliberately broken protocols: a skipped correction
//! breaks retrieval, a leaky query reveals the index, and a cleartext answer
//! reveals other files.

use qspir::protocol::{Backend, Variant};
use qspir::secrecy::{error_measure, server_secrecy, user_secrecy, Cell, Scheme};

fn main() -> qspir::Result<()> {
    let cell = |n, f, v| Cell::new(n, f, 1).with_scheme(Scheme::Quantum(v));

    let honest = error_measure(&Cell::new(3, 2, 1), Backend::Frame)?;
    let skip = error_measure(&cell(3, 2, Variant::SkipUserCorrection), Backend::Frame)?;
    println!(
        "error probability: honest {}, skipped correction {}",
        honest.alpha_exact.unwrap(),
        skip.alpha_exact.unwrap()
    );

    let leaky = user_secrecy(&cell(3, 4, Variant::LeakyQuery))?;
    println!(
        "index leakage with a leaky first query, F=4: {} bits ({})",
        leaky.gamma_bits,
        leaky.gamma_exact.unwrap_or_default()
    );

    let clear = server_secrecy(&cell(2, 2, Variant::ClearH2))?;
    for b in &clear.per_pair {
        println!(
            "cleartext H_2: I(W_{}; view | K={}) = {} bits",
            b.i, b.k, b.bits
        );
    }
    Ok(())
}
