//! For a random pure state on `d1 × d2`, the reduced state satisfies
//! `Tr ρ₁ˢ ≤ min(d1, d2)^{1-s}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qspir::secrecy::reduced_state_bound;
use qspir::state::random::haar_vector;

fn main() -> qspir::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (d1, d2) in [(2, 2), (2, 8), (3, 5), (8, 8)] {
        let psi = haar_vector(d1 * d2, &mut rng);
        for s in [0.25, 0.5, 0.75] {
            let b = reduced_state_bound(&psi, d1, d2, s)?;
            println!(
                "{d1}x{d2} s={s}: Tr rho^s = {:.6} <= {:.6}  (slack {:.2e})",
                b.lhs,
                b.rhs,
                b.slack()
            );
        }
    }
    Ok(())
}
