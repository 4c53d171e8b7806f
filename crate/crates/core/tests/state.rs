//! Properties of the dense simulator: measurement completeness, partial
//! traces, entropies and sampling.

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use qspir::pauli::WeylLabel;
use qspir::secrecy::{reduced_first, reduced_state_bound};
use qspir::state::random::{haar_state, haar_unitary, haar_vector};
use qspir::state::{
    holevo_information, trace_distance, von_neumann_entropy, DensityMatrix, QuantumRegister, C64,
};

fn names(n: usize) -> Vec<qspir::state::QubitId> {
    (0..n).map(|i| q(&format!("q{i}"))).collect()
}

fn binary_entropy(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bell_pvm_is_complete(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qs = names(n);
        let psi = haar_state(qs.clone(), &mut rng).unwrap();
        let branches = psi.bell_pvm_outcomes(&qs[0], &qs[n - 1]).unwrap();
        prop_assert_eq!(branches.len(), 4);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);

        // Averaging the post-measurement states recovers the reduced state.
        let rest: Vec<_> = qs[1..n - 1].to_vec();
        let reduced = DensityMatrix::from_pure(&psi).partial_trace(&rest).unwrap();
        let mut avg = DMatrix::<C64>::zeros(reduced.dim(), reduced.dim());
        for b in &branches {
            if let Some(post) = &b.post_state {
                avg += DensityMatrix::from_pure(post).matrix() * C64::new(b.probability, 0.0);
            }
        }
        let diff = (avg - reduced.matrix()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn staged_partial_trace(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qs = names(4);
        let rho = DensityMatrix::from_pure(&haar_state(qs.clone(), &mut rng).unwrap());
        let direct = rho.partial_trace(&[qs[1].clone(), qs[3].clone()]).unwrap();
        let staged = rho
            .partial_trace(&[qs[1].clone(), qs[2].clone(), qs[3].clone()])
            .unwrap()
            .partial_trace(&[qs[1].clone(), qs[3].clone()])
            .unwrap();
        prop_assert!(direct.max_abs_diff(&staged).unwrap() < 1e-12);
        prop_assert!((direct.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qs = names(3);
        let rho = DensityMatrix::from_pure(&haar_state(qs.clone(), &mut rng).unwrap())
            .partial_trace(&qs[..2])
            .unwrap();
        let u = haar_unitary(4, &mut rng);
        let s = von_neumann_entropy(&rho).unwrap();
        let t = von_neumann_entropy(&rho.conjugate(&u).unwrap()).unwrap();
        prop_assert!((s - t).abs() < 1e-9);
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&s));

        // Both halves of a pure state carry the same entropy.
        let other = DensityMatrix::from_pure(&haar_state(qs.clone(), &mut rng).unwrap());
        let a = von_neumann_entropy(&other.partial_trace(&qs[..1]).unwrap()).unwrap();
        let bc = von_neumann_entropy(&other.partial_trace(&qs[1..]).unwrap()).unwrap();
        prop_assert!((a - bc).abs() < 1e-9);
    }

    #[test]
    fn reduced_first_matches_partial_trace(seed in any::<u64>(), a in 1usize..=3, b in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d1, d2) = (1usize << a, 1usize << b);
        let psi = haar_vector(d1 * d2, &mut rng);
        let reg = QuantumRegister::new(names(a + b), psi.clone()).unwrap();
        let want = DensityMatrix::from_pure(&reg).partial_trace(&names(a)).unwrap();
        let got = reduced_first(&psi, d1, d2).unwrap();
        let diff = (got - want.matrix()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-12);
    }
}

#[test]
fn reduced_state_bound_on_random_states() {
    let out = proposition4();
    assert!(out.pass, "{}", out.detail);
}

#[test]
fn reduced_state_bound_extremes() {
    // Maximally entangled: equality. Product: Tr ρ^s = 1.
    for d in 2..=8usize {
        let mut psi = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            psi[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        for s in [0.25, 0.5, 0.75] {
            let bound = reduced_state_bound(&psi, d, d, s).unwrap();
            assert!(bound.slack().abs() < 1e-9, "d={d} s={s}");
            assert!((bound.rhs - (d as f64).powf(1.0 - s)).abs() < 1e-12);
        }
        let mut product = vec![C64::new(0.0, 0.0); d * (d + 1)];
        product[0] = C64::new(1.0, 0.0);
        let bound = reduced_state_bound(&product, d, d + 1, 0.5).unwrap();
        assert!((bound.lhs - 1.0).abs() < 1e-12);
    }
    let psi = vec![C64::new(0.5, 0.0); 4];
    assert!(reduced_state_bound(&psi, 2, 2, 1.0).is_err());
    assert!(reduced_state_bound(&psi, 2, 2, 0.0).is_err());
}

#[test]
fn entropy_examples() {
    let (a, b, c) = (q("a"), q("b"), q("c"));
    let zero = QuantumRegister::basis(vec![a.clone()], &[0]).unwrap();
    let one = QuantumRegister::basis(vec![a.clone()], &[1]).unwrap();
    let plus = QuantumRegister::new(
        vec![a.clone()],
        vec![C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2],
    )
    .unwrap();
    let pure = |r: &QuantumRegister| DensityMatrix::from_pure(r);

    assert!(von_neumann_entropy(&pure(&plus)).unwrap().abs() < 1e-12);
    let mixed = DensityMatrix::maximally_mixed(vec![a.clone()]).unwrap();
    assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
    let quarter = DensityMatrix::diagonal(vec![a.clone(), b.clone()], &[0.25; 4]).unwrap();
    assert!((von_neumann_entropy(&quarter).unwrap() - 2.0).abs() < 1e-12);

    let same = holevo_information(&[(0.5, pure(&plus)), (0.5, pure(&plus))]).unwrap();
    assert!(same.abs() < 1e-12);
    let orthogonal = holevo_information(&[(0.5, pure(&zero)), (0.5, pure(&one))]).unwrap();
    assert!((orthogonal - 1.0).abs() < 1e-12);
    // The average of |0⟩⟨0| and |+⟩⟨+| has eigenvalues cos²(π/8), sin²(π/8).
    let overlap = holevo_information(&[(0.5, pure(&zero)), (0.5, pure(&plus))]).unwrap();
    let want = binary_entropy((std::f64::consts::PI / 8.0).cos().powi(2));
    assert!((overlap - want).abs() < 1e-12);
    assert!((overlap - 0.6009).abs() < 1e-4);

    assert!((trace_distance(&pure(&zero), &pure(&one)).unwrap() - 1.0).abs() < 1e-12);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    assert!((trace_distance(&pure(&zero), &pure(&plus)).unwrap() - half).abs() < 1e-12);

    let h = C64::new(half, 0.0);
    let o = C64::new(0.0, 0.0);
    let ghz =
        QuantumRegister::new(vec![a.clone(), b.clone(), c], vec![h, o, o, o, o, o, o, h]).unwrap();
    let reduced = DensityMatrix::from_pure(&ghz)
        .partial_trace(&[a, b])
        .unwrap();
    let want = DensityMatrix::diagonal(reduced.qubits().to_vec(), &[0.5, 0.0, 0.0, 0.5]).unwrap();
    assert!(reduced.max_abs_diff(&want).unwrap() < 1e-12);
}

#[test]
fn bell_pair_and_weyl_examples() {
    let (a, b) = (q("a"), q("b"));
    let phi = QuantumRegister::make_bell_pair(a.clone(), b.clone()).unwrap();
    let half = DensityMatrix::from_pure(&phi)
        .partial_trace(&[a.clone()])
        .unwrap();
    let mixed = DensityMatrix::maximally_mixed(vec![a.clone()]).unwrap();
    assert!(half.max_abs_diff(&mixed).unwrap() < 1e-12);

    let flipped = phi.apply_weyl(&b, WeylLabel::new(1, 0).unsigned()).unwrap();
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let o = C64::new(0.0, 0.0);
    assert!(max_diff(flipped.amplitudes(), &[o, h, h, o]) < 1e-15);
    let z = WeylLabel::new(0, 1).unsigned();
    let back = phi.apply_weyl(&a, z).unwrap().apply_weyl(&a, z).unwrap();
    assert!(max_diff(back.amplitudes(), phi.amplitudes()) < 1e-15);
}

#[test]
fn sampling_frequencies_follow_born_probabilities() {
    let (a, b) = (q("a"), q("b"));
    let reg = QuantumRegister::basis(vec![a.clone(), b.clone()], &[0, 0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts = [0u32; 4];
    let samples = 100_000;
    for _ in 0..samples {
        let (outcome, rest) = reg.sample_bell_pvm_with(&a, &b, &mut rng).unwrap();
        assert_eq!(rest.num_qubits(), 0);
        counts[outcome.bits() as usize] += 1;
    }
    let freq = |l: WeylLabel| counts[l.bits() as usize] as f64 / samples as f64;
    assert!((freq(WeylLabel::new(0, 0)) - 0.5).abs() < 0.01);
    assert!((freq(WeylLabel::new(0, 1)) - 0.5).abs() < 0.01);
    assert_eq!(freq(WeylLabel::new(1, 0)) + freq(WeylLabel::new(1, 1)), 0.0);

    let phi = QuantumRegister::make_bell_pair(a.clone(), b.clone()).unwrap();
    for seed in 0..5 {
        let x = phi.sample_bell_pvm(&a, &b, seed).unwrap();
        let y = phi.sample_bell_pvm(&a, &b, seed).unwrap();
        assert_eq!(x.0, WeylLabel::I);
        assert_eq!(x.0, y.0);
    }
}

#[test]
fn register_errors() {
    let a = q("a");
    assert!(QuantumRegister::make_bell_pair(a.clone(), a.clone()).is_err());
    let reg = QuantumRegister::basis(vec![a.clone()], &[0]).unwrap();
    assert!(reg
        .apply_weyl(&q("missing"), WeylLabel::I.unsigned())
        .is_err());
    assert!(QuantumRegister::new(vec![a], vec![C64::new(1.0, 0.0); 2]).is_err());
    assert!(QuantumRegister::basis(names(25), &[0; 25])
        .unwrap_err()
        .is_capacity());
}
