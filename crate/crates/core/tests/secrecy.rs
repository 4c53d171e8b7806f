//! Secrecy verifiers on honest, baseline and deliberately broken schemes.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use common::*;
use qspir::protocol::{Backend, Variant};
use qspir::secrecy::{
    error_measure, grid, lemma1_check, lemma1_check_dense, server_secrecy, server_secrecy_dense,
    server_secrecy_filtered, user_secrecy, Cell, Checks, Scheme, SecurityReport, ViewFilter,
};

fn cell(n: usize, f: usize, blocks: usize, v: Variant) -> Cell {
    Cell::new(n, f, blocks).with_scheme(Scheme::Quantum(v))
}

fn base_name(name: &str) -> String {
    name.rsplit_once("_p")
        .map_or(name, |(base, _)| base)
        .to_string()
}

/// Every filter dropping one or two of the cell's systems.
fn filters(c: &Cell) -> Vec<ViewFilter> {
    let program = c.scheme.program(c.n, 0).unwrap();
    let mut systems: Vec<(bool, String)> = program
        .transmitted
        .iter()
        .map(|t| (true, base_name(t.qubit.name())))
        .collect();
    systems.extend(program.classical.iter().map(|(r, _)| (false, base_name(r))));
    let build = |picked: &[&(bool, String)]| {
        let mut f = ViewFilter::default();
        for (quantum, name) in picked {
            if *quantum {
                f.drop_qubits.push(name.clone());
            } else {
                f.drop_registers.push(name.clone());
            }
        }
        f
    };
    let mut out = Vec::new();
    for i in 0..systems.len() {
        out.push(build(&[&systems[i]]));
        for j in i + 1..systems.len() {
            out.push(build(&[&systems[i], &systems[j]]));
        }
    }
    out
}

#[test]
fn user_secrecy_on_the_grid() {
    let out = user_secrecy_check();
    assert!(out.pass, "{}", out.detail);
    for scheme in [
        Scheme::Quantum(Variant::Qspir),
        Scheme::Quantum(Variant::LeakyQuery),
    ] {
        for c in default_grid(scheme) {
            for e in user_secrecy(&c).unwrap().per_server {
                assert!(
                    (e.bits - e.holevo_bits).abs() < 1e-12,
                    "{c:?} server {}",
                    e.server
                );
            }
        }
    }
    // The leak sits in the first query, so only the coalition holding it learns K.
    let leaky = user_secrecy(&cell(3, 4, 1, Variant::LeakyQuery)).unwrap();
    assert_eq!(leaky.per_server[0].exact.as_deref(), Some("0"));
    assert!(leaky.per_server[1..]
        .iter()
        .all(|e| e.exact.as_deref() == Some("log2(4)") && e.bits == 2.0));
}

#[test]
fn server_secrecy_holds_and_cleartext_leaks() {
    for c in grid(&NS, &FS, &[1], Scheme::Quantum(Variant::Qspir)) {
        let r = server_secrecy(&c).unwrap();
        assert_eq!(r.per_pair.len(), c.f * (c.f - 1));
        assert!(r.beta_bits <= 1e-9, "{c:?}: {}", r.beta_bits);
    }
    for n in 2..=4 {
        let leak = server_secrecy(&cell(n, 2, 1, Variant::ClearH2)).unwrap();
        assert!(leak.beta_bits > 0.1, "N={n}: {}", leak.beta_bits);
    }
}

#[test]
fn classical_baseline_leaks_other_files() {
    let r = server_secrecy(&Cell::new(3, 2, 1).with_scheme(Scheme::Classical)).unwrap();
    assert!(r.beta_bits > 0.1, "{}", r.beta_bits);
    let alpha = error_measure(
        &Cell::new(3, 2, 1).with_scheme(Scheme::Classical),
        Backend::Frame,
    )
    .unwrap();
    assert_eq!(alpha.alpha_exact, Some(BigRational::zero()));
}

#[test]
fn both_routes_agree() {
    let cells = [
        Cell::new(2, 2, 1),
        Cell::new(3, 3, 1),
        Cell::new(3, 2, 2),
        cell(3, 2, 1, Variant::ClearH2),
        cell(4, 2, 1, Variant::ClearH2),
        Cell::new(3, 2, 1).with_scheme(Scheme::Classical),
    ];
    for c in cells {
        let fast = server_secrecy(&c).unwrap();
        let dense = server_secrecy_dense(&c, &ViewFilter::default()).unwrap();
        assert!((fast.beta_bits - dense.beta_bits).abs() < 1e-9, "{c:?}");
        if c.blocks == 1 && c.scheme != Scheme::Classical {
            let a = lemma1_check(&c).unwrap().max_distance;
            let b = lemma1_check_dense(&c).unwrap().max_distance;
            assert!((a - b).abs() < 1e-9, "{c:?}: {a} vs {b}");
        }
    }
}

#[test]
fn dropping_systems_never_raises_beta() {
    for c in [
        cell(3, 2, 1, Variant::ClearH2),
        cell(4, 2, 1, Variant::ClearH2),
        Cell::new(3, 2, 1).with_scheme(Scheme::Classical),
        Cell::new(4, 2, 1),
    ] {
        let full = server_secrecy(&c).unwrap().beta_bits;
        let filters = filters(&c);
        assert!(!filters.is_empty());
        for f in filters {
            let part = server_secrecy_filtered(&c, &f).unwrap().beta_bits;
            assert!(part <= full + 1e-9, "{c:?} {f:?}: {part} > {full}");
        }
    }
    let mut drop_clear = ViewFilter::default();
    drop_clear.drop_registers.push("H2clear".into());
    let r = server_secrecy_filtered(&cell(3, 2, 1, Variant::ClearH2), &drop_clear).unwrap();
    assert!(r.beta_bits <= 1e-9);
}

#[test]
fn lemma1_on_the_grid_and_under_leaks() {
    for c in grid(&NS, &FS, &[1], Scheme::Quantum(Variant::Qspir)) {
        let r = lemma1_check(&c).unwrap();
        assert_eq!(r.entries.len(), c.n * c.f);
        assert!(r.max_distance <= 1e-12, "{c:?}: {}", r.max_distance);
    }
    let leak = lemma1_check(&cell(3, 2, 1, Variant::ClearH2)).unwrap();
    assert!(leak.max_distance > 0.1, "{}", leak.max_distance);
}

#[test]
fn skipped_correction_breaks_retrieval() {
    let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));
    for n in 3..=5 {
        for backend in [Backend::Frame, Backend::Dense] {
            let r = error_measure(&cell(n, 2, 1, Variant::SkipUserCorrection), backend).unwrap();
            assert!((r.alpha - 0.75).abs() < 1e-12, "N={n} {backend:?}");
            if backend == Backend::Frame {
                assert_eq!(r.alpha_exact, Some(three_quarters.clone()));
            }
        }
    }
    // With two servers there is no middle correction to skip.
    let two = error_measure(&cell(2, 2, 1, Variant::SkipUserCorrection), Backend::Frame).unwrap();
    assert_eq!(two.alpha_exact, Some(BigRational::zero()));
}

#[test]
fn error_measure_backends_agree() {
    for c in [Cell::new(2, 3, 1), Cell::new(3, 2, 2), Cell::new(4, 2, 1)] {
        let frame = error_measure(&c, Backend::Frame).unwrap();
        let dense = error_measure(&c, Backend::Dense).unwrap();
        assert_eq!(frame.alpha_exact, Some(BigRational::zero()));
        assert!(dense.alpha.abs() < 1e-12);
    }
}

#[test]
fn security_report_collects_every_measure() {
    let r = SecurityReport::measure(&Cell::new(3, 2, 1), Checks::ALL, Backend::Frame).unwrap();
    assert_eq!(r.alpha_exact.as_deref(), Some("0/1"));
    assert_eq!(r.gamma_exact.as_deref(), Some("0"));
    assert!(r.beta.unwrap() <= 1e-9);
    assert!(r.lemma1_max_distance.unwrap() <= 1e-12);
    assert_eq!(r.per_pair_beta.len(), 2);
    assert_eq!(r.per_server_gamma.len(), 3);
}
