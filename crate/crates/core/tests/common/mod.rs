//! Criterion checks shared by the integration tests and the acceptance run.
//!
//! Oracles here are written against raw amplitude vectors and plain counting,
//! not against the library's own operator code.

#![allow(dead_code)]

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qspir::harness::Costs;
use qspir::pauli::{LabelVector, WeylLabel};
use qspir::protocol::config::all_single_block_files;
use qspir::protocol::{
    execute_block, run_classical_baseline, run_qspir, teleport_branches, Backend, BlockProgram,
    Exec, Mode, ProtocolConfig, ProtocolTranscript, StepOrder, Variant,
};
use qspir::secrecy::{
    error_measure, grid, lemma1_check, reduced_state_bound, server_secrecy, user_secrecy, Cell,
    Scheme,
};
use qspir::state::random::{haar_state, haar_vector};
use qspir::state::{QuantumRegister, QubitId, C64};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

pub fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

pub const NS: [usize; 4] = [2, 3, 4, 5];
pub const FS: [usize; 2] = [2, 3];
pub const BLOCKS: [usize; 2] = [1, 2];

pub fn default_grid(scheme: Scheme) -> Vec<Cell> {
    grid(&NS, &FS, &BLOCKS, scheme)
}

pub fn q(name: &str) -> QubitId {
    QubitId::new(name)
}

pub fn label(a: u8, b: u8) -> WeylLabel {
    WeylLabel::new(a, b)
}

pub fn labels() -> impl Iterator<Item = WeylLabel> {
    (0..4u8).map(WeylLabel::from_bits)
}

/// `X^a Z^b` on qubit `j` of an `n`-qubit vector, qubit 0 most significant.
pub fn weyl_on(amps: &[C64], n: usize, j: usize, a: u8, b: u8) -> Vec<C64> {
    let shift = n - 1 - j;
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (idx, &amp) in amps.iter().enumerate() {
        let x = (idx >> shift) & 1;
        let phase = if (b as usize & x) == 1 { -1.0 } else { 1.0 };
        out[idx ^ ((a as usize) << shift)] += amp * phase;
    }
    out
}

pub fn max_diff(x: &[C64], y: &[C64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Eight payloads: four lone qubits, four entangled with references.
pub fn payloads(seed: u64) -> Vec<QuantumRegister> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..4 {
        out.push(haar_state(vec![q("y")], &mut rng).unwrap());
    }
    for _ in 0..2 {
        out.push(haar_state(vec![q("r"), q("y")], &mut rng).unwrap());
    }
    for _ in 0..2 {
        out.push(haar_state(vec![q("y"), q("r1"), q("r2")], &mut rng).unwrap());
    }
    out
}

/// Teleportation with an operation, against the hand-built operator oracle.
pub fn protocol1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut probability_error: f64 = 0.0;
    for input in payloads(0x51) {
        let n = input.num_qubits();
        let j = input.index_of(&q("y")).unwrap();
        for cd in labels() {
            for order in [StepOrder::OperationFirst, StepOrder::MeasurementFirst] {
                let branches = teleport_branches(&input, &q("y"), cd, order).unwrap();
                if branches.len() != 4 {
                    return Outcome::new(false, format!("{} branches, expected 4", branches.len()));
                }
                for br in branches {
                    let (a, b) = (br.outcome.a(), br.outcome.b());
                    let (c, d) = (cd.a(), cd.b());
                    let pre = weyl_on(&weyl_on(input.amplitudes(), n, j, a, b), n, j, c, d);
                    let sign = if (a * b + b * c + a * d) % 2 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    let post: Vec<C64> = weyl_on(input.amplitudes(), n, j, c, d)
                        .into_iter()
                        .map(|x| x * sign)
                        .collect();
                    if br.pre_correction.qubits() != input.qubits()
                        || br.post_correction.qubits() != input.qubits()
                    {
                        return Outcome::new(false, "output register reordered");
                    }
                    worst = worst
                        .max(max_diff(br.pre_correction.amplitudes(), &pre))
                        .max(max_diff(br.post_correction.amplitudes(), &post));
                    probability_error = probability_error.max((br.probability - 0.25).abs());
                    cases += 1;
                }
            }
        }
    }
    Outcome::new(
        worst <= 1e-12 && probability_error <= 1e-12,
        format!(
            "{cases} branches, max entry error {worst:.1e}, max |p - 1/4| {probability_error:.1e}"
        ),
    )
}

/// Two-sum transmission: every one of the four Bell outcomes on every input.
pub fn protocol2() -> Outcome {
    let (first, second) = (q("first"), q("second"));
    let mut checked = 0;
    for ab in labels() {
        for cd in labels() {
            let mut amps = QuantumRegister::make_bell_pair(first.clone(), second.clone())
                .unwrap()
                .amplitudes()
                .to_vec();
            amps = weyl_on(&amps, 2, 0, ab.a(), ab.b());
            amps = weyl_on(&amps, 2, 1, cd.a(), cd.b());
            let reg = QuantumRegister::new(vec![first.clone(), second.clone()], amps).unwrap();
            let branches = reg.bell_pvm_outcomes(&first, &second).unwrap();
            if branches.len() != 4 {
                return Outcome::new(false, format!("{} branches for {ab}, {cd}", branches.len()));
            }
            let sum = label(ab.a() ^ cd.a(), ab.b() ^ cd.b());
            for br in branches {
                let expected = if br.outcome == sum { 1.0 } else { 0.0 };
                if (br.probability - expected).abs() > 1e-12 {
                    return Outcome::new(
                        false,
                        format!(
                            "{ab} + {cd}: outcome {} has p = {}",
                            br.outcome, br.probability
                        ),
                    );
                }
                checked += 1;
            }
        }
    }
    Outcome::new(
        true,
        format!("{checked} (input, outcome) pairs, output always (a+c, b+d)"),
    )
}

fn check_enumeration(transcripts: &[ProtocolTranscript], want: &LabelVector) -> Result<(), String> {
    let mut exact = BigRational::zero();
    let mut approx = 0.0;
    for t in transcripts {
        if &t.outcome != want || !t.is_correct() {
            return Err(format!("wrong output {:?}, wanted {:?}", t.outcome, want));
        }
        approx += t.branch_probability;
        exact += t
            .branch_probability_exact
            .clone()
            .ok_or("no exact probability")?;
    }
    if !exact.is_one() || (approx - 1.0).abs() > 1e-12 {
        return Err(format!("branch probabilities sum to {exact} ({approx})"));
    }
    Ok(())
}

/// Every branch of every single-block instance with two files returns `W_K`.
pub fn correctness() -> Outcome {
    let mut runs = 0;
    let mut branches = 0;
    for n in NS {
        for k in 1..=2 {
            for files in all_single_block_files(2) {
                let want = files[k - 1].clone();
                let config = ProtocolConfig::random(n, 2, 1, k, 0)
                    .with_files(files)
                    .with_mode(Mode::Enumerate);
                let transcripts = match run_qspir(&config) {
                    Ok(t) => t,
                    Err(e) => return Outcome::new(false, format!("N={n}: {e}")),
                };
                if let Err(e) = check_enumeration(&transcripts, &want) {
                    return Outcome::new(false, format!("N={n}, K={k}: {e}"));
                }
                runs += 1;
                branches += transcripts.len();
            }
        }
        let alpha = error_measure(&Cell::new(n, 2, 1), Backend::Frame).unwrap();
        if alpha.alpha_exact != Some(BigRational::zero()) {
            return Outcome::new(false, format!("N={n}: alpha = {:?}", alpha.alpha_exact));
        }
    }
    Outcome::new(
        true,
        format!("{runs} instances, {branches} branches, alpha = 0 exactly"),
    )
}

fn rational(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rate from the transcript's download: `2ℓ` bits of file over the total
/// qubit-equivalents received.
pub fn measured_rate(t: &ProtocolTranscript) -> BigRational {
    let blocks = t.config.blocks as u64;
    rational(2 * blocks, t.downloaded_qubits + t.downloaded_cbits)
}

pub fn rate() -> Outcome {
    let mut rows = Vec::new();
    for n in 2..=6usize {
        let expected = if n % 2 == 0 {
            rational(2, n as u64)
        } else {
            rational(2, n as u64 + 1)
        };
        for (f, blocks) in [(2, 1), (3, 2), (2, 5)] {
            let config = ProtocolConfig::random(n, f, blocks, 1, 7).with_mode(Mode::Sample);
            let t = &run_qspir(&config).unwrap()[0];
            let r = measured_rate(t);
            let costs = Costs::of(t);
            if r != expected || costs.rate(blocks) != expected {
                return Outcome::new(
                    false,
                    format!("N={n}, ℓ={blocks}: rate {r}, expected {expected}"),
                );
            }
            if t.uploaded_bits != (n * f) as u64 {
                return Outcome::new(
                    false,
                    format!(
                        "N={n}, F={f}: upload {} bits, expected {}",
                        t.uploaded_bits,
                        n * f
                    ),
                );
            }
        }
        rows.push(format!("N={n}:{expected}"));
    }
    Outcome::new(true, format!("{}; upload N·F bits", rows.join(" ")))
}

pub fn user_secrecy_check() -> Outcome {
    let mut cells = 0;
    for cell in default_grid(Scheme::Quantum(Variant::Qspir)) {
        let r = user_secrecy(&cell).unwrap();
        for e in &r.per_server {
            if e.exact.as_deref() != Some("0") || e.bits != 0.0 || e.holevo_bits.abs() > 1e-12 {
                return Outcome::new(
                    false,
                    format!(
                        "{cell:?} server {}: {} bits ({:?})",
                        e.server, e.bits, e.exact
                    ),
                );
            }
        }
        cells += 1;
    }
    for cell in default_grid(Scheme::Quantum(Variant::LeakyQuery)) {
        let r = user_secrecy(&cell).unwrap();
        let want = format!("log2({})", cell.f);
        if r.gamma_exact.as_deref() != Some(want.as_str()) || r.gamma_bits != (cell.f as f64).log2()
        {
            return Outcome::new(
                false,
                format!(
                    "leaky {cell:?}: {} bits ({:?})",
                    r.gamma_bits, r.gamma_exact
                ),
            );
        }
    }
    Outcome::new(
        true,
        format!("gamma = 0 exactly on {cells} cells; leaky query rule gives log2(F) exactly"),
    )
}

pub fn server_secrecy_check() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for cell in default_grid(Scheme::Quantum(Variant::Qspir)) {
        let r = server_secrecy(&cell).unwrap();
        pairs += r.per_pair.len();
        worst = worst.max(r.beta_bits);
    }
    let leaky =
        server_secrecy(&Cell::new(3, 2, 1).with_scheme(Scheme::Quantum(Variant::ClearH2))).unwrap();
    let pass = worst <= 1e-9 && leaky.beta_bits > 0.1;
    Outcome::new(
        pass,
        format!(
            "max beta {worst:.1e} bits over {pairs} (i,k) pairs; cleartext H2 gives {:.3} bits",
            leaky.beta_bits
        ),
    )
}

pub fn lemma1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut entries = 0;
    for cell in default_grid(Scheme::Quantum(Variant::Qspir)) {
        let r = lemma1_check(&cell).unwrap();
        entries += r.entries.len();
        worst = worst.max(r.max_distance);
    }
    Outcome::new(
        worst <= 1e-12,
        format!("max trace distance {worst:.1e} over {entries} (t,k) entries"),
    )
}

pub fn proposition4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x94);
    let mut worst = f64::INFINITY;
    let mut checks = 0;
    for _ in 0..200 {
        let d1 = rng.random_range(2..=8);
        let d2 = rng.random_range(2..=8);
        let psi = haar_vector(d1 * d2, &mut rng);
        for s in [0.25, 0.5, 0.75] {
            let bound = reduced_state_bound(&psi, d1, d2, s).unwrap();
            worst = worst.min(bound.slack());
            checks += 1;
        }
    }
    Outcome::new(
        worst >= -1e-9,
        format!("{checks} checks, min slack {worst:.3e}"),
    )
}

/// Sorted `(outcome, middle outcomes, probability)` for one enumeration.
fn branch_multiset(config: &ProtocolConfig) -> Vec<(LabelVector, Vec<Vec<WeylLabel>>, f64)> {
    let mut out: Vec<_> = run_qspir(config)
        .unwrap()
        .into_iter()
        .map(|t| (t.outcome, t.middle_outcomes, t.branch_probability))
        .collect();
    out.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    out
}

pub fn random_config(rng: &mut ChaCha8Rng) -> ProtocolConfig {
    let n = rng.random_range(2..=4);
    let f = rng.random_range(2..=3);
    let k = rng.random_range(1..=f);
    ProtocolConfig::random(n, f, 1, k, rng.random()).with_mode(Mode::Enumerate)
}

/// Compares the two backends' branch distributions and the user's views.
pub fn backend_equivalence(configs: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe);
    let mut worst: f64 = 0.0;
    let mut views = 0;
    for _ in 0..configs {
        let config = random_config(&mut rng);
        let frame = branch_multiset(&config.clone().with_backend(Backend::Frame));
        let dense = branch_multiset(&config.clone().with_backend(Backend::Dense));
        if frame.len() != dense.len() {
            return Outcome::new(
                false,
                format!("{} vs {} branches", frame.len(), dense.len()),
            );
        }
        for (x, y) in frame.iter().zip(&dense) {
            if x.0 != y.0 || x.1 != y.1 {
                return Outcome::new(
                    false,
                    format!("branch labels differ for N={}", config.n_servers),
                );
            }
            worst = worst.max((x.2 - y.2).abs());
        }

        let program = BlockProgram::qspir(config.n_servers, 0, Variant::Qspir).unwrap();
        let answers: Vec<WeylLabel> = (0..config.n_servers)
            .map(|_| WeylLabel::from_bits(rng.random_range(0..4)))
            .collect();
        let run =
            |backend| execute_block(&program, &answers, backend, Exec::Enumerate, true).unwrap();
        let (fb, db) = (run(Backend::Frame), run(Backend::Dense));
        if fb.len() != db.len() {
            return Outcome::new(
                false,
                format!("{} vs {} block branches", fb.len(), db.len()),
            );
        }
        for (x, y) in fb.iter().zip(&db) {
            let (vx, vy) = (x.view.as_ref().unwrap(), y.view.as_ref().unwrap());
            if x.slots != y.slots || x.output != y.output || vx.classical != vy.classical {
                return Outcome::new(false, "block branches differ");
            }
            worst = worst
                .max((x.probability.value - y.probability.value).abs())
                .max(vx.quantum.max_abs_diff(&vy.quantum).unwrap());
            views += 1;
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!(
            "{configs} configs, {views} views compared sign-exactly, max difference {worst:.1e}"
        ),
    )
}

/// Sample-mode wall time of both backends at `N = 6, ℓ = 8`.
pub fn backend_speed(reps: u64) -> (f64, Duration, Duration) {
    let time = |backend| {
        let start = Instant::now();
        for seed in 0..reps {
            let config = ProtocolConfig::random(6, 2, 8, 1, seed)
                .with_mode(Mode::Sample)
                .with_backend(backend);
            assert!(run_qspir(&config).unwrap()[0].is_correct());
        }
        start.elapsed()
    };
    let dense = time(Backend::Dense);
    let frame = time(Backend::Frame);
    (dense.as_secs_f64() / frame.as_secs_f64(), frame, dense)
}

/// Seeded classical baseline for `(n, f, ℓ)`.
pub fn classical(n: usize, f: usize, blocks: usize, seed: u64) -> ProtocolTranscript {
    run_classical_baseline(&ProtocolConfig::random(n, f, blocks, 1, seed)).unwrap()
}
