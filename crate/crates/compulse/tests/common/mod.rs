//! Independent oracles shared by the integration and acceptance suites.
//!
//! Everything here deliberately avoids the library's closed-form
//! propagator and jet paths: the matrix exponential is brute-force
//! scaling-and-squaring on the Hamiltonian, and derivatives come from
//! Richardson-extrapolated central differences on the composed
//! propagator.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use compulse::su2::{compose, CompositeSequence, ErrorPoint, Mat2, Pulse};

/// Brute-force matrix exponential by scaling and squaring with a Taylor
/// series.
pub fn expm(m: &Mat2) -> Mat2 {
    let norm: f64 = m.e.iter().map(|x| x.norm()).sum();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m.scale(C64::new(0.5f64.powi(squarings), 0.0));
    let mut sum = Mat2::identity();
    let mut term = Mat2::identity();
    for k in 1..=24 {
        term = term.mul(&scaled).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

/// Propagator of a single phased pulse by exponentiating `−i·H·τ` for
/// the constant two-level Hamiltonian, phase included in the drive term.
pub fn propagator_oracle(p: &Pulse, e: &ErrorPoint) -> Mat2 {
    let x = p.omega * PI * (1.0 + e.epsilon);
    let y = e.delta * PI;
    let drive = C64::new(0.0, p.phase).exp() * x;
    let h = Mat2::new(
        C64::new(-y, 0.0),
        drive,
        drive.conj(),
        C64::new(y, 0.0),
    )
    .scale(C64::new(0.5, 0.0));
    expm(&h.scale(C64::new(0.0, -p.tau)))
}

/// Sequence propagator through the oracle path (pulse 0 rightmost).
pub fn compose_oracle(s: &CompositeSequence, e: &ErrorPoint) -> Mat2 {
    s.pulses
        .iter()
        .fold(Mat2::identity(), |acc, p| propagator_oracle(p, e).mul(&acc))
}

/// Average gate fidelity recomputed from scratch.
pub fn fidelity_oracle(u: &Mat2, g: &Mat2) -> f64 {
    let tr: C64 = u.e.iter().zip(g.e.iter()).map(|(x, y)| x.conj() * y).sum();
    (tr.norm_sqr() + 2.0) / 6.0
}

/// Central-difference stencil (offsets and weights) for the k-th
/// derivative, truncation error `O(h²)`.
fn central_coeffs(k: usize) -> Vec<(f64, f64)> {
    match k {
        0 => vec![(0.0, 1.0)],
        1 => vec![(-1.0, -0.5), (1.0, 0.5)],
        2 => vec![(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        3 => vec![(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
        _ => panic!("stencils implemented through third order"),
    }
}

fn fd_stencil(s: &CompositeSequence, m: usize, n: usize, h: f64) -> Mat2 {
    let mut out = Mat2::zero();
    for &(oe, we) in &central_coeffs(m) {
        for &(od, wd) in &central_coeffs(n) {
            let e = ErrorPoint { epsilon: oe * h, delta: od * h };
            out = out.add(&compose(s, &e).matrix().scale(C64::new(we * wd, 0.0)));
        }
    }
    out.scale(C64::new(1.0 / h.powi((m + n) as i32), 0.0))
}

/// `D_{m,n}𝒰` at the nominal point by central differences with one
/// Richardson extrapolation (step `h` and `h/2`).
pub fn fd_derivative(s: &CompositeSequence, m: usize, n: usize, h: f64) -> Mat2 {
    let coarse = fd_stencil(s, m, n, h);
    let fine = fd_stencil(s, m, n, h / 2.0);
    fine.scale(C64::new(4.0 / 3.0, 0.0)).sub(&coarse.scale(C64::new(1.0 / 3.0, 0.0)))
}

/// Deterministic random pulse within well-conditioned ranges.
pub fn random_pulse(rng: &mut ChaCha8Rng) -> Pulse {
    Pulse::new(
        rng.gen_range(0.0..2.5),
        rng.gen_range(0.05..2.5),
        rng.gen_range(0.0..2.0 * PI),
    )
    .expect("ranges satisfy the pulse invariants")
}

/// Deterministic random sequence of `n` pulses.
pub fn random_sequence(rng: &mut ChaCha8Rng, n: usize) -> CompositeSequence {
    let pulses = (0..n).map(|_| random_pulse(rng)).collect();
    CompositeSequence::new("random", pulses, compulse::su2::GateKind::X, false)
        .expect("nonempty by construction")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
