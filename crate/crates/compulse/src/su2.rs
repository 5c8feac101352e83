//! Exact SU(2) propagators for phased rectangular pulses, sequence
//! composition, target gates and fidelity metrics.
//!
//! A two-level system driven by a rectangular pulse of Rabi frequency
//! `Ω = Ω_ref·ω(1+ε)`, detuning `Δ = Ω_ref·δ` and duration `τ·T_ref`
//! (with `Ω_ref = π/T_ref`) evolves under the constant Hamiltonian
//!
//! ```text
//!           1 ⎡ −Δ   Ω ⎤
//!     H  =  ─ ⎢        ⎥
//!           2 ⎣  Ω   Δ ⎦
//! ```
//!
//! whose propagator is parametrized by the Cayley–Klein pair `(a, b)`,
//!
//! ```text
//!           ⎡  a   b ⎤
//!     U  =  ⎢        ⎥ ,     |a|² + |b|² = 1.
//!           ⎣ −b*  a*⎦
//! ```
//!
//! A constant phase shift of the drive, `Ω → Ω e^{iφ}`, maps onto the
//! propagator as `b → b e^{iφ}` with `a` unchanged. A composite sequence
//! multiplies such propagators right-to-left (first pulse rightmost).
//!
//! All quantities are dimensionless: `ω` and `δ` are in units of `Ω_ref`,
//! durations in units of `T_ref`, so the nominal π pulse is `ω = 1, τ = 1`
//! and the nominal pulse area is `ω·τ·π`.

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Wrap an angle to `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(TAU);
    // rem_euclid can round up to 2π for tiny negative inputs
    if w >= TAU {
        w -= TAU;
    }
    if w < 0.0 {
        0.0
    } else {
        w
    }
}

/// One phased rectangular drive segment.
///
/// `omega` is the nominal Rabi amplitude in units of `Ω_ref`, `tau` the
/// duration in units of `T_ref`, `phase` the drive phase in radians,
/// stored wrapped to `[0, 2π)`. The nominal pulse area is `ω·τ·π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    /// Nominal Rabi amplitude, `ω ≥ 0`.
    pub omega: f64,
    /// Duration, `τ > 0`.
    pub tau: f64,
    /// Drive phase in radians, wrapped to `[0, 2π)`.
    pub phase: f64,
}

impl Pulse {
    /// Create a pulse, validating `ω ≥ 0`, `τ > 0` and wrapping the phase.
    pub fn new(omega: f64, tau: f64, phase: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::invalid("omega", format!("must be finite and ≥ 0, got {omega}")));
        }
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::invalid("tau", format!("must be finite and > 0, got {tau}")));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("phase", format!("must be finite, got {phase}")));
        }
        Ok(Pulse { omega, tau, phase: wrap_phase(phase) })
    }

    /// Nominal π pulse (`ω = 1, τ = 1`) with the given phase.
    pub fn pi(phase: f64) -> Self {
        Pulse { omega: 1.0, tau: 1.0, phase: wrap_phase(phase) }
    }

    /// Nominal area `ω·τ` in units of π.
    pub fn area_over_pi(&self) -> f64 {
        self.omega * self.tau
    }
}

/// A point in the `(ε, δ)` error plane.
///
/// `epsilon` is the fractional Rabi-frequency error, `delta` the detuning
/// in units of `Ω_ref`. Both are dimensionless and may take any finite
/// value; the propagator formulas are total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPoint {
    /// Fractional Rabi error.
    pub epsilon: f64,
    /// Detuning in units of `Ω_ref`.
    pub delta: f64,
}

impl ErrorPoint {
    /// Nominal operating point `(0, 0)`.
    pub const ORIGIN: ErrorPoint = ErrorPoint { epsilon: 0.0, delta: 0.0 };

    /// Create an error point, validating finiteness.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", format!("must be finite, got {epsilon}")));
        }
        if !delta.is_finite() {
            return Err(Error::invalid("delta", format!("must be finite, got {delta}")));
        }
        Ok(ErrorPoint { epsilon, delta })
    }
}

/// Map a fractional duration error `η` onto the `(ε, δ)` plane.
///
/// Scaling every pulse duration by `1+η` is exactly equivalent to moving
/// the error point to `((1+ε)(1+η) − 1, δ(1+η))`: both rescalings multiply
/// the accumulated phase `r·τ/2` by the same factor while leaving the
/// rotation axis untouched. Duration errors therefore sweep diagonal rays
/// through the `(ε, δ)` landscape.
pub fn duration_error_map(e: ErrorPoint, eta: f64) -> ErrorPoint {
    ErrorPoint {
        epsilon: (1.0 + e.epsilon) * (1.0 + eta) - 1.0,
        delta: e.delta * (1.0 + eta),
    }
}

/// An SU(2) propagator stored as its Cayley–Klein pair.
///
/// The full matrix is `[[a, b], [−b*, a*]]` with `|a|² + |b|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary {
    /// Diagonal Cayley–Klein parameter.
    pub a: C64,
    /// Off-diagonal Cayley–Klein parameter.
    pub b: C64,
}

impl Unitary {
    /// Identity propagator.
    pub const IDENTITY: Unitary = Unitary { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) };

    /// Matrix product `self · rhs` (rhs acts first).
    pub fn mul(&self, rhs: &Unitary) -> Unitary {
        Unitary {
            a: self.a * rhs.a - self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }

    /// Deviation of `|a|² + |b|²` from one.
    pub fn norm_error(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs()
    }

    /// The full 2×2 matrix.
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.a, self.b, -self.b.conj(), self.a.conj())
    }

    /// Convert into a general gate matrix without re-validation.
    pub fn to_gate(&self) -> GateMatrix {
        GateMatrix { m: self.matrix() }
    }
}

/// A plain 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    /// Entries `[m11, m12, m21, m22]`.
    pub e: [C64; 4],
}

impl Mat2 {
    /// Build from the four entries in row-major order.
    pub fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Mat2 { e: [m11, m12, m21, m22] }
    }

    /// Identity matrix.
    pub fn identity() -> Self {
        Mat2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    /// Zero matrix.
    pub fn zero() -> Self {
        Mat2 { e: [C64::new(0.0, 0.0); 4] }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.e;
        let b = &rhs.e;
        Mat2 {
            e: [
                a[0] * b[0] + a[1] * b[2],
                a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2],
                a[2] * b[1] + a[3] * b[3],
            ],
        }
    }

    /// Entry-wise sum.
    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut e = self.e;
        for (x, y) in e.iter_mut().zip(rhs.e.iter()) {
            *x += y;
        }
        Mat2 { e }
    }

    /// Entry-wise difference.
    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut e = self.e;
        for (x, y) in e.iter_mut().zip(rhs.e.iter()) {
            *x -= y;
        }
        Mat2 { e }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(self.e[0].conj(), self.e[2].conj(), self.e[1].conj(), self.e[3].conj())
    }

    /// Multiply every entry by a scalar.
    pub fn scale(&self, s: C64) -> Mat2 {
        let mut e = self.e;
        for x in e.iter_mut() {
            *x *= s;
        }
        Mat2 { e }
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.e.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.e.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation of `M†M` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().mul(self).sub(&Mat2::identity()).max_abs()
    }
}

/// A general 2×2 unitary used as a gate target or wrapped product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateMatrix {
    m: Mat2,
}

impl GateMatrix {
    /// Validate unitarity (`M†M = I` within 1e−12) and wrap the matrix.
    pub fn new(m: Mat2) -> Result<Self> {
        let dev = m.unitarity_error();
        if dev > 1e-12 {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(GateMatrix { m })
    }

    /// The underlying matrix.
    pub fn mat(&self) -> &Mat2 {
        &self.m
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &GateMatrix) -> GateMatrix {
        GateMatrix { m: self.m.mul(&rhs.m) }
    }

    /// `R_z(θ) = diag(e^{−iθ/2}, e^{iθ/2})`.
    pub fn rz(theta: f64) -> GateMatrix {
        let half = C64::new(0.0, -theta / 2.0).exp();
        GateMatrix {
            m: Mat2::new(half, C64::new(0.0, 0.0), C64::new(0.0, 0.0), half.conj()),
        }
    }

    /// `R_x(θ) = exp(−iθσ_x/2)`.
    pub fn rx(theta: f64) -> GateMatrix {
        let c = C64::new((theta / 2.0).cos(), 0.0);
        let s = C64::new(0.0, -(theta / 2.0).sin());
        GateMatrix { m: Mat2::new(c, s, s, c) }
    }
}

/// Gate tags understood by [`target_gate`] and sequence records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// The X gate up to global phase, `−iX`.
    X,
    /// The x-axis half rotation `R_x(π/2)`.
    Rx90,
    /// The Hadamard gate.
    H,
    /// The identity.
    I,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::X => "x",
            GateKind::Rx90 => "rx90",
            GateKind::H => "h",
            GateKind::I => "i",
        };
        f.write_str(s)
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(GateKind::X),
            "rx90" | "rxderiv" | "rx(pi/2)" => Ok(GateKind::Rx90),
            "h" | "hadamard" => Ok(GateKind::H),
            "i" | "id" | "identity" => Ok(GateKind::I),
            other => Err(Error::invalid("target", format!("unknown gate tag `{other}`"))),
        }
    }
}

/// The target matrix for a gate tag.
///
/// `X` is the physically natural `−iX = exp(−iπσ_x/2)`; `Rx90` is
/// `R_x(π/2)`; `H` the Hadamard matrix; `I` the identity.
pub fn target_gate(kind: GateKind) -> GateMatrix {
    let z = C64::new(0.0, 0.0);
    let mi = C64::new(0.0, -1.0);
    match kind {
        GateKind::X => GateMatrix { m: Mat2::new(z, mi, mi, z) },
        GateKind::Rx90 => GateMatrix::rx(PI / 2.0),
        GateKind::H => {
            let h = C64::new(FRAC_1_SQRT_2, 0.0);
            GateMatrix { m: Mat2::new(h, h, h, -h) }
        }
        GateKind::I => GateMatrix { m: Mat2::identity() },
    }
}

/// Complete a half rotation into the Hadamard gate with virtual Z gates.
///
/// Returns `e^{iπ/2}·R_z(π/2)·U·R_z(π/2)`. When `U = R_x(π/2)` this is the
/// Hadamard matrix, and by trace cyclicity the fidelity is preserved for
/// any `U`: `F(wrap(U), H) = F(U, R_x(π/2))` exactly.
pub fn hadamard_wrap(u: &GateMatrix) -> GateMatrix {
    let rz = GateMatrix::rz(PI / 2.0);
    let phase = C64::new(0.0, 1.0);
    GateMatrix { m: rz.m.mul(&u.m).mul(&rz.m).scale(phase) }
}

/// An ordered composite sequence of pulses with a target-gate tag.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSequence {
    /// Display name.
    pub name: String,
    /// Pulses in application order (index 0 acts first).
    pub pulses: Vec<Pulse>,
    /// Gate the sequence is meant to implement.
    pub target: GateKind,
    /// Whether the pulse list is palindromic in `(ω, τ, φ)`.
    pub symmetric: bool,
}

impl CompositeSequence {
    /// Create a sequence, validating non-emptiness and the palindrome flag.
    pub fn new(
        name: impl Into<String>,
        pulses: Vec<Pulse>,
        target: GateKind,
        symmetric: bool,
    ) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::invalid("pulses", "sequence must be nonempty"));
        }
        if symmetric && !is_palindromic(&pulses) {
            return Err(Error::invalid(
                "symmetric",
                "flag set but pulse list is not palindromic in (omega, tau, phase)",
            ));
        }
        Ok(CompositeSequence { name: name.into(), pulses, target, symmetric })
    }

    /// Build a palindromic sequence of nominal π pulses from the first half
    /// of its phases (`k` free phases give `2k−1` pulses).
    pub fn symmetric_pi(name: impl Into<String>, half_phases: &[f64], target: GateKind) -> Result<Self> {
        if half_phases.is_empty() {
            return Err(Error::invalid("half_phases", "need at least one phase"));
        }
        let mut pulses: Vec<Pulse> = half_phases.iter().map(|&p| Pulse::pi(p)).collect();
        for i in (0..half_phases.len() - 1).rev() {
            pulses.push(pulses[i]);
        }
        CompositeSequence::new(name, pulses, target, true)
    }

    /// Total nominal area `Σ ω_k·τ_k` in units of π.
    pub fn area_over_pi(&self) -> f64 {
        self.pulses.iter().map(Pulse::area_over_pi).sum()
    }

    /// The target matrix for this sequence's tag.
    pub fn target_matrix(&self) -> GateMatrix {
        target_gate(self.target)
    }
}

fn is_palindromic(pulses: &[Pulse]) -> bool {
    let n = pulses.len();
    (0..n / 2).all(|i| {
        let p = &pulses[i];
        let q = &pulses[n - 1 - i];
        (p.omega - q.omega).abs() <= 1e-12
            && (p.tau - q.tau).abs() <= 1e-12
            && (p.phase - q.phase).abs() <= 1e-12
    })
}

/// Add a constant shift `χ` to every pulse phase, wrapping to `[0, 2π)`.
///
/// This conjugates the total propagator by `diag(e^{iχ/2}, e^{−iχ/2})`,
/// so `|𝒰₁₂|` (and the transition probability) is invariant.
pub fn shift_all_phases(s: &CompositeSequence, chi: f64) -> CompositeSequence {
    let pulses = s
        .pulses
        .iter()
        .map(|p| Pulse { omega: p.omega, tau: p.tau, phase: wrap_phase(p.phase + chi) })
        .collect();
    CompositeSequence {
        name: s.name.clone(),
        pulses,
        target: s.target,
        symmetric: s.symmetric,
    }
}

/// Stable `sin(h)/r` where `h = r·τ/2`, switching to a truncated series
/// below `r·τ < 1e−6` to avoid the 0/0 at zero generalized Rabi frequency.
fn sin_h_over_r(r: f64, tau: f64) -> f64 {
    let h = r * tau / 2.0;
    if r * tau < 1e-6 {
        let h2 = h * h;
        (tau / 2.0) * (1.0 - h2 / 6.0 + h2 * h2 / 120.0 - h2 * h2 * h2 / 5040.0)
    } else {
        h.sin() / r
    }
}

/// Exact propagator of one phased rectangular pulse at an error point.
///
/// With `x = ωπ(1+ε)`, `y = δπ`, `r = √(x²+y²)` and `h = rτ/2`,
///
/// ```text
///     a  = cos h + i (y/r) sin h ,      b₀ = −i (x/r) sin h ,
/// ```
///
/// and the returned propagator is `[[a, b₀e^{iφ}], [−b₀*e^{−iφ}, a*]]`,
/// the matrix exponential of `−i·H·τ·T_ref` for the constant Hamiltonian
/// above. The `r → 0` limits are handled by series forms of `sin(h)/r`.
pub fn pulse_propagator(p: &Pulse, e: &ErrorPoint) -> Unitary {
    let x = p.omega * PI * (1.0 + e.epsilon);
    let y = e.delta * PI;
    let r = (x * x + y * y).sqrt();
    let h = r * p.tau / 2.0;
    let s = sin_h_over_r(r, p.tau);
    let a = C64::new(h.cos(), y * s);
    let b0 = C64::new(0.0, -x * s);
    let phase = C64::new(0.0, p.phase).exp();
    Unitary { a, b: b0 * phase }
}

/// Total propagator of a composite sequence at an error point.
///
/// Pulse 0 is applied first, i.e. the product is
/// `U_N(φ_N) ⋯ U_2(φ_2) U_1(φ_1)`.
pub fn compose(s: &CompositeSequence, e: &ErrorPoint) -> Unitary {
    s.pulses.iter().fold(Unitary::IDENTITY, |acc, p| pulse_propagator(p, e).mul(&acc))
}

/// `sin(h)/h`, entire, with a series branch against cancellation.
fn sinc(h: f64) -> f64 {
    if h.abs() < 1e-2 {
        let h2 = h * h;
        1.0 - h2 / 6.0 + h2 * h2 / 120.0 - h2 * h2 * h2 / 5040.0
    } else {
        h.sin() / h
    }
}

/// `(cos h − sinc h)/h²`, entire, with a series branch against
/// cancellation.
fn cos_minus_sinc_over_h2(h: f64) -> f64 {
    if h.abs() < 1e-2 {
        let h2 = h * h;
        -1.0 / 3.0 + h2 / 30.0 - h2 * h2 / 840.0 + h2 * h2 * h2 / 45360.0
    } else {
        (h.cos() - sinc(h)) / (h * h)
    }
}

/// Propagator of one pulse together with its partial derivatives with
/// respect to the pulse amplitude and phase (used by the gradient-descent
/// optimizer; the error-derivative path goes through the jet engine
/// instead).
///
/// Everything is expressed through `q = x² + y²`, in which the propagator
/// entries are entire, so the derivatives stay finite at zero generalized
/// Rabi frequency.
pub(crate) fn pulse_propagator_partials(p: &Pulse, e: &ErrorPoint) -> (Mat2, Mat2, Mat2) {
    let k = p.tau / 2.0;
    let dx = PI * (1.0 + e.epsilon);
    let x = p.omega * dx;
    let y = e.delta * PI;
    let q = x * x + y * y;
    let h = k * q.sqrt();
    let (ch, sc) = (h.cos(), sinc(h));
    let g = cos_minus_sinc_over_h2(h);
    let phase = C64::new(0.0, p.phase).exp();

    let a = C64::new(ch, y * k * sc);
    let b = C64::new(0.0, -x * k * sc) * phase;
    let u = Mat2::new(a, b, -b.conj(), a.conj());

    // d/dω via dq/dω = 2x·π(1+ε); c'(q) = −(k²/2)·sinc h, s'(q) = (k³/2)·g
    let dq = 2.0 * x * dx;
    let da = C64::new(-(k * k / 2.0) * sc * dq, y * (k * k * k / 2.0) * g * dq);
    let db = C64::new(0.0, -(k * sc + x * x * k * k * k * g) * dx) * phase;
    let du_domega = Mat2::new(da, db, -db.conj(), da.conj());

    // d/dφ only rotates the off-diagonal entries
    let i = C64::new(0.0, 1.0);
    let db_dphi = i * b;
    let du_dphi = Mat2::new(C64::new(0.0, 0.0), db_dphi, -db_dphi.conj(), C64::new(0.0, 0.0));

    (u, du_domega, du_dphi)
}

/// Average gate fidelity `F(U, G) = (|Tr(U†G)|² + d) / (d(d+1))` with `d = 2`.
///
/// Ranges over `[1/3, 1]` and equals 1 iff `U = G` up to global phase.
pub fn gate_fidelity(u: &GateMatrix, g: &GateMatrix) -> f64 {
    let mut tr = C64::new(0.0, 0.0);
    for (x, y) in u.m.e.iter().zip(g.m.e.iter()) {
        tr += x.conj() * y;
    }
    (tr.norm_sqr() + 2.0) / 6.0
}

/// Average gate infidelity `1 − F(U, G)`.
pub fn infidelity(u: &GateMatrix, g: &GateMatrix) -> f64 {
    1.0 - gate_fidelity(u, g)
}

/// A rectangular box in the `(ε, δ)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBox {
    /// Inclusive ε range.
    pub eps: (f64, f64),
    /// Inclusive δ range.
    pub delta: (f64, f64),
}

impl ErrorBox {
    /// Create a box, validating finiteness and `lo ≤ hi` on both axes.
    pub fn new(eps: (f64, f64), delta: (f64, f64)) -> Result<Self> {
        for (name, (lo, hi)) in [("eps", eps), ("delta", delta)] {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid("box", format!("{name} range must be finite")));
            }
            if lo > hi {
                return Err(Error::invalid("box", format!("{name} range has lo > hi ({lo} > {hi})")));
            }
        }
        Ok(ErrorBox { eps, delta })
    }

    /// Symmetric box `[−half, half]²`.
    pub fn symmetric(half: f64) -> Result<Self> {
        ErrorBox::new((-half, half), (-half, half))
    }
}

/// Uniform samples of `[lo, hi]` including both endpoints; a single-point
/// axis evaluates the midpoint.
pub fn axis_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

/// Arithmetic mean of the gate infidelity over a uniform grid on `bx`.
///
/// The grid includes the box endpoints; single-point axes evaluate the
/// midpoint. A zero-width axis sampled at more than one point is rejected.
pub fn average_infidelity(
    s: &CompositeSequence,
    g: &GateMatrix,
    bx: &ErrorBox,
    grid: (usize, usize),
) -> Result<f64> {
    let (ne, nd) = grid;
    if ne < 1 || nd < 1 {
        return Err(Error::invalid("grid", "grid dimensions must be ≥ 1"));
    }
    if ne > 1 && bx.eps.0 == bx.eps.1 {
        return Err(Error::invalid("box", "empty ε range sampled at more than one point"));
    }
    if nd > 1 && bx.delta.0 == bx.delta.1 {
        return Err(Error::invalid("box", "empty δ range sampled at more than one point"));
    }
    let eps = axis_samples(bx.eps.0, bx.eps.1, ne);
    let deltas = axis_samples(bx.delta.0, bx.delta.1, nd);
    let mut sum = 0.0;
    for &e in &eps {
        for &d in &deltas {
            let u = compose(s, &ErrorPoint { epsilon: e, delta: d });
            sum += infidelity(&u.to_gate(), g);
        }
    }
    Ok(sum / (ne * nd) as f64)
}
