//! Truncated bivariate Taylor (jet) arithmetic in the error variables.
//!
//! A [`Jet2`] stores the coefficients `c_{mn}` of a truncated expansion
//! `Σ c_{mn} ε^m δ^n` over all `m + n ≤ K`. Arithmetic is closed at the
//! same order `K` (higher terms are truncated), so lifting the closed-form
//! pulse propagator to jets and multiplying the per-pulse jet matrices
//! yields every mixed partial derivative
//!
//! ```text
//!     D_{m,n} 𝒰 = ∂^{m+n} 𝒰 / ∂ε^m ∂δ^n   =  m!·n!·c_{mn}
//! ```
//!
//! of the total propagator at the nominal point, exact to machine
//! precision at any order — no step-size tuning, no expression swell.
//!
//! The expansion point is fixed at `(ε, δ) = (0, 0)`; derivative
//! conditions on composite sequences are always evaluated at nominal
//! parameters.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::su2::{CompositeSequence, Mat2, Pulse};

/// Default truncation order: third-order conditions with two guard orders.
pub const DEFAULT_JET_ORDER: usize = 6;

#[inline]
fn idx(m: usize, n: usize) -> usize {
    let d = m + n;
    d * (d + 1) / 2 + n
}

#[inline]
fn len_for_order(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// A truncated bivariate Taylor expansion `Σ_{m+n ≤ K} c_{mn} ε^m δ^n`
/// with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    order: usize,
    c: Vec<C64>,
}

impl Jet2 {
    /// The zero jet at truncation order `order`.
    pub fn zero(order: usize) -> Self {
        Jet2 { order, c: vec![C64::new(0.0, 0.0); len_for_order(order)] }
    }

    /// A constant jet.
    pub fn constant(value: C64, order: usize) -> Self {
        let mut j = Jet2::zero(order);
        j.c[0] = value;
        j
    }

    /// The variable `ε` as a jet.
    pub fn epsilon(order: usize) -> Self {
        let mut j = Jet2::zero(order);
        j.c[idx(1, 0)] = C64::new(1.0, 0.0);
        j
    }

    /// The variable `δ` as a jet.
    pub fn delta(order: usize) -> Self {
        let mut j = Jet2::zero(order);
        j.c[idx(0, 1)] = C64::new(1.0, 0.0);
        j
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient `c_{mn}`, or `None` beyond the truncation order.
    pub fn coeff(&self, m: usize, n: usize) -> Option<C64> {
        (m + n <= self.order).then(|| self.c[idx(m, n)])
    }

    /// Constant term `c₀₀`.
    pub fn constant_term(&self) -> C64 {
        self.c[0]
    }

    /// Derivative value `∂^{m+n}/∂ε^m∂δ^n = m!·n!·c_{mn}`.
    pub fn derivative(&self, m: usize, n: usize) -> Result<C64> {
        match self.coeff(m, n) {
            Some(c) => Ok(c * factorial(m) * factorial(n)),
            None => Err(Error::OrderExceedsJet { m, n, order: self.order }),
        }
    }

    /// Coefficient-wise complex conjugate (the variables are real).
    pub fn conj(&self) -> Jet2 {
        Jet2 { order: self.order, c: self.c.iter().map(C64::conj).collect() }
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale(&self, s: C64) -> Jet2 {
        Jet2 { order: self.order, c: self.c.iter().map(|x| x * s).collect() }
    }

    fn assert_same_order(&self, rhs: &Jet2) {
        assert_eq!(self.order, rhs.order, "jet truncation orders must match");
    }

    /// Truncated quotient; the divisor must have a nonzero constant term.
    pub fn div(&self, rhs: &Jet2) -> Result<Jet2> {
        self.assert_same_order(rhs);
        let b0 = rhs.c[0];
        if b0.norm() == 0.0 {
            return Err(Error::SingularJet("division by a jet with zero constant term".into()));
        }
        // reciprocal as the geometric series about the constant term
        let mut t = Vec::with_capacity(self.order + 1);
        let mut p = C64::new(1.0, 0.0) / b0;
        for _ in 0..=self.order {
            t.push(p);
            p = -p / b0;
        }
        Ok(self * &rhs.compose_series(&t))
    }

    /// Truncated sine.
    pub fn sin(&self) -> Jet2 {
        let c0 = self.c[0];
        let (s, c) = (c0.sin(), c0.cos());
        self.compose_series(&cycle_coeffs(self.order, [s, c, -s, -c]))
    }

    /// Truncated cosine.
    pub fn cos(&self) -> Jet2 {
        let c0 = self.c[0];
        let (s, c) = (c0.sin(), c0.cos());
        self.compose_series(&cycle_coeffs(self.order, [c, -s, -c, s]))
    }

    /// Truncated exponential.
    pub fn exp(&self) -> Jet2 {
        let e0 = self.c[0].exp();
        let mut t = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for j in 0..=self.order {
            if j > 0 {
                fact *= j as f64;
            }
            t.push(e0 / fact);
        }
        self.compose_series(&t)
    }

    /// Truncated square root; the constant term must be real and positive.
    pub fn sqrt(&self) -> Result<Jet2> {
        let c0 = self.c[0];
        if c0.im.abs() > 1e-12 * (1.0 + c0.re.abs()) || c0.re <= 0.0 {
            return Err(Error::SingularJet(format!(
                "sqrt needs a real positive constant term, got {c0}"
            )));
        }
        let c0 = c0.re;
        let mut t = Vec::with_capacity(self.order + 1);
        let mut tj = C64::new(c0.sqrt(), 0.0);
        t.push(tj);
        for j in 1..=self.order {
            tj = tj * ((1.5 - j as f64) / j as f64) / c0;
            t.push(tj);
        }
        Ok(self.compose_series(&t))
    }

    /// Compose a scalar Taylor series `Σ t_j w^j` with the nilpotent part
    /// `w = self − c₀₀`, truncated at `K` (Horner evaluation).
    fn compose_series(&self, t: &[C64]) -> Jet2 {
        let mut w = self.clone();
        w.c[0] = C64::new(0.0, 0.0);
        let mut acc = Jet2::constant(t[self.order], self.order);
        for j in (0..self.order).rev() {
            acc = &acc * &w;
            acc.c[0] += t[j];
        }
        acc
    }

    /// Evaluate the truncated polynomial at a point (used in tests).
    pub fn eval(&self, epsilon: f64, delta: f64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for d in (0..=self.order).rev() {
            for n in 0..=d {
                let m = d - n;
                sum += self.c[idx(m, n)] * epsilon.powi(m as i32) * delta.powi(n as i32);
            }
        }
        sum
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn cycle_coeffs(order: usize, cycle: [C64; 4]) -> Vec<C64> {
    let mut t = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for j in 0..=order {
        if j > 0 {
            fact *= j as f64;
        }
        t.push(cycle[j % 4] / fact);
    }
    t
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        self.assert_same_order(rhs);
        let c = self.c.iter().zip(rhs.c.iter()).map(|(x, y)| x + y).collect();
        Jet2 { order: self.order, c }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        self.assert_same_order(rhs);
        let c = self.c.iter().zip(rhs.c.iter()).map(|(x, y)| x - y).collect();
        Jet2 { order: self.order, c }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 { order: self.order, c: self.c.iter().map(|x| -x).collect() }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;

    /// Truncated Cauchy product, exact for polynomial inputs of total
    /// degree ≤ K.
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.assert_same_order(rhs);
        let k = self.order;
        let mut out = Jet2::zero(k);
        for d1 in 0..=k {
            for n1 in 0..=d1 {
                let a = self.c[d1 * (d1 + 1) / 2 + n1];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let m1 = d1 - n1;
                for d2 in 0..=k - d1 {
                    for n2 in 0..=d2 {
                        let b = rhs.c[d2 * (d2 + 1) / 2 + n2];
                        if b.norm_sqr() == 0.0 {
                            continue;
                        }
                        out.c[idx(m1 + (d2 - n2), n1 + n2)] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// Cayley–Klein pair of jets: the propagator expanded about `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryJet {
    /// Jet of the diagonal Cayley–Klein parameter.
    pub a: Jet2,
    /// Jet of the off-diagonal Cayley–Klein parameter.
    pub b: Jet2,
}

impl UnitaryJet {
    /// Validate that the constant terms form an SU(2) pair.
    pub fn new(a: Jet2, b: Jet2) -> Result<Self> {
        let norm = a.constant_term().norm_sqr() + b.constant_term().norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitary { deviation: (norm - 1.0).abs() });
        }
        Ok(UnitaryJet { a, b })
    }

    /// Identity propagator as a jet.
    pub fn identity(order: usize) -> Self {
        UnitaryJet {
            a: Jet2::constant(C64::new(1.0, 0.0), order),
            b: Jet2::zero(order),
        }
    }

    /// Jet matrix product `self · rhs` (rhs acts first).
    pub fn mul(&self, rhs: &UnitaryJet) -> UnitaryJet {
        UnitaryJet {
            a: &(&self.a * &rhs.a) - &(&self.b * &rhs.b.conj()),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.a.conj()),
        }
    }

    /// The 2×2 matrix of derivative values `D_{m,n}` of all four entries.
    pub fn derivative_matrix(&self, m: usize, n: usize) -> Result<Mat2> {
        let da = self.a.derivative(m, n)?;
        let db = self.b.derivative(m, n)?;
        Ok(Mat2::new(da, db, -db.conj(), da.conj()))
    }
}

/// Jet of a single pulse propagator about the nominal point.
///
/// Lifts the closed form of `pulse_propagator` to jets. A zero-amplitude
/// pulse falls back to the exact pure-detuning branch
/// `a = exp(i·τ·πδ/2), b = 0`, which avoids the square root of a jet with
/// zero constant term.
pub fn propagator_jet(p: &Pulse, order: usize) -> UnitaryJet {
    let i = C64::new(0.0, 1.0);
    if p.omega == 0.0 {
        let y = Jet2::delta(order).scale(C64::new(PI, 0.0));
        let a = y.scale(i * (p.tau / 2.0)).exp();
        return UnitaryJet { a, b: Jet2::zero(order) };
    }
    let one = Jet2::constant(C64::new(1.0, 0.0), order);
    let x = (&one + &Jet2::epsilon(order)).scale(C64::new(p.omega * PI, 0.0));
    let y = Jet2::delta(order).scale(C64::new(PI, 0.0));
    let q = &(&x * &x) + &(&y * &y);
    let r = q.sqrt().expect("q has positive constant term for omega > 0");
    let h = r.scale(C64::new(p.tau / 2.0, 0.0));
    let sin_h_over_r = h.sin().div(&r).expect("r has positive constant term");
    let a = &h.cos() + &(&y * &sin_h_over_r).scale(i);
    let b = (&x * &sin_h_over_r).scale(-i * C64::new(0.0, p.phase).exp());
    UnitaryJet { a, b }
}

/// Jet of the total sequence propagator (pulse 0 applied first).
pub fn sequence_jet(s: &CompositeSequence, order: usize) -> UnitaryJet {
    s.pulses
        .iter()
        .fold(UnitaryJet::identity(order), |acc, p| propagator_jet(p, order).mul(&acc))
}

/// Mixed derivative `D_{m,n} 𝒰` of the total propagator at `(0, 0)`,
/// computed at the default truncation order.
pub fn sequence_derivative(s: &CompositeSequence, m: usize, n: usize) -> Result<Mat2> {
    sequence_derivative_with_order(s, m, n, DEFAULT_JET_ORDER)
}

/// Mixed derivative at an explicit truncation order `K ≥ m + n`.
pub fn sequence_derivative_with_order(
    s: &CompositeSequence,
    m: usize,
    n: usize,
    order: usize,
) -> Result<Mat2> {
    if m + n > order {
        return Err(Error::OrderExceedsJet { m, n, order });
    }
    sequence_jet(s, order).derivative_matrix(m, n)
}
