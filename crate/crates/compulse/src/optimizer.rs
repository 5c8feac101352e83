//! Direct minimization of the average gate infidelity over an error box.
//!
//! Where the derivative-based designer cancels error terms one by one,
//! this module minimizes the mean of `1 − F(𝒰(ε, δ), 𝒢)` over a grid of
//! error points with multi-start projected gradient descent: an
//! adaptive-moment update (decay 0.9/0.999, stabilizer 1e−8), global
//! gradient-norm clipping, phases continuously wrapped modulo 2π and
//! amplitudes clamped to their bounds after every step.
//!
//! Gradients are analytic, differentiating the closed-form propagator
//! with respect to phases and amplitudes (the `(ε, δ)` jet engine
//! differentiates in a different direction and is not involved). A
//! finite-difference check lives in the test suite.
//!
//! Every start owns a private RNG stream derived from the seed, so the
//! result is bit-stable across runs and thread counts.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::su2::{
    average_infidelity, axis_samples, pulse_propagator_partials, target_gate, wrap_phase,
    CompositeSequence, ErrorBox, ErrorPoint, GateKind, Mat2, Pulse,
};

/// First-moment decay of the adaptive update.
pub const ADAM_BETA1: f64 = 0.9;
/// Second-moment decay of the adaptive update.
pub const ADAM_BETA2: f64 = 0.999;
/// Stabilizer added to the second-moment denominator.
pub const ADAM_EPSILON: f64 = 1e-8;

/// Configuration of an optimization run.
#[derive(Debug, Clone)]
pub struct OptimizerSpec {
    /// Number of pulses.
    pub n_pulses: usize,
    /// Target gate tag.
    pub target: GateKind,
    /// Map free parameters onto a palindromic pulse train.
    pub symmetric: bool,
    /// Optimize per-pulse amplitudes in addition to phases.
    pub vary_amplitudes: bool,
    /// Amplitude bounds `[lo, hi]` in units of `Ω_ref`.
    pub amplitude_bounds: (f64, f64),
    /// Per-pulse duration in units of `T_ref`.
    pub tau: f64,
    /// Error box the mean infidelity is taken over.
    pub bx: ErrorBox,
    /// Grid resolution `(n_ε, n_δ)` on the box.
    pub grid: (usize, usize),
    /// Learning rate of the adaptive update.
    pub learning_rate: f64,
    /// Global gradient-norm clip.
    pub clip_norm: f64,
    /// Number of random starts.
    pub starts: usize,
    /// Iteration cap per start.
    pub max_iters: usize,
    /// Seed for the per-start RNG streams.
    pub seed: u64,
    /// Weight of the additive pulse-area penalty (0 disables it, keeping
    /// the objective the plain mean infidelity).
    pub area_penalty: f64,
}

impl OptimizerSpec {
    /// Defaults for a pulse count and target: duration 1 for X targets
    /// and 1/2 otherwise, box `[−0.15, 0.15]²` on an 8×8 grid, learning
    /// rate 1e−3, clip 1.0, 64 starts, 20000 iterations.
    pub fn new(n_pulses: usize, target: GateKind) -> Self {
        OptimizerSpec {
            n_pulses,
            target,
            symmetric: false,
            vary_amplitudes: false,
            amplitude_bounds: (0.0, 2.0),
            tau: if target == GateKind::X { 1.0 } else { 0.5 },
            bx: ErrorBox { eps: (-0.15, 0.15), delta: (-0.15, 0.15) },
            grid: (8, 8),
            learning_rate: 1e-3,
            clip_norm: 1.0,
            starts: 64,
            max_iters: 20_000,
            seed: 0,
            area_penalty: 0.0,
        }
    }

    /// Validate the invariants of the configuration.
    pub fn validate(&self) -> Result<()> {
        if self.n_pulses == 0 {
            return Err(Error::invalid("n_pulses", "need at least one pulse"));
        }
        let (lo, hi) = self.amplitude_bounds;
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo > hi {
            return Err(Error::invalid("amplitude_bounds", "need finite 0 ≤ lo ≤ hi"));
        }
        if self.grid.0 < 1 || self.grid.1 < 1 {
            return Err(Error::invalid("grid", "grid dimensions must be ≥ 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate", "must be positive"));
        }
        if !(self.clip_norm > 0.0) {
            return Err(Error::invalid("clip_norm", "must be positive"));
        }
        if !(self.tau > 0.0) {
            return Err(Error::invalid("tau", "must be positive"));
        }
        if self.starts < 1 {
            return Err(Error::invalid("starts", "need at least one start"));
        }
        Ok(())
    }

    /// Number of free phase (and, if varied, amplitude) parameters.
    pub fn free_pulses(&self) -> usize {
        if self.symmetric {
            self.n_pulses.div_ceil(2)
        } else {
            self.n_pulses
        }
    }

    /// Total parameter-vector length.
    pub fn params_len(&self) -> usize {
        self.free_pulses() * if self.vary_amplitudes { 2 } else { 1 }
    }

    /// Free-parameter index driving pulse `k`.
    fn free_index(&self, k: usize) -> usize {
        if self.symmetric {
            k.min(self.n_pulses - 1 - k)
        } else {
            k
        }
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.params_len() {
            return Err(Error::invalid(
                "params",
                format!("expected {} parameters, got {}", self.params_len(), params.len()),
            ));
        }
        Ok(())
    }
}

/// Materialize the pulse train described by a parameter vector.
pub fn sequence_from_params(spec: &OptimizerSpec, params: &[f64]) -> Result<CompositeSequence> {
    spec.check_params(params)?;
    let nf = spec.free_pulses();
    let pulses: Result<Vec<Pulse>> = (0..spec.n_pulses)
        .map(|k| {
            let f = spec.free_index(k);
            let omega = if spec.vary_amplitudes { params[nf + f] } else { 1.0 };
            Pulse::new(omega, spec.tau, params[f])
        })
        .collect();
    CompositeSequence::new("optimized", pulses?, spec.target, spec.symmetric)
}

/// The objective: mean infidelity over the spec's box and grid, plus the
/// optional area penalty `w·Σω_k·τ_k`.
pub fn objective(params: &[f64], spec: &OptimizerSpec) -> Result<f64> {
    let seq = sequence_from_params(spec, params)?;
    let mean = average_infidelity(&seq, &target_gate(spec.target), &spec.bx, spec.grid)?;
    Ok(mean + spec.area_penalty * seq.area_over_pi())
}

/// Analytic gradient of [`objective`] with respect to the parameters.
pub fn objective_gradient(params: &[f64], spec: &OptimizerSpec) -> Result<Vec<f64>> {
    spec.check_params(params)?;
    let seq = sequence_from_params(spec, params)?;
    let g = target_gate(spec.target);
    let n = spec.n_pulses;
    let nf = spec.free_pulses();
    let eps = axis_samples(spec.bx.eps.0, spec.bx.eps.1, spec.grid.0);
    let deltas = axis_samples(spec.bx.delta.0, spec.bx.delta.1, spec.grid.1);

    let mut grad = vec![0.0; spec.params_len()];
    let mut units: Vec<Mat2> = Vec::with_capacity(n);
    let mut d_omega: Vec<Mat2> = Vec::with_capacity(n);
    let mut d_phase: Vec<Mat2> = Vec::with_capacity(n);
    let mut prefix: Vec<Mat2> = Vec::with_capacity(n + 1);
    let mut suffix: Vec<Mat2> = vec![Mat2::identity(); n + 1];

    for &e in &eps {
        for &d in &deltas {
            let point = ErrorPoint { epsilon: e, delta: d };
            units.clear();
            d_omega.clear();
            d_phase.clear();
            for p in &seq.pulses {
                let (u, duo, dup) = pulse_propagator_partials(p, &point);
                units.push(u);
                d_omega.push(duo);
                d_phase.push(dup);
            }
            // prefix[k] = U_{k−1}···U_0, suffix[k] = U_{N−1}···U_{k+1}
            prefix.clear();
            prefix.push(Mat2::identity());
            for k in 0..n {
                let next = units[k].mul(&prefix[k]);
                prefix.push(next);
            }
            suffix[n - 1] = Mat2::identity();
            for k in (0..n.saturating_sub(1)).rev() {
                suffix[k] = suffix[k + 1].mul(&units[k + 1]);
            }
            let total = &prefix[n];
            let t = trace_adjoint_product(total, g.mat());
            for k in 0..n {
                let f = spec.free_index(k);
                let dphi = suffix[k].mul(&d_phase[k]).mul(&prefix[k]);
                grad[f] += infid_slope(t, &dphi, g.mat());
                if spec.vary_amplitudes {
                    let domega = suffix[k].mul(&d_omega[k]).mul(&prefix[k]);
                    grad[nf + f] += infid_slope(t, &domega, g.mat());
                }
            }
        }
    }
    let count = (spec.grid.0 * spec.grid.1) as f64;
    for v in grad.iter_mut() {
        *v /= count;
    }
    if spec.vary_amplitudes && spec.area_penalty != 0.0 {
        for k in 0..n {
            grad[nf + spec.free_index(k)] += spec.area_penalty * spec.tau;
        }
    }
    Ok(grad)
}

/// `Tr(U†G)`.
fn trace_adjoint_product(u: &Mat2, g: &Mat2) -> C64 {
    u.e.iter().zip(g.e.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `d(1−F)/dθ` given `t = Tr(𝒰†G)` and `d𝒰/dθ`.
fn infid_slope(t: C64, du: &Mat2, g: &Mat2) -> f64 {
    let dt = trace_adjoint_product(du, g);
    -(t.conj() * dt).re / 3.0
}

/// Wrap phases to `[0, 2π)` and clamp amplitudes to their bounds.
pub fn project(params: &[f64], spec: &OptimizerSpec) -> Vec<f64> {
    let nf = spec.free_pulses();
    let (lo, hi) = spec.amplitude_bounds;
    params
        .iter()
        .enumerate()
        .map(|(i, &v)| if i < nf { wrap_phase(v) } else { v.clamp(lo, hi) })
        .collect()
}

/// Result of an optimization run.
#[derive(Debug, Clone)]
pub struct OptResult {
    /// Best parameter vector found (projected).
    pub params: Vec<f64>,
    /// Objective at `params`, recomputed from scratch on return.
    pub objective: f64,
    /// Mean infidelity at `params` without the area penalty.
    pub mean_infidelity: f64,
    /// Index of the winning start.
    pub best_start: usize,
    /// Best objective reached by each start.
    pub per_start: Vec<f64>,
    /// Best-so-far objective of the winning start, one entry per
    /// evaluated iterate (the first is the projected initial point).
    pub trace: Vec<f64>,
    /// Moment decays and stabilizer of the update rule, recorded with the
    /// result.
    pub adam: (f64, f64, f64),
}

struct StartOutcome {
    best_obj: f64,
    best_params: Vec<f64>,
    trace: Vec<f64>,
}

/// Improvements smaller than this do not reset the stall counter.
const IMPROVEMENT_TOL: f64 = 1e-12;
/// Iterations without improvement before a start stops early.
const STALL_WINDOW: usize = 200;

fn run_start(spec: &OptimizerSpec, index: usize) -> Result<StartOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let nf = spec.free_pulses();
    let (lo, hi) = spec.amplitude_bounds;
    let mut params: Vec<f64> = (0..nf).map(|_| rng.gen_range(0.0..TAU)).collect();
    if spec.vary_amplitudes {
        params.extend((0..nf).map(|_| if lo < hi { rng.gen_range(lo..hi) } else { lo }));
    }
    params = project(&params, spec);

    let mut best_obj = objective(&params, spec)?;
    let mut best_params = params.clone();
    let mut trace = vec![best_obj];
    let mut m = vec![0.0; params.len()];
    let mut v = vec![0.0; params.len()];
    let mut stall = 0usize;

    for t in 1..=spec.max_iters {
        let mut g = objective_gradient(&params, spec)?;
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > spec.clip_norm {
            let scale = spec.clip_norm / norm;
            for x in g.iter_mut() {
                *x *= scale;
            }
        }
        let bc1 = 1.0 - ADAM_BETA1.powi(t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(t as i32);
        for i in 0..params.len() {
            m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g[i];
            v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g[i] * g[i];
            params[i] -= spec.learning_rate * (m[i] / bc1) / ((v[i] / bc2).sqrt() + ADAM_EPSILON);
        }
        params = project(&params, spec);
        let obj = objective(&params, spec)?;
        if obj < best_obj - IMPROVEMENT_TOL {
            best_obj = obj;
            best_params = params.clone();
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(best_obj);
        if stall >= STALL_WINDOW {
            break;
        }
    }
    Ok(StartOutcome { best_obj, best_params, trace })
}

/// Multi-start projected gradient descent on the objective.
///
/// Returns the best parameters across all starts (ties broken by start
/// index), with the objective recomputed from the returned parameters.
pub fn optimize(spec: &OptimizerSpec) -> Result<OptResult> {
    spec.validate()?;
    let outcomes: Vec<StartOutcome> = (0..spec.starts)
        .into_par_iter()
        .map(|i| run_start(spec, i))
        .collect::<Result<_>>()?;
    let best_start = (0..outcomes.len())
        .min_by(|&a, &b| outcomes[a].best_obj.total_cmp(&outcomes[b].best_obj))
        .expect("at least one start");
    let per_start = outcomes.iter().map(|o| o.best_obj).collect();
    let winner = &outcomes[best_start];
    let params = winner.best_params.clone();
    let seq = sequence_from_params(spec, &params)?;
    let mean_infidelity =
        average_infidelity(&seq, &target_gate(spec.target), &spec.bx, spec.grid)?;
    Ok(OptResult {
        objective: mean_infidelity + spec.area_penalty * seq.area_over_pi(),
        mean_infidelity,
        params,
        best_start,
        per_start,
        trace: winner.trace.clone(),
        adam: (ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> OptimizerSpec {
        let mut spec = OptimizerSpec::new(3, GateKind::X);
        spec.grid = (4, 4);
        spec.starts = 2;
        spec.max_iters = 50;
        spec
    }

    #[test]
    fn project_wraps_and_clamps() {
        let mut spec = small_spec();
        spec.vary_amplitudes = true;
        let p = project(&[TAU + 0.1, -0.2, 1.0, 2.3, -0.5, 1.2], &spec);
        assert!((p[0] - 0.1).abs() < 1e-12);
        assert!((p[1] - (TAU - 0.2)).abs() < 1e-12);
        assert_eq!(p[3], 2.0);
        assert_eq!(p[4], 0.0);
        assert_eq!(p[5], 1.2);
        // idempotence
        assert_eq!(project(&p, &spec), p);
    }

    #[test]
    fn exact_gate_has_zero_objective_on_origin_grid() {
        let mut spec = OptimizerSpec::new(1, GateKind::X);
        spec.grid = (1, 1);
        spec.bx = ErrorBox { eps: (0.0, 0.0), delta: (0.0, 0.0) };
        let obj = objective(&[0.0], &spec).unwrap();
        assert!(obj < 1e-12);
    }

    #[test]
    fn param_length_mismatch_is_rejected() {
        let spec = small_spec();
        assert!(objective(&[0.0], &spec).is_err());
        assert!(objective_gradient(&[0.0; 7], &spec).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut spec = OptimizerSpec::new(3, GateKind::Rx90);
        spec.vary_amplitudes = true;
        spec.grid = (3, 3);
        let params = vec![0.7, 2.1, 4.4, 0.9, 1.3, 1.7];
        let grad = objective_gradient(&params, &spec).unwrap();
        let h = 1e-6;
        for i in 0..params.len() {
            let mut p = params.clone();
            p[i] += h;
            let up = objective(&p, &spec).unwrap();
            p[i] -= 2.0 * h;
            let dn = objective(&p, &spec).unwrap();
            let fd = (up - dn) / (2.0 * h);
            let denom = fd.abs().max(1e-8);
            assert!(
                ((grad[i] - fd) / denom).abs() < 1e-5,
                "param {i}: analytic {} vs fd {}",
                grad[i],
                fd
            );
        }
    }

    #[test]
    fn symmetric_gradient_accumulates_mirrored_pulses() {
        let mut spec = OptimizerSpec::new(5, GateKind::X);
        spec.symmetric = true;
        spec.vary_amplitudes = true;
        spec.grid = (3, 3);
        assert_eq!(spec.params_len(), 6);
        let params = vec![0.3, 1.9, 5.2, 1.1, 0.8, 1.4];
        let grad = objective_gradient(&params, &spec).unwrap();
        let h = 1e-6;
        for i in 0..params.len() {
            let mut p = params.clone();
            p[i] += h;
            let up = objective(&p, &spec).unwrap();
            p[i] -= 2.0 * h;
            let dn = objective(&p, &spec).unwrap();
            let fd = (up - dn) / (2.0 * h);
            assert!((grad[i] - fd).abs() < 1e-6 * (1.0 + fd.abs()), "param {i}");
        }
    }

    #[test]
    fn area_penalty_shifts_objective_and_gradient() {
        let mut spec = OptimizerSpec::new(2, GateKind::X);
        spec.vary_amplitudes = true;
        spec.grid = (2, 2);
        let params = vec![0.3, 1.0, 1.2, 0.7];
        let base = objective(&params, &spec).unwrap();
        spec.area_penalty = 0.5;
        let with = objective(&params, &spec).unwrap();
        assert!((with - base - 0.5 * (1.2 + 0.7)).abs() < 1e-12);
        let grad = objective_gradient(&params, &spec).unwrap();
        spec.area_penalty = 0.0;
        let grad0 = objective_gradient(&params, &spec).unwrap();
        assert!((grad[2] - grad0[2] - 0.5).abs() < 1e-12);
        assert!((grad[0] - grad0[0]).abs() < 1e-15);
    }

    #[test]
    fn zero_iterations_returns_projected_initial_point() {
        let mut spec = small_spec();
        spec.starts = 1;
        spec.max_iters = 0;
        let res = optimize(&spec).unwrap();
        assert_eq!(res.trace.len(), 1);
        assert!((res.objective - res.trace[0]).abs() < 1e-15);
        assert!((objective(&res.params, &spec).unwrap() - res.objective).abs() < 1e-15);
    }

    #[test]
    fn trace_is_non_increasing_and_objective_recomputes() {
        let spec = small_spec();
        let res = optimize(&spec).unwrap();
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!((objective(&res.params, &spec).unwrap() - res.objective).abs() < 1e-12);
        assert_eq!(res.per_start.len(), 2);
        assert!(res.per_start[res.best_start] <= res.per_start.iter().cloned().fold(f64::MAX, f64::min) + 1e-15);
    }

    #[test]
    fn fixed_seed_is_bit_stable() {
        let spec = small_spec();
        let a = optimize(&spec).unwrap();
        let b = optimize(&spec).unwrap();
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!(a.params, b.params);
    }
}
