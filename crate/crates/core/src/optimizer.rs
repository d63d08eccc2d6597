//! Perturbative ascent of the received gain over unit-modulus RIS loads.
//!
//! S-OPT linearizes the S-form channel around the current phases and moves
//! every phase by ±Δ simultaneously; Z-OPT is the analogous first-order
//! ascent on load reactances driven by the Z-form transfer value. Both are
//! scored and safeguarded on the same physical gain so their traces are
//! directly comparable. Brute-force enumeration and central finite
//! differences serve as oracles.

use crate::channel::{e2e_s, gain};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, Lu, DEFAULT_COND_CAP};
use crate::netparams::{z_to_s, ImpedanceBlocks, ScatteringBlocks};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

const TWO_PI: f64 = 2.0 * PI;

/// Wrap to (−π, π].
fn wrap_phase(p: f64) -> f64 {
    let mut w = p.rem_euclid(TWO_PI);
    if w > PI {
        w -= TWO_PI;
    }
    w
}

/// Per-element RIS load state. Phases are the source of truth; reflection
/// coefficients Σ_k = e^{jφ_k} and load reactances X_k (via
/// Σ = (jX/Z₀ − 1)/(jX/Z₀ + 1), i.e. X = Z₀·cot(φ/2)) are derived views.
#[derive(Clone, Debug, PartialEq)]
pub struct RisLoadState {
    phases: Vec<f64>,
}

impl RisLoadState {
    /// All phases zero (Σ = 1); the S-OPT default start.
    pub fn zero_phases(n: usize) -> Self {
        Self {
            phases: vec![0.0; n],
        }
    }

    /// All reactances zero (φ = π, short-circuit loads); the Z-OPT default
    /// start, since zero phase maps to an infinite reactance.
    pub fn short_circuit(n: usize) -> Self {
        Self {
            phases: vec![PI; n],
        }
    }

    pub fn from_phases(phases: Vec<f64>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        }
    }

    /// Build from load reactances: φ = 2·atan2(Z₀, X), wrapped.
    pub fn from_reactances(x: &[f64], z0: f64) -> Self {
        Self {
            phases: x.iter().map(|&xi| wrap_phase(2.0 * z0.atan2(xi))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Unit-modulus reflection coefficients Σ_k = e^{jφ_k}.
    pub fn sigma(&self) -> CVector {
        CVector::from_iterator(
            self.phases.len(),
            self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
        )
    }

    /// Equivalent load reactances; φ = 0 maps to +∞.
    pub fn reactances(&self, z0: f64) -> Vec<f64> {
        self.phases
            .iter()
            .map(|&p| {
                let half = 0.5 * p;
                z0 * half.cos() / half.sin()
            })
            .collect()
    }
}

/// Step-size schedule: Δ_{m+1} = max(Δ_m·decay, min_delta) on acceptance;
/// rejected steps halve Δ instead (also floored).
#[derive(Clone, Copy, Debug)]
pub struct StepSchedule {
    pub delta0: f64,
    pub decay: f64,
    pub min_delta: f64,
    pub greedy_safeguard: bool,
}

impl StepSchedule {
    /// Phase-domain default: Δ₀ = 0.05 rad.
    pub fn phase_default() -> Self {
        Self {
            delta0: 0.05,
            decay: 0.98,
            min_delta: 1e-3,
            greedy_safeguard: true,
        }
    }

    /// Reactance-domain default: Δ₀ = 1 Ω. The floor is finer than the
    /// phase floor because a reactance step's effect on the phase shrinks
    /// as 1/(1 + (X/Z₀)²).
    pub fn reactance_default() -> Self {
        Self {
            delta0: 1.0,
            decay: 0.98,
            min_delta: 0.01,
            greedy_safeguard: true,
        }
    }

    fn validate_common(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.delta0) || !positive(self.min_delta) || self.min_delta > self.delta0 {
            return Err(Error::InvalidConfig(format!(
                "step schedule requires 0 < min_delta <= delta0, got delta0={}, min_delta={}",
                self.delta0, self.min_delta
            )));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "decay must be in (0, 1], got {}",
                self.decay
            )));
        }
        Ok(())
    }

    /// Phase schedules must keep the linearization valid: Δ₀ ≤ 0.2 rad.
    fn validate_phase(&self) -> Result<()> {
        self.validate_common()?;
        if self.delta0 > 0.2 {
            return Err(Error::InvalidConfig(format!(
                "phase step delta0 must be <= 0.2 rad, got {}",
                self.delta0
            )));
        }
        Ok(())
    }
}

/// Iteration budget plus a windowed relative-improvement test.
/// `window = 0` disables the improvement test.
#[derive(Clone, Copy, Debug)]
pub struct StoppingRule {
    pub max_iters: usize,
    pub window: usize,
    pub rel_improvement: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            window: 20,
            rel_improvement: 1e-6,
        }
    }
}

impl StoppingRule {
    /// Run the full budget unconditionally.
    pub fn fixed_budget(max_iters: usize) -> Self {
        Self {
            max_iters,
            window: 0,
            rel_improvement: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub gain: f64,
    pub delta: f64,
    pub accepted: bool,
}

/// Full record of one optimization run. `records[m-1]` holds the state
/// after iteration m; gains are the physical received gain.
#[derive(Clone, Debug)]
pub struct OptimizerTrace {
    pub initial_gain: f64,
    pub records: Vec<TraceRecord>,
    pub final_state: RisLoadState,
    pub final_gain: f64,
    /// True when the run consumed max_iters without meeting the
    /// improvement test (informational, not an error).
    pub budget_exhausted: bool,
    pub wall_time: Duration,
}

impl OptimizerTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// First iteration index whose gain reaches `frac` of the final gain
    /// (0 if the initial state already does).
    pub fn iterations_to_fraction(&self, frac: f64) -> usize {
        let target = frac * self.final_gain;
        if self.initial_gain >= target {
            return 0;
        }
        for r in &self.records {
            if r.gain >= target {
                return r.iteration;
            }
        }
        self.records.len()
    }

    /// First iteration whose gain reaches the absolute `level`; 0 if the
    /// initial state already does, None if the trace never gets there.
    /// Lets traces from different runs race to a shared target.
    pub fn iterations_to_level(&self, level: f64) -> Option<usize> {
        if self.initial_gain >= level {
            return Some(0);
        }
        self.records
            .iter()
            .find(|r| r.gain >= level)
            .map(|r| r.iteration)
    }
}

/// Sign of the linearization coefficient: the derivative chain yields +j,
/// the alternative form in circulation carries −j. Both are available; the
/// solver uses the empirically validated one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientSign {
    Plus,
    Minus,
}

impl GradientSign {
    fn factor(self) -> Complex64 {
        match self {
            GradientSign::Plus => Complex64::new(0.0, 1.0),
            GradientSign::Minus => Complex64::new(0.0, -1.0),
        }
    }
}

/// First-order quantities of the S-form channel at a load state:
/// A is the current channel value, Q = Γ⁻¹ − S_SS, b₁ = S_RS·P,
/// b₂ = Q⁻¹·S_ST, P = sign·j·Q⁻¹·Γ⁻²·e^{jφ}, and C_k = b₁_k·b₂_k is the
/// per-element derivative estimate ∂Ĥ/∂φ_k.
#[derive(Clone, Debug)]
pub struct FirstOrderQuantities {
    pub a: Complex64,
    pub q: CMatrix,
    pub b1: CVector,
    pub b2: CVector,
    pub p: CMatrix,
    pub sign: GradientSign,
}

impl FirstOrderQuantities {
    pub fn c(&self) -> CVector {
        CVector::from_fn(self.b1.len(), |k, _| self.b1[k] * self.b2[k])
    }
}

fn require_siso(p: crate::netparams::PortPartition, what: &str) -> Result<()> {
    if p.n_t != 1 || p.n_r != 1 {
        return Err(Error::InvalidConfig(format!(
            "{what} requires a SISO partition"
        )));
    }
    Ok(())
}

/// Q = Γ⁻¹ − S_SS for unit-modulus loads: Γ⁻¹ = diag(e^{−jφ}).
fn q_matrix(blocks: &ScatteringBlocks, state: &RisLoadState) -> CMatrix {
    let n = state.len();
    let mut q = -blocks.ss.clone();
    for k in 0..n {
        q[(k, k)] += Complex64::from_polar(1.0, -state.phases[k]);
    }
    q
}

/// Full audited first-order computation, P included.
pub fn first_order_with_sign(
    blocks: &ScatteringBlocks,
    state: &RisLoadState,
    sign: GradientSign,
) -> Result<FirstOrderQuantities> {
    require_siso(blocks.p, "first_order")?;
    let n = state.len();
    if n != blocks.p.n_s {
        return Err(Error::DimensionMismatch {
            context: "load state length vs RIS ports",
            expected: blocks.p.n_s,
            got: n,
        });
    }
    let q = q_matrix(blocks, state);
    let lu = Lu::new(&q);
    let cond = lu.cond1();
    if !cond.is_finite() || cond > DEFAULT_COND_CAP {
        return Err(Error::ResonantConfiguration {
            context: "Q = Γ⁻¹ − S_SS in first_order",
            cond,
            cap: DEFAULT_COND_CAP,
        });
    }
    let b2 = lu
        .solve(&blocks.st)
        .ok_or(Error::SingularNetwork)?
        .column(0)
        .into_owned();
    let a = blocks.rt[(0, 0)] + (0..n).map(|k| blocks.rs[(0, k)] * b2[k]).sum::<Complex64>();
    // Γ⁻²·e^{jφ} = diag(e^{−jφ})
    let d = CVector::from_fn(n, |k, _| Complex64::from_polar(1.0, -state.phases[k]));
    let qinv_d = {
        let mut rhs = CMatrix::zeros(n, n);
        for k in 0..n {
            rhs[(k, k)] = d[k];
        }
        lu.solve(&rhs).ok_or(Error::SingularNetwork)?
    };
    let p = &qinv_d * sign.factor();
    let mut b1 = CVector::zeros(n);
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc += blocks.rs[(0, i)] * p[(i, k)];
        }
        b1[k] = acc;
    }
    Ok(FirstOrderQuantities {
        a,
        q,
        b1,
        b2,
        p,
        sign,
    })
}

/// First-order quantities with the empirically resolved sign.
pub fn first_order(
    blocks: &ScatteringBlocks,
    state: &RisLoadState,
) -> Result<FirstOrderQuantities> {
    first_order_with_sign(blocks, state, resolved_gradient_sign())
}

/// Lean (A, C) evaluation for the iteration loop: two solves against one
/// factorization, no P matrix. Agrees with `first_order` exactly in exact
/// arithmetic; a unit test pins the two paths together.
fn lean_first_order(
    blocks: &ScatteringBlocks,
    state: &RisLoadState,
    sign: GradientSign,
) -> Result<(Complex64, CVector)> {
    let n = state.len();
    let q = q_matrix(blocks, state);
    let lu = Lu::new(&q);
    let b2 = match lu.solve(&blocks.st) {
        Some(x) => x.column(0).into_owned(),
        None => {
            return Err(Error::ResonantConfiguration {
                context: "Q = Γ⁻¹ − S_SS in the iteration loop",
                cond: f64::INFINITY,
                cap: DEFAULT_COND_CAP,
            })
        }
    };
    let a = blocks.rt[(0, 0)] + (0..n).map(|k| blocks.rs[(0, k)] * b2[k]).sum::<Complex64>();
    // row = S_RS·Q⁻¹ via the transposed system
    let rs_t = CVector::from_fn(n, |k, _| blocks.rs[(0, k)]);
    let row = Lu::solve_transpose(&q, &rs_t).ok_or(Error::ResonantConfiguration {
        context: "Qᵀ in the iteration loop",
        cond: f64::INFINITY,
        cap: DEFAULT_COND_CAP,
    })?;
    let jf = sign.factor();
    let c = CVector::from_fn(n, |k, _| {
        jf * Complex64::from_polar(1.0, -state.phases[k]) * row[k] * b2[k]
    });
    Ok((a, c))
}

/// Central-difference estimate of ∂Ĥ/∂φ_k from two channel evaluations
/// per element. `h` must lie in [1e-8, 1e-3].
pub fn finite_diff_gradient(
    blocks: &ScatteringBlocks,
    state: &RisLoadState,
    h: f64,
) -> Result<CVector> {
    require_siso(blocks.p, "finite_diff_gradient")?;
    if !(1e-8..=1e-3).contains(&h) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must lie in [1e-8, 1e-3], got {h}"
        )));
    }
    let n = state.len();
    let mut grad = CVector::zeros(n);
    let phases = state.phases().to_vec();
    for k in 0..n {
        let mut plus = phases.clone();
        plus[k] += h;
        let mut minus = phases.clone();
        minus[k] -= h;
        let hp = e2e_s(blocks, &RisLoadState::from_phases(plus).sigma())?.scalar();
        let hm = e2e_s(blocks, &RisLoadState::from_phases(minus).sigma())?.scalar();
        grad[k] = (hp - hm) / Complex64::new(2.0 * h, 0.0);
    }
    Ok(grad)
}

fn probe_blocks() -> ScatteringBlocks {
    let c = Complex64::new;
    ScatteringBlocks {
        p: crate::netparams::PortPartition {
            n_t: 1,
            n_s: 2,
            n_r: 1,
        },
        z0: 50.0,
        tt: CMatrix::zeros(1, 1),
        ts: CMatrix::zeros(1, 2),
        tr: CMatrix::zeros(1, 1),
        st: CMatrix::from_column_slice(2, 1, &[c(0.1, -0.2), c(0.3, 0.1)]),
        ss: CMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.10, 0.05),
                c(0.08, -0.02),
                c(0.08, -0.02),
                c(-0.05, 0.10),
            ],
        ),
        sr: CMatrix::zeros(2, 1),
        rt: CMatrix::from_element(1, 1, c(0.05, 0.02)),
        rs: CMatrix::from_row_slice(1, 2, &[c(0.2, 0.1), c(-0.15, 0.05)]),
        rr: CMatrix::zeros(1, 1),
    }
}

/// The linearization sign validated once against finite differences on a
/// fixed probe scene, then cached for the process lifetime.
pub fn resolved_gradient_sign() -> GradientSign {
    static RESOLVED: OnceLock<GradientSign> = OnceLock::new();
    *RESOLVED.get_or_init(|| {
        let blocks = probe_blocks();
        let state = RisLoadState::from_phases(vec![0.3, -0.8]);
        let fd =
            finite_diff_gradient(&blocks, &state, 1e-6).expect("probe scene is well-conditioned");
        let fo = first_order_with_sign(&blocks, &state, GradientSign::Plus)
            .expect("probe scene is well-conditioned");
        let c = fo.c();
        let (mut match_plus, mut match_minus) = (0.0f64, 0.0f64);
        for k in 0..2 {
            match_plus += (c[k] - fd[k]).norm();
            match_minus += (c[k] + fd[k]).norm();
        }
        if match_plus <= match_minus {
            GradientSign::Plus
        } else {
            GradientSign::Minus
        }
    })
}

/// One simultaneous perturbation: δ_k = +Δ if |A + C_k·Δ| ≥ |A − C_k·Δ|,
/// else −Δ (ties go to +Δ). Returns the updated state and the chosen δ.
pub fn sopt_step(
    blocks: &ScatteringBlocks,
    state: &RisLoadState,
    delta: f64,
) -> Result<(RisLoadState, Vec<f64>)> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "step must be positive, got {delta}"
        )));
    }
    let (a, c) = lean_first_order(blocks, state, resolved_gradient_sign())?;
    let deltas = choose_deltas(a, &c, delta);
    let new_phases: Vec<f64> = state
        .phases()
        .iter()
        .zip(&deltas)
        .map(|(&p, &d)| wrap_phase(p + d))
        .collect();
    Ok((RisLoadState::from_phases(new_phases), deltas))
}

fn choose_deltas(a: Complex64, c: &CVector, delta: f64) -> Vec<f64> {
    c.iter()
        .map(|ck| {
            let plus = (a + ck * Complex64::new(delta, 0.0)).norm();
            let minus = (a - ck * Complex64::new(delta, 0.0)).norm();
            if plus >= minus {
                delta
            } else {
                -delta
            }
        })
        .collect()
}

fn physical_gain(blocks: &ScatteringBlocks, state: &RisLoadState) -> Result<f64> {
    Ok(gain(&e2e_s(blocks, &state.sigma())?))
}

/// Iterative S-form ascent with the greedy safeguard and windowed stop.
pub fn sopt_run(
    blocks: &ScatteringBlocks,
    init: &RisLoadState,
    schedule: &StepSchedule,
    stop: &StoppingRule,
) -> Result<OptimizerTrace> {
    require_siso(blocks.p, "sopt_run")?;
    schedule.validate_phase()?;
    if init.len() != blocks.p.n_s {
        return Err(Error::DimensionMismatch {
            context: "initial state length vs RIS ports",
            expected: blocks.p.n_s,
            got: init.len(),
        });
    }
    let sign = resolved_gradient_sign();
    let started = Instant::now();
    let mut state = init.clone();
    let mut g = physical_gain(blocks, &state)?;
    let initial_gain = g;
    let mut gains = Vec::with_capacity(stop.max_iters + 1);
    gains.push(g);
    let mut records = Vec::with_capacity(stop.max_iters);
    let mut delta = schedule.delta0;
    let mut budget_exhausted = true;

    for m in 1..=stop.max_iters {
        let (a, c) = lean_first_order(blocks, &state, sign)?;
        let deltas = choose_deltas(a, &c, delta);
        let cand_phases: Vec<f64> = state
            .phases()
            .iter()
            .zip(&deltas)
            .map(|(&p, &d)| wrap_phase(p + d))
            .collect();
        let cand = RisLoadState::from_phases(cand_phases);
        let g_cand = physical_gain(blocks, &cand)?;
        let used_delta = delta;
        let accepted = !schedule.greedy_safeguard || g_cand >= g;
        if accepted {
            state = cand;
            g = g_cand;
            delta = (delta * schedule.decay).max(schedule.min_delta);
        } else {
            delta = (delta * 0.5).max(schedule.min_delta);
        }
        records.push(TraceRecord {
            iteration: m,
            gain: g,
            delta: used_delta,
            accepted,
        });
        gains.push(g);
        if stop.window > 0 && m >= stop.window {
            let before = gains[m - stop.window];
            let improvement = if before > 0.0 {
                (g - before) / before
            } else if g > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if improvement < stop.rel_improvement {
                budget_exhausted = false;
                break;
            }
        }
    }

    Ok(OptimizerTrace {
        initial_gain,
        records,
        final_state: state,
        final_gain: g,
        budget_exhausted,
        wall_time: started.elapsed(),
    })
}

/// Best-of-N restarts: the deterministic zero-phase start plus seeded
/// uniform-random starts. Returns the trace of the best final gain.
pub fn sopt_multistart(
    blocks: &ScatteringBlocks,
    schedule: &StepSchedule,
    stop: &StoppingRule,
    extra_starts: usize,
    seed: u64,
) -> Result<OptimizerTrace> {
    let n = blocks.p.n_s;
    let mut best = sopt_run(blocks, &RisLoadState::zero_phases(n), schedule, stop)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra_starts {
        let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
        let trace = sopt_run(blocks, &RisLoadState::from_phases(phases), schedule, stop)?;
        if trace.final_gain > best.final_gain {
            best = trace;
        }
    }
    Ok(best)
}

/// Z-form transfer value H(X) = Z_RT − Z_RS·(Z_SS + diag(jX))⁻¹·Z_ST.
pub fn h_z(zb: &ImpedanceBlocks, x: &[f64]) -> Result<Complex64> {
    let (a, _) = z_first_order(zb, x)?;
    Ok(a)
}

/// Z-form value and per-element derivative dH/dX_k = j·(Z_RS·M⁻¹)_k·(M⁻¹·Z_ST)_k
/// with M = Z_SS + diag(jX).
pub fn z_first_order(zb: &ImpedanceBlocks, x: &[f64]) -> Result<(Complex64, CVector)> {
    require_siso(zb.p, "z_first_order")?;
    let n = zb.p.n_s;
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "reactance vector length vs RIS ports",
            expected: n,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "Z-form evaluation requires finite reactances".into(),
        ));
    }
    let mut m = zb.ss.clone();
    for k in 0..n {
        m[(k, k)] += Complex64::new(0.0, x[k]);
    }
    let lu = Lu::new(&m);
    let cond = lu.cond1();
    if !cond.is_finite() || cond > DEFAULT_COND_CAP {
        return Err(Error::ResonantConfiguration {
            context: "M = Z_SS + diag(jX) in z_first_order",
            cond,
            cap: DEFAULT_COND_CAP,
        });
    }
    let minv_st = lu
        .solve(&zb.st)
        .ok_or(Error::SingularNetwork)?
        .column(0)
        .into_owned();
    let a = zb.rt[(0, 0)]
        - (0..n)
            .map(|k| zb.rs[(0, k)] * minv_st[k])
            .sum::<Complex64>();
    let rs_t = CVector::from_fn(n, |k, _| zb.rs[(0, k)]);
    let row = Lu::solve_transpose(&m, &rs_t).ok_or(Error::SingularNetwork)?;
    let j = Complex64::new(0.0, 1.0);
    let c = CVector::from_fn(n, |k, _| j * row[k] * minv_st[k]);
    Ok((a, c))
}

fn gamma_of_reactance(x: f64, z0: f64) -> Complex64 {
    (Complex64::new(0.0, x) - Complex64::new(z0, 0.0))
        / (Complex64::new(0.0, x) + Complex64::new(z0, 0.0))
}

/// Z-form analog of the ascent: the step direction comes from the Z-form
/// linearization, while acceptance and the recorded gain use the same
/// physical S-form metric as `sopt_run`, so the two traces are comparable
/// point by point.
pub fn zopt_run(
    zb: &ImpedanceBlocks,
    init: &RisLoadState,
    schedule: &StepSchedule,
    stop: &StoppingRule,
) -> Result<OptimizerTrace> {
    require_siso(zb.p, "zopt_run")?;
    schedule.validate_common()?;
    let n = zb.p.n_s;
    if init.len() != n {
        return Err(Error::DimensionMismatch {
            context: "initial state length vs RIS ports",
            expected: n,
            got: init.len(),
        });
    }
    let z0 = zb.z0;
    let mut x = init.reactances(z0);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "Z-OPT requires finite initial reactances; zero phase maps to an infinite load".into(),
        ));
    }

    // shared physical metric: the S-blocks of the same scene
    let full_s = z_to_s(&zb.reassemble(), z0)?;
    let sb = ScatteringBlocks::partition(&full_s, zb.p)?;
    let gain_of = |x: &[f64]| -> Result<f64> {
        let gamma = CVector::from_iterator(n, x.iter().map(|&xi| gamma_of_reactance(xi, z0)));
        Ok(gain(&e2e_s(&sb, &gamma)?))
    };

    let started = Instant::now();
    let mut g = gain_of(&x)?;
    let initial_gain = g;
    let mut gains = Vec::with_capacity(stop.max_iters + 1);
    gains.push(g);
    let mut records = Vec::with_capacity(stop.max_iters);
    let mut delta = schedule.delta0;
    let mut budget_exhausted = true;

    for m in 1..=stop.max_iters {
        let (a, c) = z_first_order(zb, &x)?;
        let deltas = choose_deltas(a, &c, delta);
        let cand: Vec<f64> = x.iter().zip(&deltas).map(|(&xi, &d)| xi + d).collect();
        let g_cand = gain_of(&cand)?;
        let used_delta = delta;
        let accepted = !schedule.greedy_safeguard || g_cand >= g;
        if accepted {
            x = cand;
            g = g_cand;
            delta = (delta * schedule.decay).max(schedule.min_delta);
        } else {
            delta = (delta * 0.5).max(schedule.min_delta);
        }
        records.push(TraceRecord {
            iteration: m,
            gain: g,
            delta: used_delta,
            accepted,
        });
        gains.push(g);
        if stop.window > 0 && m >= stop.window {
            let before = gains[m - stop.window];
            let improvement = if before > 0.0 {
                (g - before) / before
            } else if g > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if improvement < stop.rel_improvement {
                budget_exhausted = false;
                break;
            }
        }
    }

    Ok(OptimizerTrace {
        initial_gain,
        records,
        final_state: RisLoadState::from_reactances(&x, z0),
        final_gain: g,
        budget_exhausted,
        wall_time: started.elapsed(),
    })
}

/// Exhaustive maximization of the gain over the discrete phase grid
/// φ_k ∈ {2πi/levels}. Guarded at 10⁷ grid points. Ties resolve to the
/// lexicographically smallest index vector.
pub fn brute_force_phases(blocks: &ScatteringBlocks, levels: usize) -> Result<(CVector, f64)> {
    require_siso(blocks.p, "brute_force_phases")?;
    if levels == 0 {
        return Err(Error::InvalidConfig("levels must be >= 1".into()));
    }
    let n = blocks.p.n_s;
    let total = (levels as f64).powi(n as i32);
    if total > 1e7 {
        return Err(Error::BudgetExceeded {
            requested: total,
            cap: 1e7,
        });
    }
    let grid: Vec<Complex64> = (0..levels)
        .map(|i| Complex64::from_polar(1.0, TWO_PI * i as f64 / levels as f64))
        .collect();
    let mut idx = vec![0usize; n];
    let mut best_gamma = CVector::from_element(n, grid[0]);
    let mut best_g = -1.0f64;
    let mut gamma = CVector::zeros(n);
    loop {
        for k in 0..n {
            gamma[k] = grid[idx[k]];
        }
        let g = gain(&e2e_s(blocks, &gamma)?);
        if g > best_g {
            best_g = g;
            best_gamma.copy_from(&gamma);
        }
        // odometer increment, index 0 most significant: lexicographic order
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok((best_gamma, best_g));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < levels {
                break;
            }
            idx[pos] = 0;
        }
    }
}
