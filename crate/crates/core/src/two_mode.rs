//! Reference integrator for the non-Hermitian two-mode model with balanced
//! gain and loss.
//!
//! The Hamiltonian has `+i Gamma` on the first mode, `-i Gamma` on the
//! second, tunneling `-J` between them and the usual contact nonlinearity
//! (onsite energies are zero). The observable quadruple
//! `(n_1, n_2, jt_12, C_12)` obeys a closed set of real equations, which the
//! embedded wells of the controlled Hermitian chain must reproduce; this
//! module is the exactness oracle for those runs.

use num_complex::Complex64;

use crate::schedule::GammaSchedule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeParams {
    pub tunneling: f64,
    pub interaction: f64,
}

/// Complex two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeState {
    pub amplitudes: [Complex64; 2],
    pub time: f64,
}

impl TwoModeState {
    pub fn new(a1: Complex64, a2: Complex64) -> Self {
        Self {
            amplitudes: [a1, a2],
            time: 0.0,
        }
    }

    /// Observable quadruple `(n_1, n_2, jt_12, C_12)`.
    ///
    /// For states derived from amplitudes, `jt^2 + C^2 = 4 n_1 n_2`.
    pub fn observables(&self) -> [f64; 4] {
        let [a, b] = self.amplitudes;
        let z = a * b.conj();
        [a.norm_sqr(), b.norm_sqr(), -2.0 * z.im, 2.0 * z.re]
    }

    pub fn total_norm(&self) -> f64 {
        self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()
    }
}

/// Right-hand side of the complex two-mode equations (hbar = 1):
///
/// `i d(psi_1)/dt = (+i Gamma + g n_1) psi_1 - J psi_2`
/// `i d(psi_2)/dt = (-i Gamma + g n_2) psi_2 - J psi_1`
pub fn rhs_complex(amplitudes: &[Complex64; 2], gamma: f64, p: &TwoModeParams) -> [Complex64; 2] {
    let [a, b] = *amplitudes;
    let h1 = Complex64::new(0.0, gamma) * a + p.interaction * a.norm_sqr() * a - p.tunneling * b;
    let h2 = Complex64::new(0.0, -gamma) * b + p.interaction * b.norm_sqr() * b - p.tunneling * a;
    [Complex64::new(h1.im, -h1.re), Complex64::new(h2.im, -h2.re)]
}

/// Right-hand side of the closed real system for `(n_1, n_2, jt_12, C_12)`:
///
/// `dn_1/dt  = -j_12 + 2 Gamma n_1`
/// `dn_2/dt  =  j_12 - 2 Gamma n_2`
/// `d(jt)/dt = 2 J (n_1 - n_2) + g (n_1 - n_2) C`
/// `d(C)/dt  = -g (n_1 - n_2) jt`
///
/// with `j_12 = J jt_12` (hbar = 1). Exposed for cross-checks against the
/// complex form, which is the one the oracle integrates.
pub fn rhs_observables(obs: &[f64; 4], gamma: f64, p: &TwoModeParams) -> [f64; 4] {
    let [n1, n2, jt, c] = *obs;
    let j12 = p.tunneling * jt;
    [
        -j12 + 2.0 * gamma * n1,
        j12 - 2.0 * gamma * n2,
        2.0 * p.tunneling * (n1 - n2) + p.interaction * (n1 - n2) * c,
        -p.interaction * (n1 - n2) * jt,
    ]
}

/// Eigenvalues of the linear (g = 0) two-mode Hamiltonian:
/// `+/- sqrt(J^2 - Gamma^2)`, real below the exceptional point `Gamma = J`,
/// an imaginary pair above it.
pub fn linear_spectrum(tunneling: f64, gamma: f64) -> [Complex64; 2] {
    let disc = tunneling * tunneling - gamma * gamma;
    if disc >= 0.0 {
        let r = disc.sqrt();
        [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)]
    } else {
        let r = (-disc).sqrt();
        [Complex64::new(0.0, r), Complex64::new(0.0, -r)]
    }
}

/// One RK4 step of the complex two-mode system with the scheduled rate.
pub fn step(
    state: &TwoModeState,
    schedule: &GammaSchedule,
    p: &TwoModeParams,
    dt: f64,
) -> TwoModeState {
    let t = state.time;
    let y = state.amplitudes;
    let stage = |ys: &[Complex64; 2], ts: f64| -> [Complex64; 2] {
        let (gamma, _) = schedule.value(ts);
        rhs_complex(ys, gamma, p)
    };
    let k1 = stage(&y, t);
    let y2 = [y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]];
    let k2 = stage(&y2, t + 0.5 * dt);
    let y3 = [y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]];
    let k3 = stage(&y3, t + 0.5 * dt);
    let y4 = [y[0] + dt * k3[0], y[1] + dt * k3[1]];
    let k4 = stage(&y4, t + dt);
    let advance = |i: usize| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    TwoModeState {
        amplitudes: [advance(0), advance(1)],
        time: t + dt,
    }
}

/// Integrate the complex two-mode system over `steps` RK4 steps, collecting
/// the observable quadruple every `stride` steps (including t = 0).
pub fn integrate(
    initial: TwoModeState,
    schedule: &GammaSchedule,
    p: &TwoModeParams,
    dt: f64,
    steps: usize,
    stride: usize,
) -> Vec<(f64, [f64; 4])> {
    let mut state = initial;
    let mut out = Vec::with_capacity(steps / stride + 1);
    for i in 0..=steps {
        if i % stride == 0 {
            out.push((state.time, state.observables()));
        }
        if i < steps {
            state = step(&state, schedule, p, dt);
            state.time = initial.time + (i + 1) as f64 * dt;
        }
    }
    out
}
