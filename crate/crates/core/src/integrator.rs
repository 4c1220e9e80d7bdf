//! Classical fourth-order Runge-Kutta stepping.
//!
//! The lattice step re-evaluates its parameter provider at every internal
//! stage, so feedback control that depends on the instantaneous state stays
//! consistent with fourth-order accuracy.

use num_complex::Complex64;

use crate::error::Error;
use crate::lattice::{gpe_rhs_into, LatticeParameters, LatticeWavefunction};

/// One RK4 step of size `dt` on a complex vector, for a right-hand side
/// `rhs(t, y, dy)` that may fail (e.g. when a feedback solve breaks down).
pub fn rk4_step<E>(
    y: &mut [Complex64],
    t: f64,
    dt: f64,
    mut rhs: impl FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<(), E>,
) -> Result<(), E> {
    let n = y.len();
    let mut k1 = vec![Complex64::ZERO; n];
    let mut k2 = vec![Complex64::ZERO; n];
    let mut k3 = vec![Complex64::ZERO; n];
    let mut k4 = vec![Complex64::ZERO; n];
    let mut stage = vec![Complex64::ZERO; n];

    rhs(t, y, &mut k1)?;
    for i in 0..n {
        stage[i] = y[i] + 0.5 * dt * k1[i];
    }
    rhs(t + 0.5 * dt, &stage, &mut k2)?;
    for i in 0..n {
        stage[i] = y[i] + 0.5 * dt * k2[i];
    }
    rhs(t + 0.5 * dt, &stage, &mut k3)?;
    for i in 0..n {
        stage[i] = y[i] + dt * k3[i];
    }
    rhs(t + dt, &stage, &mut k4)?;
    for i in 0..n {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}

/// Supplies lattice parameters as a function of time and state.
pub trait ParameterProvider {
    fn parameters(&mut self, t: f64, psi: &LatticeWavefunction)
        -> Result<LatticeParameters, Error>;
}

impl<F> ParameterProvider for F
where
    F: FnMut(f64, &LatticeWavefunction) -> Result<LatticeParameters, Error>,
{
    fn parameters(
        &mut self,
        t: f64,
        psi: &LatticeWavefunction,
    ) -> Result<LatticeParameters, Error> {
        self(t, psi)
    }
}

/// Time-independent parameters.
pub struct FixedParameters(pub LatticeParameters);

impl ParameterProvider for FixedParameters {
    fn parameters(
        &mut self,
        _t: f64,
        _psi: &LatticeWavefunction,
    ) -> Result<LatticeParameters, Error> {
        Ok(self.0.clone())
    }
}

/// Advance the lattice state by one RK4 step of size `dt`.
///
/// The provider is invoked at every stage with the stage time and state. A
/// non-finite result signals blow-up and the caller must halt.
pub fn step(
    psi: &LatticeWavefunction,
    provider: &mut dyn ParameterProvider,
    dt: f64,
) -> Result<LatticeWavefunction, Error> {
    assert!(dt > 0.0, "step size must be positive");
    let t0 = psi.time;
    let mut amplitudes = psi.amplitudes.clone();
    let mut stage_state = psi.clone();
    rk4_step(&mut amplitudes, t0, dt, |t, y, dy| {
        stage_state.amplitudes.copy_from_slice(y);
        stage_state.time = t;
        let params = provider.parameters(t, &stage_state)?;
        gpe_rhs_into(y, &params, dy);
        Ok(())
    })?;
    let next = LatticeWavefunction {
        amplitudes,
        time: t0 + dt,
    };
    if !next.is_finite() {
        return Err(Error::NonFiniteState { time: next.time });
    }
    Ok(next)
}
