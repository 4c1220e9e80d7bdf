//! Ground states of the Hermitian nonlinear chain at fixed total norm,
//! prepared by imaginary-time propagation.
//!
//! The evolution `d(psi)/d(tau) = -H(psi) psi` with per-step renormalization
//! damps every excited component; it is robust in the presence of the
//! nonlinearity, for which plain diagonalization is not available.

use num_complex::Complex64;

use crate::error::Error;
use crate::integrator::rk4_step;
use crate::lattice::{LatticeParameters, LatticeWavefunction};

#[derive(Debug, Clone)]
pub struct GroundStateRequest {
    pub params: LatticeParameters,
    pub total_norm: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub tau_step: f64,
}

impl GroundStateRequest {
    pub fn new(params: LatticeParameters, total_norm: f64) -> Self {
        Self {
            params,
            total_norm,
            tolerance: 1e-12,
            max_iterations: 1_000_000,
            tau_step: 1e-2,
        }
    }
}

fn apply_hamiltonian(amps: &[Complex64], params: &LatticeParameters) -> Vec<Complex64> {
    let n = amps.len();
    let mut out = vec![Complex64::ZERO; n];
    for k in 0..n {
        let mut h = (params.onsite[k] + params.interaction[k] * amps[k].norm_sqr()) * amps[k];
        if k > 0 {
            h -= params.tunneling[k - 1] * amps[k - 1];
        }
        if k + 1 < n {
            h -= params.tunneling[k] * amps[k + 1];
        }
        out[k] = h;
    }
    out
}

/// Chemical potential `<psi|H(psi)|psi> / <psi|psi>` and the stationarity
/// residual `||H psi - mu psi|| / ||psi||`.
pub fn stationarity_residual(
    psi: &LatticeWavefunction,
    params: &LatticeParameters,
) -> Result<(f64, f64), Error> {
    let norm_sqr = psi.total_norm();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroNormState);
    }
    let h_psi = apply_hamiltonian(&psi.amplitudes, params);
    let mu: f64 = psi
        .amplitudes
        .iter()
        .zip(&h_psi)
        .map(|(a, h)| (a.conj() * h).re)
        .sum::<f64>()
        / norm_sqr;
    let residual_sqr: f64 = psi
        .amplitudes
        .iter()
        .zip(&h_psi)
        .map(|(a, h)| (h - mu * a).norm_sqr())
        .sum();
    Ok((mu, (residual_sqr / norm_sqr).sqrt()))
}

/// Mean-field energy functional
/// `E[psi] = sum_k (E_k n_k + g_k n_k^2 / 2) - sum_k J_k C_{k,k+1}`;
/// imaginary-time propagation with renormalization decreases it.
pub fn energy_functional(psi: &LatticeWavefunction, params: &LatticeParameters) -> f64 {
    let mut energy = 0.0;
    let n = psi.wells();
    for k in 0..n {
        let nk = psi.population(k);
        energy += params.onsite[k] * nk + 0.5 * params.interaction[k] * nk * nk;
        if k + 1 < n {
            let overlap = (psi.amplitudes[k] * psi.amplitudes[k + 1].conj()).re;
            energy -= 2.0 * params.tunneling[k] * overlap;
        }
    }
    energy
}

/// Imaginary-time propagation to the ground state at the requested norm,
/// started from a uniform positive vector. Degenerate minima therefore
/// resolve to the symmetric representative, deterministically. Returns the
/// state and its chemical potential.
pub fn ground_state(req: &GroundStateRequest) -> Result<(LatticeWavefunction, f64), Error> {
    if req.tolerance <= 0.0 {
        return Err(Error::InvalidConfig(
            "ground-state tolerance must be positive".into(),
        ));
    }
    if req.total_norm <= 0.0 {
        return Err(Error::InvalidConfig("total norm must be positive".into()));
    }
    let wells = req.params.wells();
    let amp0 = (req.total_norm / wells as f64).sqrt();
    let mut psi = LatticeWavefunction::new(vec![Complex64::new(amp0, 0.0); wells]);

    let mut last = (0.0, f64::INFINITY);
    for iteration in 0..req.max_iterations {
        last = stationarity_residual(&psi, &req.params)?;
        if last.1 < req.tolerance {
            return Ok((psi, last.0));
        }
        // Propagate with the chemical-potential shift, d(psi)/d(tau) =
        // -(H - mu) psi, frozen over the step. Any stationary state is
        // then an exact fixed point of the discrete map, so the residual
        // is not floored by the step size.
        let mu = last.0;
        let mut amps = psi.amplitudes.clone();
        rk4_step(
            &mut amps,
            0.0,
            req.tau_step,
            |_t, y, dy| -> Result<(), Error> {
                let h = apply_hamiltonian(y, &req.params);
                for ((d, h), y) in dy.iter_mut().zip(h).zip(y) {
                    *d = -(h - mu * y);
                }
                Ok(())
            },
        )?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonFiniteState {
                time: iteration as f64 * req.tau_step,
            });
        }
        let scale = (req.total_norm / norm).sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        psi.amplitudes = amps;
    }
    Err(Error::GroundStateNotConverged {
        iterations: req.max_iterations,
        residual: last.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_dimer_ground_state() {
        let params = LatticeParameters::uniform(2, 0.0, 1.0, 0.0);
        let (psi, mu) = ground_state(&GroundStateRequest::new(params, 1.0)).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((mu + 1.0).abs() < 1e-10);
        assert!((psi.amplitudes[0].re - s).abs() < 1e-8);
        assert!((psi.amplitudes[1].re - s).abs() < 1e-8);
    }

    #[test]
    fn residual_of_exact_eigenstate() {
        let params = LatticeParameters::uniform(2, 0.0, 1.0, 0.0);
        let s = 1.0 / 2.0_f64.sqrt();
        let psi = LatticeWavefunction::new(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        let (mu, res) = stationarity_residual(&psi, &params).unwrap();
        assert!((mu + 1.0).abs() < 1e-14);
        assert!(res < 1e-14);
    }

    #[test]
    fn residual_of_random_state_is_large() {
        let params = LatticeParameters::uniform(3, 0.0, 1.0, 0.0);
        let psi = LatticeWavefunction::new(vec![
            Complex64::new(0.9, 0.1),
            Complex64::new(-0.2, 0.3),
            Complex64::new(0.1, -0.5),
        ]);
        let (_, res) = stationarity_residual(&psi, &params).unwrap();
        assert!(res > 0.1);
    }

    #[test]
    fn zero_norm_state_is_rejected() {
        let params = LatticeParameters::uniform(2, 0.0, 1.0, 0.0);
        let psi = LatticeWavefunction::new(vec![Complex64::ZERO, Complex64::ZERO]);
        assert!(matches!(
            stationarity_residual(&psi, &params),
            Err(Error::ZeroNormState)
        ));
    }

    #[test]
    fn energy_decreases_monotonically() {
        let mut params = LatticeParameters::uniform(4, 0.0, 1.0, 1.0);
        params.onsite = vec![-2.0, 0.0, 0.0, -2.0];
        let req = GroundStateRequest::new(params.clone(), 2.0);
        let wells = 4;
        let amp0 = (req.total_norm / wells as f64).sqrt();
        let mut psi = LatticeWavefunction::new(vec![Complex64::new(amp0, 0.0); wells]);
        let mut prev = energy_functional(&psi, &params);
        for _ in 0..500 {
            let mut amps = psi.amplitudes.clone();
            rk4_step(
                &mut amps,
                0.0,
                req.tau_step,
                |_t, y, dy| -> Result<(), Error> {
                    let h = apply_hamiltonian(y, &req.params);
                    for (d, h) in dy.iter_mut().zip(h) {
                        *d = -h;
                    }
                    Ok(())
                },
            )
            .unwrap();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            let scale = (req.total_norm / norm).sqrt();
            for a in &mut amps {
                *a *= scale;
            }
            psi.amplitudes = amps;
            let e = energy_functional(&psi, &params);
            assert!(e <= prev + 1e-12, "energy rose from {prev} to {e}");
            prev = e;
        }
    }

    #[test]
    fn interacting_ground_state_is_stationary() {
        let mut params = LatticeParameters::uniform(6, 0.0, 1.0, 1.0);
        params.onsite = vec![-5.0, -5.0, 0.0, 0.0, -5.0, -5.0];
        let (psi, _mu) = ground_state(&GroundStateRequest::new(params.clone(), 1.0)).unwrap();
        let (_, res) = stationarity_residual(&psi, &params).unwrap();
        assert!(res < 1e-12);
        assert!((psi.total_norm() - 1.0).abs() < 1e-12);
        // Symmetric potential, symmetric state.
        for k in 0..3 {
            assert!(
                (psi.population(k) - psi.population(5 - k)).abs() < 1e-10,
                "asymmetry at well {k}"
            );
        }
    }
}
