//! Observable algebra on lattice states: populations, currents, and the
//! pair quantities entering the control equations.
//!
//! For a pair of wells (k, l):
//!
//! * modified current  `jt_kl = i (psi_k psi_l* - psi_k* psi_l)`, antisymmetric,
//!   defined for arbitrary pairs;
//! * correlation       `C_kl  = psi_k psi_l* + psi_k* psi_l`, symmetric;
//! * physical current  `j_kl  = J_kl * jt_kl` on adjacent pairs (hbar = 1).
//!
//! Both satisfy the Cauchy-Schwarz bound `|.| <= 2 sqrt(n_k n_l)`, and
//! `jt_kl^2 + C_kl^2 = 4 n_k n_l`.

use crate::error::Error;
use crate::lattice::{LatticeParameters, LatticeWavefunction};

/// Correlation `C_kl = 2 Re(psi_k psi_l*)`.
pub fn correlation(psi: &LatticeWavefunction, k: usize, l: usize) -> f64 {
    let z = psi.amplitudes[k] * psi.amplitudes[l].conj();
    2.0 * z.re
}

/// Modified (dimensionless) current `jt_kl = i (psi_k psi_l* - psi_k* psi_l)`.
pub fn mod_current(psi: &LatticeWavefunction, k: usize, l: usize) -> f64 {
    let z = psi.amplitudes[k] * psi.amplitudes[l].conj();
    -2.0 * z.im
}

/// Physical current on link `i` (from well `i` to well `i + 1`).
pub fn current(psi: &LatticeWavefunction, params: &LatticeParameters, i: usize) -> f64 {
    params.tunneling[i] * mod_current(psi, i, i + 1)
}

/// The neighbor-coupling sums appearing in the time derivatives of `jt_kl`
/// and `C_kl`:
///
/// `zeta_kl = J_{k-1,k} C_{k-1,l} + J_{k,k+1} C_{k+1,l} - J_{l-1,l} C_{k,l-1} - J_{l,l+1} C_{k,l+1}`
///
/// and `eta_kl` with the modified currents in place of the correlations.
/// Terms referencing sites outside the chain are zero.
pub fn zeta_eta(
    psi: &LatticeWavefunction,
    params: &LatticeParameters,
    k: usize,
    l: usize,
) -> Result<(f64, f64), Error> {
    let n = psi.wells();
    for idx in [k, l] {
        if idx >= n {
            return Err(Error::IndexOutOfRange {
                index: idx,
                wells: n,
            });
        }
    }
    Ok((
        zeta_unchecked(psi, params, k, l),
        eta_unchecked(psi, params, k, l),
    ))
}

pub(crate) fn zeta_unchecked(
    psi: &LatticeWavefunction,
    params: &LatticeParameters,
    k: usize,
    l: usize,
) -> f64 {
    let n = psi.wells();
    let mut z = 0.0;
    if k > 0 {
        z += params.tunneling[k - 1] * correlation(psi, k - 1, l);
    }
    if k + 1 < n {
        z += params.tunneling[k] * correlation(psi, k + 1, l);
    }
    if l > 0 {
        z -= params.tunneling[l - 1] * correlation(psi, k, l - 1);
    }
    if l + 1 < n {
        z -= params.tunneling[l] * correlation(psi, k, l + 1);
    }
    z
}

pub(crate) fn eta_unchecked(
    psi: &LatticeWavefunction,
    params: &LatticeParameters,
    k: usize,
    l: usize,
) -> f64 {
    let n = psi.wells();
    let mut e = 0.0;
    if k > 0 {
        e += params.tunneling[k - 1] * mod_current(psi, k - 1, l);
    }
    if k + 1 < n {
        e += params.tunneling[k] * mod_current(psi, k + 1, l);
    }
    if l > 0 {
        e -= params.tunneling[l - 1] * mod_current(psi, k, l - 1);
    }
    if l + 1 < n {
        e -= params.tunneling[l] * mod_current(psi, k, l + 1);
    }
    e
}

/// Time derivatives of `jt_kl` and `C_kl` under the lattice equation of
/// motion (hbar = 1):
///
/// `d(jt_kl)/dt = (E_k + g_k n_k - E_l - g_l n_l) C_kl - zeta_kl`
/// `d(C_kl)/dt  = (E_l + g_l n_l - E_k - g_k n_k) jt_kl + eta_kl`
pub fn pair_derivatives(
    psi: &LatticeWavefunction,
    params: &LatticeParameters,
    k: usize,
    l: usize,
) -> Result<(f64, f64), Error> {
    let (zeta, eta) = zeta_eta(psi, params, k, l)?;
    let nk = psi.population(k);
    let nl = psi.population(l);
    let delta = params.onsite[k] + params.interaction[k] * nk
        - params.onsite[l]
        - params.interaction[l] * nl;
    let jt_dot = delta * correlation(psi, k, l) - zeta;
    let c_dot = -delta * mod_current(psi, k, l) + eta;
    Ok((jt_dot, c_dot))
}

/// Populations, link currents, and the pair quantities for a requested set
/// of well pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub populations: Vec<f64>,
    /// Physical current on each link, `currents[i]` from well `i` to `i + 1`.
    pub currents: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub pair_mod_currents: Vec<f64>,
    pub pair_correlations: Vec<f64>,
}

pub fn observables(
    psi: &LatticeWavefunction,
    params: &LatticeParameters,
    pairs: &[(usize, usize)],
) -> Result<ObservableSet, Error> {
    let n = psi.wells();
    for &(k, l) in pairs {
        for idx in [k, l] {
            if idx >= n {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    wells: n,
                });
            }
        }
    }
    let populations = psi.populations();
    let currents = (0..n - 1).map(|i| current(psi, params, i)).collect();
    let pair_mod_currents = pairs.iter().map(|&(k, l)| mod_current(psi, k, l)).collect();
    let pair_correlations = pairs.iter().map(|&(k, l)| correlation(psi, k, l)).collect();
    Ok(ObservableSet {
        populations,
        currents,
        pairs: pairs.to_vec(),
        pair_mod_currents,
        pair_correlations,
    })
}
