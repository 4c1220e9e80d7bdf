//! State and Hamiltonian of the discrete nonlinear Schrödinger chain.
//!
//! A state is a complex amplitude per well, `psi[k]`, with `n_k = |psi_k|^2`
//! the (dimensionless) population of well `k`. The chain is open: tunneling
//! couples nearest neighbors only, and terms referencing sites outside the
//! chain are zero. Units are fixed by `hbar = 1` and the embedded tunneling
//! element as the energy scale, so time is measured in `hbar/J`.

use num_complex::Complex64;

use crate::error::Error;

/// Populations below this value count as an empty well for stop criteria.
pub const EPS_EMPTY: f64 = 1e-9;

/// Complex amplitudes of the chain plus the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeWavefunction {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl LatticeWavefunction {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        assert!(amplitudes.len() >= 2, "need at least two wells");
        Self {
            amplitudes,
            time: 0.0,
        }
    }

    /// Build `sqrt(n_k) * exp(i phi_k)` from populations and phases.
    pub fn from_populations_and_phases(populations: &[f64], phases: &[f64]) -> Self {
        assert_eq!(populations.len(), phases.len());
        let amplitudes = populations
            .iter()
            .zip(phases)
            .map(|(&n, &phi)| Complex64::from_polar(n.sqrt(), phi))
            .collect();
        Self::new(amplitudes)
    }

    pub fn wells(&self) -> usize {
        self.amplitudes.len()
    }

    /// Population `n_k = |psi_k|^2`.
    pub fn population(&self, k: usize) -> f64 {
        self.amplitudes[k].norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Sum of all populations.
    pub fn total_norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Total population of the state; conserved under Hermitian evolution.
pub fn total_norm(psi: &LatticeWavefunction) -> f64 {
    psi.total_norm()
}

/// Onsite energies, nearest-neighbor tunneling elements and interaction
/// strengths of the chain. `tunneling[i]` couples wells `i` and `i + 1`,
/// so it has one entry less than the well count. Tunneling elements may be
/// any real number.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeParameters {
    pub onsite: Vec<f64>,
    pub tunneling: Vec<f64>,
    pub interaction: Vec<f64>,
}

impl LatticeParameters {
    pub fn uniform(wells: usize, onsite: f64, tunneling: f64, interaction: f64) -> Self {
        Self {
            onsite: vec![onsite; wells],
            tunneling: vec![tunneling; wells - 1],
            interaction: vec![interaction; wells],
        }
    }

    pub fn wells(&self) -> usize {
        self.onsite.len()
    }

    /// Tunneling element on link `i` (wells `i`, `i + 1`); zero outside the chain.
    ///
    /// `i` is passed as `isize` so callers can form `k - 1` at the boundary
    /// without underflow gymnastics.
    pub fn link(&self, i: isize) -> f64 {
        if i < 0 || i as usize >= self.tunneling.len() {
            0.0
        } else {
            self.tunneling[i as usize]
        }
    }

    pub fn validate(&self, wells: usize) -> Result<(), Error> {
        if self.onsite.len() != wells || self.interaction.len() != wells {
            return Err(Error::InvalidConfig(format!(
                "parameter vectors sized for {} wells, state has {}",
                self.onsite.len(),
                wells
            )));
        }
        if self.tunneling.len() + 1 != wells {
            return Err(Error::InvalidConfig(format!(
                "expected {} tunneling elements, got {}",
                wells - 1,
                self.tunneling.len()
            )));
        }
        Ok(())
    }
}

/// Right-hand side of the lattice equation of motion,
///
/// `i d(psi_k)/dt = (E_k + g_k n_k) psi_k - J_{k-1,k} psi_{k-1} - J_{k,k+1} psi_{k+1}`,
///
/// with missing neighbors dropped at the chain ends.
pub fn gpe_rhs(psi: &LatticeWavefunction, params: &LatticeParameters) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; psi.wells()];
    gpe_rhs_into(&psi.amplitudes, params, &mut out);
    out
}

pub(crate) fn gpe_rhs_into(amps: &[Complex64], params: &LatticeParameters, out: &mut [Complex64]) {
    let n = amps.len();
    for k in 0..n {
        let nk = amps[k].norm_sqr();
        let mut h_psi = (params.onsite[k] + params.interaction[k] * nk) * amps[k];
        if k > 0 {
            h_psi -= params.tunneling[k - 1] * amps[k - 1];
        }
        if k + 1 < n {
            h_psi -= params.tunneling[k] * amps[k + 1];
        }
        // i dpsi/dt = H psi  =>  dpsi/dt = -i H psi
        out[k] = Complex64::new(h_psi.im, -h_psi.re);
    }
}
