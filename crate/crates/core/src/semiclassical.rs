//! Single-band lattice theory and the semiclassical wave-packet reference
//! used to interpret large-lattice runs.
//!
//! The uniform chain has the single band `E(q) = -2 J cos(q)` with
//! quasi-momentum `q` in `[-pi, pi]`. A packet sharply centered at `q0`
//! moves with the group velocity `v_g = 2 J sin(q0)` and disperses like a
//! free particle of effective mass `m_eff = 1 / (2 J cos(q0))` (hbar = 1).
//! Under an applied force the quasi-momentum drifts, `dq0/dt = F`, which for
//! constant force produces Bloch oscillations of period `2 pi / |F|`. A
//! chain whose onsite energies rise by `s` per site exerts the force
//! `F = -s`.

use num_complex::Complex64;

use crate::lattice::LatticeWavefunction;

/// Band energy `E(q) = -2 J cos(q)`.
pub fn dispersion(q: f64, tunneling: f64) -> f64 {
    -2.0 * tunneling * q.cos()
}

/// Group velocity `E'(q) = 2 J sin(q)` (hbar = 1).
pub fn group_velocity(q: f64, tunneling: f64) -> f64 {
    2.0 * tunneling * q.sin()
}

/// Effective mass `1 / E''(q) = 1 / (2 J cos(q))`; diverges at the band
/// inflection `q = +/- pi/2` (IEEE infinity when the cosine underflows to
/// zero). Callers integrating packet spread should use
/// [`inverse_effective_mass`] instead.
pub fn effective_mass(q: f64, tunneling: f64) -> f64 {
    1.0 / (2.0 * tunneling * q.cos())
}

/// `1 / m_eff = 2 J cos(q)`; finite everywhere.
pub fn inverse_effective_mass(q: f64, tunneling: f64) -> f64 {
    2.0 * tunneling * q.cos()
}

fn wrap_momentum(q: f64) -> f64 {
    if (-std::f64::consts::PI..=std::f64::consts::PI).contains(&q) {
        // Already in range: leave the value untouched bit for bit.
        return q;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = (q + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if w < -std::f64::consts::PI {
        w += two_pi;
    }
    w
}

/// Semiclassical packet: center quasi-momentum and position, the momentum
/// width of the underlying Gaussian, and the accumulated integrals that
/// generalize dispersion to a time-dependent force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketState {
    pub time: f64,
    /// Center quasi-momentum `q0`, wrapped into `[-pi, pi]`.
    pub momentum: f64,
    /// Packet center in site units.
    pub center: f64,
    /// Momentum width of the Gaussian amplitude.
    pub momentum_width: f64,
    /// `integral of dt' / m_eff(q0(t'))`, controls the packet spread.
    pub inverse_mass_integral: f64,
    /// `integral of E(q0(t')) dt'`, the accumulated band phase.
    pub phase_integral: f64,
}

impl PacketState {
    pub fn new(center: f64, momentum: f64, momentum_width: f64) -> Self {
        Self {
            time: 0.0,
            momentum: wrap_momentum(momentum),
            center,
            momentum_width,
            inverse_mass_integral: 0.0,
            phase_integral: 0.0,
        }
    }
}

/// Advance the packet one RK4 step of size `dt` under the time-dependent
/// force (hbar = 1):
///
/// `dq0/dt = force(t)`, `dn0/dt = v_g(q0)`, plus the accumulated
/// inverse-mass and band-phase integrals.
pub fn evolve_packet(
    p: &PacketState,
    force: impl Fn(f64) -> f64,
    tunneling: f64,
    dt: f64,
) -> PacketState {
    assert!(dt > 0.0);
    let t = p.time;
    let y = [
        p.momentum,
        p.center,
        p.inverse_mass_integral,
        p.phase_integral,
    ];
    let rhs = |ts: f64, y: &[f64; 4]| -> [f64; 4] {
        [
            force(ts),
            group_velocity(y[0], tunneling),
            inverse_effective_mass(y[0], tunneling),
            dispersion(y[0], tunneling),
        ]
    };
    let add = |a: &[f64; 4], k: &[f64; 4], h: f64| {
        [
            a[0] + h * k[0],
            a[1] + h * k[1],
            a[2] + h * k[2],
            a[3] + h * k[3],
        ]
    };
    let k1 = rhs(t, &y);
    let k2 = rhs(t + 0.5 * dt, &add(&y, &k1, 0.5 * dt));
    let k3 = rhs(t + 0.5 * dt, &add(&y, &k2, 0.5 * dt));
    let k4 = rhs(t + dt, &add(&y, &k3, dt));
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    PacketState {
        time: t + dt,
        momentum: wrap_momentum(out[0]),
        center: out[1],
        momentum_width: p.momentum_width,
        inverse_mass_integral: out[2],
        phase_integral: out[3],
    }
}

fn profile_amplitudes(
    wells: usize,
    center: f64,
    momentum: f64,
    width: f64,
    inverse_mass_integral: f64,
    phase_integral: f64,
) -> Vec<Complex64> {
    let norm = (2.0 * width * width / std::f64::consts::PI).powf(0.25);
    // Complex spread factor: 1 at t = 0, rotating and growing with the
    // accumulated inverse-mass integral.
    let spread = Complex64::new(1.0, 2.0 * width * width * inverse_mass_integral);
    let prefactor = norm * spread.sqrt().inv();
    (0..wells)
        .map(|idx| {
            let x = (idx + 1) as f64; // 1-based site coordinate
            let envelope =
                (Complex64::new(-width * width * (x - center) * (x - center), 0.0) / spread).exp();
            let phase = Complex64::new(0.0, momentum * x - phase_integral).exp();
            prefactor * envelope * phase
        })
        .collect()
}

/// Gaussian wave packet
/// `psi_n = (2 dq^2 / pi)^(1/4) exp(-dq^2 (n - n0)^2) exp(i q0 n)`
/// over 1-based site coordinates `n`.
pub fn gaussian_packet(
    wells: usize,
    center: f64,
    momentum: f64,
    width: f64,
) -> LatticeWavefunction {
    assert!(width > 0.0, "momentum width must be positive");
    LatticeWavefunction::new(profile_amplitudes(wells, center, momentum, width, 0.0, 0.0))
}

/// Closed-form semiclassical profile of an initially Gaussian packet at the
/// evolved [`PacketState`]. At `t = 0` this reproduces [`gaussian_packet`]
/// bit for bit. `near_zone_edge` flags a center momentum within `5 dq` of
/// the zone boundary, where the closed form loses validity.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalProfile {
    pub amplitudes: Vec<Complex64>,
    pub near_zone_edge: bool,
}

pub fn semiclassical_profile(wells: usize, p: &PacketState) -> SemiclassicalProfile {
    let amplitudes = profile_amplitudes(
        wells,
        p.center,
        p.momentum,
        p.momentum_width,
        p.inverse_mass_integral,
        p.phase_integral,
    );
    let edge_distance = (std::f64::consts::PI - p.momentum.abs()).abs();
    SemiclassicalProfile {
        amplitudes,
        near_zone_edge: edge_distance < 5.0 * p.momentum_width,
    }
}

/// Discrete momentum-space representation on the grid `q_j = 2 pi m_j / L`
/// with `m_j = j - (L - 1)/2`, `j = 0 .. L-1` and `L` the well count.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSpectrum {
    pub momenta: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl MomentumSpectrum {
    pub fn densities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Index and momentum of the strongest bin.
    pub fn peak(&self) -> (usize, f64) {
        let mut best = (0, f64::MIN);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = a.norm_sqr();
            if d > best.1 {
                best = (i, d);
            }
        }
        (best.0, self.momenta[best.0])
    }

    /// `sum_q |psi~(q)|^2 = L / (4 pi^2) * sum_k n_k` (Parseval constant for
    /// the `1/(2 pi)` transform normalization).
    pub fn total_density(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Fourier transform `psi~(q) = (1/(2 pi)) sum_k exp(-i q k) psi_k` over
/// 1-based site coordinates, evaluated on the discrete momentum grid.
pub fn momentum_transform(psi: &LatticeWavefunction) -> MomentumSpectrum {
    let l = psi.wells();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut momenta = Vec::with_capacity(l);
    let mut amplitudes = Vec::with_capacity(l);
    for j in 0..l {
        let m = j as f64 - (l as f64 - 1.0) / 2.0;
        let q = two_pi * m / l as f64;
        momenta.push(q);
        let mut acc = Complex64::ZERO;
        for (idx, a) in psi.amplitudes.iter().enumerate() {
            let x = (idx + 1) as f64;
            acc += a * Complex64::new(0.0, -q * x).exp();
        }
        amplitudes.push(acc / two_pi);
    }
    MomentumSpectrum {
        momenta,
        amplitudes,
    }
}
