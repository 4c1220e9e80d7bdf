//! Onsite energies for the wells that are not fixed by the embedding solve,
//! i.e. everything outside `m-1 ..= m+2`.
//!
//! Three choices: level the outer wells with the solved flanking energies
//! (enlarging the effective reservoir), demand specific currents on every
//! outer link (solved well by well from the current derivatives), or extend
//! the flanking energies into a linear Stark lattice with the embedded pair
//! as a defect.

use crate::error::Error;
use crate::lattice::{LatticeParameters, LatticeWavefunction};
use crate::observables::{correlation, mod_current, zeta_unchecked};

/// Below this correlation magnitude a link can no longer support the energy
/// recursion of the specific-currents strategy.
pub const STRATEGY_C_TOL: f64 = 1e-6;

/// Target current on one link,
///
/// `j(t) = offset + gamma_coeff * Gamma(t) + condition_fraction * 2 Gamma(t) n_a(t)`,
///
/// where `n_a` is the population of the embedded well anchoring that side
/// (well m on the left, m+1 on the right). The last term expresses a target
/// as a fraction of the instantaneous flanking condition current; the
/// embedded populations change along a run (they grow like
/// `1/sqrt(1 - Gamma^2)` on the quasi-stationary family), so fractions of
/// the instantaneous current are what keep reservoir wells depleting in
/// fixed proportion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkTarget {
    pub offset: f64,
    pub gamma_coeff: f64,
    pub condition_fraction: f64,
}

impl LinkTarget {
    /// Target current and its time derivative, given the anchor-well
    /// population and its rate of change.
    pub fn value(
        &self,
        gamma: f64,
        gamma_dot: f64,
        anchor_population: f64,
        anchor_rate: f64,
    ) -> (f64, f64) {
        let value = self.offset
            + self.gamma_coeff * gamma
            + self.condition_fraction * 2.0 * gamma * anchor_population;
        let derivative = self.gamma_coeff * gamma_dot
            + self.condition_fraction * 2.0 * (gamma_dot * anchor_population + gamma * anchor_rate);
        (value, derivative)
    }
}

/// Per-link current targets; links without a target behave as constant zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurrentTargets {
    per_link: Vec<Option<LinkTarget>>,
}

impl CurrentTargets {
    pub fn new(links: usize) -> Self {
        Self {
            per_link: vec![None; links],
        }
    }

    pub fn set(&mut self, link: usize, target: LinkTarget) {
        self.per_link[link] = Some(target);
    }

    pub fn get(&self, link: usize) -> Option<&LinkTarget> {
        self.per_link.get(link).and_then(|t| t.as_ref())
    }

    /// Target current on `link` at rate `gamma` (zero when untargeted).
    pub fn current(&self, link: usize, gamma: f64, anchor_population: f64) -> f64 {
        self.get(link)
            .map_or(0.0, |t| t.value(gamma, 0.0, anchor_population, 0.0).0)
    }

    fn derivative(
        &self,
        link: usize,
        gamma: f64,
        gamma_dot: f64,
        anchor_population: f64,
        anchor_rate: f64,
    ) -> f64 {
        self.get(link).map_or(0.0, |t| {
            t.value(gamma, gamma_dot, anchor_population, anchor_rate).1
        })
    }

    pub fn links(&self) -> usize {
        self.per_link.len()
    }
}

/// Runtime reservoir strategy used by the controller.
#[derive(Debug, Clone, PartialEq)]
pub enum ReservoirPlan {
    LevelOut,
    StarkLattice,
    SpecificCurrents(CurrentTargets),
}

impl ReservoirPlan {
    pub fn targets(&self) -> Option<&CurrentTargets> {
        match self {
            ReservoirPlan::SpecificCurrents(t) => Some(t),
            _ => None,
        }
    }

    /// Fill the outer onsite energies of `params`, whose entries at `m-1`
    /// and `m+2` already hold the solved flanking values and whose
    /// tunnelings carry the current controlled elements.
    pub(crate) fn fill_energies(
        &self,
        psi: &LatticeWavefunction,
        params: &mut LatticeParameters,
        gamma: f64,
        gamma_dot: f64,
        m: usize,
    ) -> Result<(), Error> {
        let wells = params.wells();
        let e_left = params.onsite[m - 1];
        let e_right = params.onsite[m + 2];
        params.onsite = match self {
            ReservoirPlan::LevelOut => level_out(e_left, e_right, wells, m),
            ReservoirPlan::StarkLattice => stark_extension(e_left, e_right, m, wells).2,
            ReservoirPlan::SpecificCurrents(targets) => {
                specific_current_energies(psi, params, targets, gamma, gamma_dot, m)?
            }
        };
        Ok(())
    }
}

/// Level the outer wells with the flanking energies:
/// `E_k = E_left` left of the pair, `E_k = E_right` right of it, embedded
/// wells at zero. This effectively enlarges the particle reservoir.
pub fn level_out(e_left: f64, e_right: f64, wells: usize, m: usize) -> Vec<f64> {
    let mut onsite = vec![0.0; wells];
    for e in onsite.iter_mut().take(m) {
        *e = e_left;
    }
    for e in onsite.iter_mut().skip(m + 2) {
        *e = e_right;
    }
    onsite
}

/// Extend the flanking energies into a linear Stark lattice centered
/// between the embedded wells, which stay at zero as the defect:
///
/// `slope  = (E_right - E_left) / 3`
/// `offset = (E_left + E_right) / 2`
/// `E_k    = (k - m - 1/2) * slope + offset`  (0-based index k)
///
/// Returns `(slope, offset, onsite)`; the flanking entries reproduce
/// `E_left` and `E_right` exactly.
pub fn stark_extension(e_left: f64, e_right: f64, m: usize, wells: usize) -> (f64, f64, Vec<f64>) {
    let slope = (e_right - e_left) / 3.0;
    let offset = (e_left + e_right) / 2.0;
    let mut onsite = vec![0.0; wells];
    for (k, e) in onsite.iter_mut().enumerate() {
        if k == m || k == m + 1 {
            continue;
        }
        *e = (k as f64 - m as f64 - 0.5) * slope + offset;
    }
    onsite[m - 1] = e_left;
    onsite[m + 2] = e_right;
    (slope, offset, onsite)
}

/// Current targets that deplete (fill) every reservoir well at a rate
/// proportional to its initial population, so all wells on a side empty at
/// the same time. The proportionality constant is fixed by the flanking
/// conditions, giving on the left
///
/// `j_{k,k+1}(t) = 2 Gamma(t) n_m(t) * (n_0(0) + .. + n_k(0)) / (n_0(0) + .. + n_{m-1}(0))`
///
/// and the mirrored expression on the right. Expressed as fractions of the
/// instantaneous condition current, every targeted well on a side then
/// drains at the same relative rate for the whole run.
pub fn proportional_targets(
    populations0: &[f64],
    m: usize,
    wells: usize,
) -> Result<CurrentTargets, Error> {
    assert_eq!(populations0.len(), wells);
    let mut targets = CurrentTargets::new(wells - 1);
    if m >= 2 {
        let total_left: f64 = populations0[..m].iter().sum();
        if total_left <= 0.0 {
            return Err(Error::InvalidConfig(
                "proportional currents need a populated left reservoir".into(),
            ));
        }
        let mut cumulative = 0.0;
        for (link, population) in populations0.iter().enumerate().take(m - 1) {
            cumulative += population;
            targets.set(
                link,
                LinkTarget {
                    condition_fraction: cumulative / total_left,
                    ..LinkTarget::default()
                },
            );
        }
    }
    if wells >= m + 4 {
        let total_right: f64 = populations0[m + 2..].iter().sum();
        if total_right <= 0.0 {
            return Err(Error::InvalidConfig(
                "proportional currents need a populated right reservoir".into(),
            ));
        }
        let mut tail = total_right;
        for (link, population) in populations0.iter().enumerate().take(wells - 1).skip(m + 2) {
            tail -= population;
            targets.set(
                link,
                LinkTarget {
                    condition_fraction: tail / total_right,
                    ..LinkTarget::default()
                },
            );
        }
    }
    Ok(targets)
}

/// Solve the outer onsite energies so every targeted link current keeps its
/// target derivative, walking outward from the solved flanking energies:
///
/// left  (k = m-2 .. 0):  `E_k = j_tar'/(J_k C_{k,k+1}) + zeta_{k,k+1}/C_{k,k+1} + E_{k+1} - g_k n_k + g_{k+1} n_{k+1}`
/// right (k = m+2 .. N-2): `E_{k+1} = -j_tar'/(J_k C_{k,k+1}) - zeta_{k,k+1}/C_{k,k+1} + E_k + g_k n_k - g_{k+1} n_{k+1}`
///
/// Returns the full onsite vector with the embedded wells at zero. A
/// vanishing link correlation means the targets can no longer be imposed.
pub fn specific_current_energies(
    psi: &LatticeWavefunction,
    params: &LatticeParameters,
    targets: &CurrentTargets,
    gamma: f64,
    gamma_dot: f64,
    m: usize,
) -> Result<Vec<f64>, Error> {
    let wells = params.wells();
    let mut onsite = vec![0.0; wells];
    onsite[m - 1] = params.onsite[m - 1];
    onsite[m + 2] = params.onsite[m + 2];
    let g = &params.interaction;

    // Population rates of the embedded wells anchor the condition-fraction
    // targets on their respective sides.
    let j_mid = params.tunneling[m] * mod_current(psi, m, m + 1);
    let anchor_left = psi.population(m);
    let anchor_left_rate = params.tunneling[m - 1] * mod_current(psi, m - 1, m) - j_mid;
    let anchor_right = psi.population(m + 1);
    let anchor_right_rate = j_mid - params.tunneling[m + 1] * mod_current(psi, m + 1, m + 2);

    let link_terms = |link: usize, anchor: f64, anchor_rate: f64| -> Result<f64, Error> {
        let c = correlation(psi, link, link + 1);
        if c.abs() < STRATEGY_C_TOL {
            return Err(Error::StrategyBreakdown { link });
        }
        let j_link = params.tunneling[link];
        if j_link == 0.0 {
            return Err(Error::StrategyBreakdown { link });
        }
        let dj_dt = targets.derivative(link, gamma, gamma_dot, anchor, anchor_rate);
        let zeta = zeta_unchecked(psi, params, link, link + 1);
        Ok(dj_dt / (j_link * c) + zeta / c)
    };

    if m >= 2 {
        for link in (0..=m - 2).rev() {
            let terms = link_terms(link, anchor_left, anchor_left_rate)?;
            onsite[link] = terms + onsite[link + 1] - g[link] * psi.population(link)
                + g[link + 1] * psi.population(link + 1);
        }
    }
    for link in m + 2..wells - 1 {
        let terms = link_terms(link, anchor_right, anchor_right_rate)?;
        onsite[link + 1] = -terms + onsite[link] + g[link] * psi.population(link)
            - g[link + 1] * psi.population(link + 1);
    }
    Ok(onsite)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_out_six_wells() {
        let e = level_out(-2.0, 3.0, 6, 2);
        assert_eq!(e, vec![-2.0, -2.0, 0.0, 0.0, 3.0, 3.0]);
    }

    #[test]
    fn level_out_four_wells_has_no_outer_wells() {
        let e = level_out(-1.0, 2.0, 4, 1);
        assert_eq!(e, vec![-1.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn level_out_zero_anchors() {
        assert_eq!(level_out(0.0, 0.0, 5, 1), vec![0.0; 5]);
    }

    #[test]
    fn stark_flat_when_anchors_match() {
        let (slope, offset, e) = stark_extension(1.5, 1.5, 2, 6);
        assert_eq!(slope, 0.0);
        assert_eq!(offset, 1.5);
        assert_eq!(e, vec![1.5, 1.5, 0.0, 0.0, 1.5, 1.5]);
    }

    #[test]
    fn stark_slope_and_offset() {
        let (slope, offset, e) = stark_extension(-1.0, 2.0, 2, 6);
        assert!((slope - 1.0).abs() < 1e-15);
        assert!((offset - 0.5).abs() < 1e-15);
        // Anchors reproduced exactly.
        assert_eq!(e[1], -1.0);
        assert_eq!(e[4], 2.0);
        // One site further out continues the line.
        assert!((e[0] - (-2.5 * slope + offset)).abs() < 1e-15);
        assert!((e[5] - (2.5 * slope + offset)).abs() < 1e-15);
        assert_eq!(e[2], 0.0);
        assert_eq!(e[3], 0.0);
    }

    #[test]
    fn proportional_targets_six_wells() {
        // Equal left populations: the outer link carries half the inner one.
        let t = proportional_targets(&[5.0, 5.0, 0.5, 0.5, 5.0, 5.0], 2, 6).unwrap();
        let gamma = 0.7;
        let inner_left = 2.0 * gamma * 0.5; // condition on link (m-1, m)
        assert!((t.current(0, gamma, 0.5) - inner_left / 2.0).abs() < 1e-14);
        assert!((t.current(4, gamma, 0.5) - inner_left / 2.0).abs() < 1e-14);
        assert_eq!(t.get(1), None);
        assert_eq!(t.get(2), None);
        assert_eq!(t.get(3), None);
    }

    #[test]
    fn proportional_ratio_identity() {
        // j_{12}/j_{23} = n_1(0) / (n_1(0) + n_2(0)) with the inner link
        // fixed by the flanking condition, at any anchor population.
        let n = [3.0, 7.0, 0.4, 0.4, 7.0, 3.0];
        let t = proportional_targets(&n, 2, 6).unwrap();
        let gamma = 0.31;
        let anchor = 0.6; // instantaneous embedded population
        let j_outer = t.current(0, gamma, anchor);
        let j_inner = 2.0 * gamma * anchor;
        assert!((j_outer / j_inner - n[0] / (n[0] + n[1])).abs() < 1e-14);
    }

    #[test]
    fn proportional_needs_populated_reservoir() {
        let err = proportional_targets(&[0.0, 0.0, 0.5, 0.5, 1.0, 1.0], 2, 6).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn specific_energies_constant_targets_real_state() {
        // Real symmetric state, constant targets: only the zeta and
        // interaction terms survive.
        let populations = [4.0, 3.0, 0.5, 0.5, 3.0, 4.0];
        let psi = LatticeWavefunction::from_populations_and_phases(&populations, &[0.0; 6]);
        let mut params = LatticeParameters::uniform(6, 0.0, 1.0, 0.8);
        params.onsite[1] = -0.3;
        params.onsite[4] = 0.6;
        let targets = CurrentTargets::new(5);
        let onsite = specific_current_energies(&psi, &params, &targets, 0.0, 0.0, 2).unwrap();
        let c01 = correlation(&psi, 0, 1);
        let zeta01 = zeta_unchecked(&psi, &params, 0, 1);
        let expected0 = zeta01 / c01 + onsite[1] - 0.8 * populations[0] + 0.8 * populations[1];
        assert!((onsite[0] - expected0).abs() < 1e-13);
        assert_eq!(onsite[1], -0.3);
        assert_eq!(onsite[4], 0.6);
        assert_eq!(onsite[2], 0.0);
        assert_eq!(onsite[3], 0.0);
    }

    #[test]
    fn vanishing_link_correlation_breaks_strategy() {
        let populations = [4.0, 0.0, 0.5, 0.5, 3.0, 4.0];
        let psi = LatticeWavefunction::from_populations_and_phases(&populations, &[0.0; 6]);
        let params = LatticeParameters::uniform(6, 0.0, 1.0, 0.0);
        let targets = CurrentTargets::new(5);
        let err = specific_current_energies(&psi, &params, &targets, 0.0, 0.0, 2).unwrap_err();
        assert!(matches!(
            err,
            Error::StrategyBreakdown { link: 0 } | Error::StrategyBreakdown { link: 1 }
        ));
    }
}
