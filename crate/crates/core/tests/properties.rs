//! Property-based invariants of the observable algebra and transforms.

use num_complex::Complex64;
use proptest::prelude::*;

use ptlattice::control::controlled_tunnelings;
use ptlattice::observables::{correlation, mod_current, zeta_eta};
use ptlattice::semiclassical::momentum_transform;
use ptlattice::two_mode::TwoModeState;
use ptlattice::{LatticeParameters, LatticeWavefunction};

fn amplitude() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn state(wells: usize) -> impl Strategy<Value = LatticeWavefunction> {
    prop::collection::vec(amplitude(), wells).prop_map(LatticeWavefunction::new)
}

fn parameters(wells: usize) -> impl Strategy<Value = LatticeParameters> {
    (
        prop::collection::vec(-2.0..2.0f64, wells),
        prop::collection::vec(-1.5..1.5f64, wells - 1),
        prop::collection::vec(0.0..2.0f64, wells),
    )
        .prop_map(|(onsite, tunneling, interaction)| LatticeParameters {
            onsite,
            tunneling,
            interaction,
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn modified_current_is_exactly_antisymmetric(psi in state(4)) {
        for k in 0..4 {
            for l in 0..4 {
                prop_assert_eq!(mod_current(&psi, k, l) + mod_current(&psi, l, k), 0.0);
            }
        }
    }

    #[test]
    fn correlation_is_exactly_symmetric(psi in state(4)) {
        for k in 0..4 {
            for l in 0..4 {
                prop_assert_eq!(correlation(&psi, k, l), correlation(&psi, l, k));
            }
        }
    }

    #[test]
    fn pair_quantities_obey_cauchy_schwarz(psi in state(5)) {
        for k in 0..5 {
            for l in 0..5 {
                let bound = 2.0 * (psi.population(k) * psi.population(l)).sqrt();
                let slack = 1e-12 * bound.max(1.0);
                prop_assert!(mod_current(&psi, k, l).abs() <= bound + slack);
                prop_assert!(correlation(&psi, k, l).abs() <= bound + slack);
            }
        }
    }

    #[test]
    fn pair_quantities_are_consistent(psi in state(4)) {
        // jt^2 + C^2 = 4 n_k n_l for amplitude-derived states.
        for k in 0..4 {
            for l in 0..4 {
                let jt = mod_current(&psi, k, l);
                let c = correlation(&psi, k, l);
                let rhs = 4.0 * psi.population(k) * psi.population(l);
                prop_assert!((jt * jt + c * c - rhs).abs() <= 1e-12 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn neighbor_sums_are_antisymmetric((psi, params) in (state(6), parameters(6))) {
        for k in 0..6 {
            for l in 0..6 {
                let (zeta_kl, eta_kl) = zeta_eta(&psi, &params, k, l).unwrap();
                let (zeta_lk, _) = zeta_eta(&psi, &params, l, k).unwrap();
                let scale = zeta_kl.abs().max(1.0);
                prop_assert!((zeta_kl + zeta_lk).abs() <= 1e-12 * scale);
                let _ = eta_kl;
            }
        }
    }

    #[test]
    fn controlled_tunnelings_satisfy_the_correlation_condition(
        psi in state(5),
        d in 0.1..3.0f64,
    ) {
        let m = 1;
        let (j_left, j_right) = controlled_tunnelings(&psi, d, m);
        let residual = j_left * correlation(&psi, m - 1, m + 1)
            - j_right * correlation(&psi, m, m + 2);
        let scale = (j_left.abs() + j_right.abs()).max(1.0);
        prop_assert!(residual.abs() <= 1e-13 * scale);
    }

    #[test]
    fn two_mode_observables_are_consistent(a in amplitude(), b in amplitude()) {
        let state = TwoModeState::new(a, b);
        let [n1, n2, jt, c] = state.observables();
        prop_assert!((jt * jt + c * c - 4.0 * n1 * n2).abs() <= 1e-12);
    }

    #[test]
    fn parseval_identity_holds(psi in state(24)) {
        let spectrum = momentum_transform(&psi);
        let expected = 24.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI)
            * psi.total_norm();
        prop_assert!((spectrum.total_density() - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn norm_stays_conserved_under_hermitian_steps(
        (psi, params) in (state(4), parameters(4)),
    ) {
        let mut provider = ptlattice::FixedParameters(params);
        let mut state = psi;
        let n0 = state.total_norm();
        for _ in 0..50 {
            state = ptlattice::step(&state, &mut provider, 1e-3).unwrap();
        }
        // Integrator-limited: RK4 loses O((|H| dt)^6) of the norm per step
        // for the sampled Hamiltonian scales.
        prop_assert!((state.total_norm() - n0).abs() <= 1e-11 * n0.max(1.0));
    }
}
