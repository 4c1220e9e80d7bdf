//! Simulation of Hermitian multi-well condensate chains in which two
//! embedded wells are driven, by closed-loop control of onsite energies and
//! tunneling elements, to reproduce exactly the dynamics of a two-mode
//! system with balanced gain and loss.
//!
//! The crate provides
//!
//! * the discrete nonlinear Schrödinger chain and its observable algebra
//!   ([`lattice`], [`mod@observables`], [`integrator`]),
//! * a reference integrator for the gain/loss dimer used as the exactness
//!   oracle ([`two_mode`]),
//! * the embedding controller: gauge function, controlled tunnelings, the
//!   2x2 energy solve and its determinant diagnostics ([`control`]),
//! * strategies for the remaining reservoir onsite energies, including the
//!   tilted-lattice extension ([`reservoir`]),
//! * ground-state preparation by imaginary-time propagation
//!   ([`ground_state`]),
//! * single-band semiclassics: dispersion, wave packets, Bloch oscillation
//!   and momentum-space analysis ([`semiclassical`]),
//! * scenario configuration, the run loop and CSV export ([`scenario`]).
//!
//! Units: `hbar = 1` and the embedded tunneling element is the energy
//! scale, so times are in `hbar/J`. All functions are deterministic; a run
//! is reproducible bit for bit from its configuration.

pub mod control;
pub mod error;
pub mod ground_state;
pub mod integrator;
pub mod lattice;
pub mod observables;
pub mod reservoir;
pub mod scenario;
pub mod schedule;
pub mod semiclassical;
pub mod two_mode;

pub use control::{ControlEvaluation, ControlState, DStrategy, EmbeddingController};
pub use error::Error;
pub use integrator::{step, FixedParameters, ParameterProvider};
pub use lattice::{gpe_rhs, total_norm, LatticeParameters, LatticeWavefunction, EPS_EMPTY};
pub use observables::{observables, zeta_eta, ObservableSet};
pub use reservoir::{
    level_out, proportional_targets, specific_current_energies, stark_extension, CurrentTargets,
    LinkTarget, ReservoirPlan,
};
pub use scenario::{
    compare_embedded, export_csv, export_momentum_csv, run, DeviationReport, RunRecord, Sample,
    ScenarioConfig, Simulation, Termination,
};
pub use schedule::GammaSchedule;
pub use two_mode::{linear_spectrum, TwoModeParams, TwoModeState};
