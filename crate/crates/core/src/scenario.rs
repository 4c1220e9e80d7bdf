//! Scenario configuration, the simulation loop coupling controller,
//! reservoir strategy and integrator, comparison against the two-mode
//! reference, and CSV output.
//!
//! Configurations are strict JSON (schema version 1, unknown keys
//! rejected). Well indices in configuration files and CSV headers are
//! 1-based; the library uses 0-based indices internally.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{
    condition_residuals, initialize_state, ControlEvaluation, ControlState, DStrategy,
    EmbeddingController,
};
use crate::error::Error;
use crate::ground_state::{ground_state, GroundStateRequest};
use crate::integrator::step;
use crate::lattice::{LatticeParameters, LatticeWavefunction, EPS_EMPTY};
use crate::observables::{correlation, current, mod_current};
use crate::reservoir::{proportional_targets, CurrentTargets, LinkTarget, ReservoirPlan};
use crate::schedule::GammaSchedule;
use crate::semiclassical::gaussian_packet;
use crate::two_mode::{self, TwoModeParams, TwoModeState};

fn default_tunneling() -> f64 {
    1.0
}

fn default_dir() -> String {
    "out".into()
}

fn default_stride() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub wells: usize,
    /// 1-based index of the left embedded well.
    pub embedded_left: usize,
    /// Tunneling element on every uncontrolled link (and the embedded one,
    /// which sets the energy and time units).
    #[serde(default = "default_tunneling")]
    pub tunneling: f64,
    /// Interaction strength, uniform across the chain.
    #[serde(default)]
    pub interaction: f64,
    pub gamma: GammaSchedule,
    pub d_strategy: DStrategyConfig,
    pub reservoir: ReservoirConfig,
    pub initial_state: InitialStateConfig,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum DStrategyConfig {
    #[serde(rename = "constant")]
    Constant { value: f64 },
    /// Reference tunnelings default to the lattice `tunneling` value.
    #[serde(rename = "compensating")]
    Compensating {
        #[serde(default)]
        j_left0: Option<f64>,
        #[serde(default)]
        j_right0: Option<f64>,
    },
}

/// One link target: `offset + gamma_coeff * Gamma(t) + condition_fraction *
/// (instantaneous flanking condition current)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkTargetConfig {
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub gamma_coeff: f64,
    #[serde(default)]
    pub condition_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ReservoirConfig {
    #[serde(rename = "level-out")]
    LevelOut,
    #[serde(rename = "stark-lattice")]
    StarkLattice,
    #[serde(rename = "proportional-currents")]
    ProportionalCurrents,
    /// Explicit targets for the outer links, listed outward: `left[0]` is
    /// the link between wells 1 and 2, `right[0]` the link between wells
    /// m+2 and m+3 (1-based).
    #[serde(rename = "specific-currents")]
    SpecificCurrents {
        left: Vec<LinkTargetConfig>,
        right: Vec<LinkTargetConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum InitialStateConfig {
    /// Explicit well populations; phases are chosen so the embedding
    /// conditions and reservoir targets hold at t = 0.
    #[serde(rename = "populations")]
    Populations { populations: Vec<f64> },
    /// Ground state of the chain with these preparation onsite energies
    /// (tunneling and interaction from the main configuration), then
    /// re-phased like the populations recipe.
    #[serde(rename = "ground-state")]
    GroundState {
        onsite: Vec<f64>,
        norm: f64,
        #[serde(default)]
        tolerance: Option<f64>,
    },
    /// Gaussian packet; requires a ramp schedule starting at zero rate and
    /// zero packet momentum so the conditions hold at t = 0.
    #[serde(rename = "gaussian-packet")]
    GaussianPacket {
        center: f64,
        momentum: f64,
        width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            sample_stride: default_stride(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let config: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// 0-based index of the left embedded well.
    pub fn embedded_index(&self) -> usize {
        self.embedded_left - 1
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.version != 1 {
            return fail(format!(
                "unsupported config version {} (expected 1)",
                self.version
            ));
        }
        if self.wells < 4 {
            return fail(format!("need at least 4 wells, got {}", self.wells));
        }
        if self.embedded_left < 2 || self.embedded_left + 2 > self.wells {
            return fail(format!(
                "embedded_left = {} must satisfy 2 <= m and m + 2 <= {}",
                self.embedded_left, self.wells
            ));
        }
        if !self.tunneling.is_finite() || self.tunneling == 0.0 {
            return fail("tunneling must be finite and nonzero".into());
        }
        if !self.interaction.is_finite() {
            return fail("interaction must be finite".into());
        }
        match self.gamma {
            GammaSchedule::Constant { target } => {
                if !target.is_finite() {
                    return fail("gamma target must be finite".into());
                }
            }
            GammaSchedule::AdiabaticRamp { target, ramp_time } => {
                if !target.is_finite() {
                    return fail("gamma target must be finite".into());
                }
                if ramp_time <= 0.0 {
                    return fail("ramp_time must be positive".into());
                }
            }
        }
        if let DStrategyConfig::Constant { value } = self.d_strategy {
            if value == 0.0 || !value.is_finite() {
                return fail("constant gauge value must be finite and nonzero".into());
            }
        }
        let m = self.embedded_index();
        if let ReservoirConfig::SpecificCurrents { left, right } = &self.reservoir {
            let expect_left = m.saturating_sub(1);
            let expect_right = self.wells - m - 3;
            if left.len() != expect_left || right.len() != expect_right {
                return fail(format!(
                    "specific currents need {expect_left} left and {expect_right} right targets, got {} and {}",
                    left.len(),
                    right.len()
                ));
            }
        }
        match &self.initial_state {
            InitialStateConfig::Populations { populations } => {
                if populations.len() != self.wells {
                    return fail(format!(
                        "{} populations for {} wells",
                        populations.len(),
                        self.wells
                    ));
                }
                if populations.iter().any(|n| !n.is_finite() || *n < 0.0) {
                    return fail("populations must be finite and nonnegative".into());
                }
            }
            InitialStateConfig::GroundState {
                onsite,
                norm,
                tolerance,
            } => {
                if onsite.len() != self.wells {
                    return fail(format!(
                        "{} preparation energies for {} wells",
                        onsite.len(),
                        self.wells
                    ));
                }
                if *norm <= 0.0 {
                    return fail("ground-state norm must be positive".into());
                }
                if let Some(tol) = tolerance {
                    if *tol <= 0.0 {
                        return fail("ground-state tolerance must be positive".into());
                    }
                }
            }
            InitialStateConfig::GaussianPacket {
                momentum, width, ..
            } => {
                if *width <= 0.0 || *width >= 0.5 {
                    return fail("packet width must lie in (0, 0.5)".into());
                }
                if *momentum != 0.0 {
                    return fail(
                        "packet momentum must be zero so the conditions hold at t = 0".into(),
                    );
                }
                if self.gamma.value(0.0).0 != 0.0 {
                    return fail(
                        "gaussian-packet initial state requires a schedule starting at zero rate"
                            .into(),
                    );
                }
            }
        }
        if self.integrator.dt <= 0.0 {
            return fail("dt must be positive".into());
        }
        if self.integrator.t_end <= 0.0 {
            return fail("t_end must be positive".into());
        }
        if self.output.sample_stride == 0 {
            return fail("sample_stride must be at least 1".into());
        }
        Ok(())
    }

    fn base_parameters(&self) -> LatticeParameters {
        LatticeParameters {
            onsite: vec![0.0; self.wells],
            tunneling: vec![self.tunneling; self.wells - 1],
            interaction: vec![self.interaction; self.wells],
        }
    }

    fn d_strategy(&self) -> DStrategy {
        match self.d_strategy {
            DStrategyConfig::Constant { value } => DStrategy::Constant { value },
            DStrategyConfig::Compensating { j_left0, j_right0 } => DStrategy::Compensating {
                j_left0: j_left0.unwrap_or(self.tunneling),
                j_right0: j_right0.unwrap_or(self.tunneling),
            },
        }
    }
}

/// Why a run stopped. Breakdown outcomes are recorded, not raised.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// Integrated to `t_end`.
    Completed,
    /// A well among `m-1 ..= m+2` dropped below the empty-well threshold
    /// (`well` is 1-based).
    ReservoirEmpty { well: usize },
    /// The control could no longer be realized (singular energy system,
    /// singular gauge, strategy breakdown, or diverging elements).
    ControlBreakdown { detail: String },
    /// The state stopped being finite.
    BlowUp,
}

impl Termination {
    /// Process exit code contract: breakdown is an expected outcome.
    pub fn exit_code(&self) -> i32 {
        match self {
            Termination::BlowUp => 3,
            _ => 0,
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Completed => write!(f, "completed"),
            Termination::ReservoirEmpty { well } => write!(f, "reservoir-empty(well {well})"),
            Termination::ControlBreakdown { detail } => write!(f, "control-breakdown: {detail}"),
            Termination::BlowUp => write!(f, "blow-up"),
        }
    }
}

fn terminate_from(error: Error) -> Termination {
    match error {
        Error::NonFiniteState { .. } => Termination::BlowUp,
        other => Termination::ControlBreakdown {
            detail: other.to_string(),
        },
    }
}

/// A controlled simulation that can be stepped manually; `run` drives it to
/// completion with sampling.
pub struct Simulation {
    controller: EmbeddingController,
    state: LatticeWavefunction,
    dt: f64,
    total_steps: usize,
    step_index: usize,
    termination: Option<Termination>,
    m: usize,
}

impl Simulation {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self, Error> {
        config.validate()?;
        let m = config.embedded_index();
        let base = config.base_parameters();
        let d_strategy = config.d_strategy();
        let gamma0 = config.gamma.value(0.0).0;

        // Initial populations (or, for the packet, the full state).
        let packet_state: Option<LatticeWavefunction> = match &config.initial_state {
            InitialStateConfig::GaussianPacket {
                center,
                momentum,
                width,
            } => Some(gaussian_packet(config.wells, *center, *momentum, *width)),
            _ => None,
        };
        let populations: Vec<f64> = match &config.initial_state {
            InitialStateConfig::Populations { populations } => populations.clone(),
            InitialStateConfig::GroundState {
                onsite,
                norm,
                tolerance,
            } => {
                let mut prep = base.clone();
                prep.onsite = onsite.clone();
                let mut request = GroundStateRequest::new(prep, *norm);
                if let Some(tol) = tolerance {
                    request.tolerance = *tol;
                }
                let (psi, _mu) = ground_state(&request)?;
                psi.populations()
            }
            InitialStateConfig::GaussianPacket { .. } => {
                packet_state.as_ref().unwrap().populations()
            }
        };

        let plan = match &config.reservoir {
            ReservoirConfig::LevelOut => ReservoirPlan::LevelOut,
            ReservoirConfig::StarkLattice => ReservoirPlan::StarkLattice,
            ReservoirConfig::ProportionalCurrents => ReservoirPlan::SpecificCurrents(
                proportional_targets(&populations, m, config.wells)?,
            ),
            ReservoirConfig::SpecificCurrents { left, right } => {
                let mut targets = CurrentTargets::new(config.wells - 1);
                let as_target = |t: &LinkTargetConfig| LinkTarget {
                    offset: t.offset,
                    gamma_coeff: t.gamma_coeff,
                    condition_fraction: t.condition_fraction,
                };
                for (i, t) in left.iter().enumerate() {
                    targets.set(i, as_target(t));
                }
                for (i, t) in right.iter().enumerate() {
                    targets.set(m + 2 + i, as_target(t));
                }
                ReservoirPlan::SpecificCurrents(targets)
            }
        };

        let state = match packet_state {
            Some(psi) => psi, // real packet, zero rate: conditions hold
            None => initialize_state(&populations, gamma0, &base, m, &d_strategy, plan.targets())?,
        };

        let controller =
            EmbeddingController::new(base, m, config.gamma.clone(), d_strategy, plan, &state)?;
        let total_steps = (config.integrator.t_end / config.integrator.dt).round() as usize;
        Ok(Self {
            controller,
            state,
            dt: config.integrator.dt,
            total_steps,
            step_index: 0,
            termination: None,
            m,
        })
    }

    pub fn state(&self) -> &LatticeWavefunction {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn embedded_left(&self) -> usize {
        self.m
    }

    pub fn controller(&self) -> &EmbeddingController {
        &self.controller
    }

    pub fn termination(&self) -> Option<&Termination> {
        self.termination.as_ref()
    }

    pub fn finished(&self) -> bool {
        self.termination.is_some()
    }

    /// Evaluate the control chain at the current time and state.
    pub fn evaluate(&self) -> Result<ControlEvaluation, Error> {
        self.controller.evaluate(self.state.time, &self.state)
    }

    /// Advance one step. Returns `false` once the run has terminated (the
    /// reason is then available from [`Simulation::termination`]).
    pub fn advance(&mut self) -> bool {
        if self.finished() {
            return false;
        }
        if self.step_index >= self.total_steps {
            self.termination = Some(Termination::Completed);
            return false;
        }
        let controller = &self.controller;
        let mut provider =
            |t: f64, psi: &LatticeWavefunction| controller.evaluate(t, psi).map(|eval| eval.params);
        match step(&self.state, &mut provider, self.dt) {
            Ok(mut next) => {
                self.step_index += 1;
                // Pin sample times to the step grid.
                next.time = self.step_index as f64 * self.dt;
                self.state = next;
                for k in self.m - 1..=self.m + 2 {
                    if self.state.population(k) < EPS_EMPTY {
                        self.termination = Some(Termination::ReservoirEmpty { well: k + 1 });
                        return false;
                    }
                }
                true
            }
            Err(error) => {
                self.termination = Some(terminate_from(error));
                false
            }
        }
    }
}

/// One recorded sample along a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub populations: Vec<f64>,
    /// Physical current on each link.
    pub currents: Vec<f64>,
    /// Modified currents for [`RunRecord::PAIRS`] (relative to the embedded
    /// index).
    pub pair_mod_currents: [f64; 5],
    pub pair_correlations: [f64; 5],
    pub energies: Vec<f64>,
    pub control: ControlState,
    pub residuals: [f64; 4],
    pub norm: f64,
}

/// Sampled time series of a run plus its termination and summary
/// statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub wells: usize,
    /// 0-based index of the left embedded well.
    pub embedded_left: usize,
    pub dt: f64,
    pub sample_stride: usize,
    pub schedule: GammaSchedule,
    pub interaction: f64,
    pub embedded_tunneling: f64,
    pub initial_state: LatticeWavefunction,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub max_residuals: [f64; 4],
    pub max_norm_drift: f64,
}

impl RunRecord {
    /// Recorded pair observables, as offsets against the embedded index m:
    /// (m-1, m), (m, m+1), (m+1, m+2), (m-1, m+1), (m, m+2).
    pub const PAIRS: [(isize, isize); 5] = [(-1, 0), (0, 1), (1, 2), (-1, 1), (0, 2)];

    /// Index of the embedded pair (m, m+1) within the recorded pairs.
    pub const EMBEDDED_PAIR: usize = 1;

    /// Embedded observable quadruple `(n_m, n_{m+1}, jt, C)` of a sample.
    pub fn embedded_observables(&self, sample: &Sample) -> [f64; 4] {
        [
            sample.populations[self.embedded_left],
            sample.populations[self.embedded_left + 1],
            sample.pair_mod_currents[Self::EMBEDDED_PAIR],
            sample.pair_correlations[Self::EMBEDDED_PAIR],
        ]
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

fn record_sample(sim: &Simulation, eval: &ControlEvaluation) -> Sample {
    let psi = sim.state();
    let m = sim.embedded_left() as isize;
    let params = &eval.params;
    let mut pair_mod_currents = [0.0; 5];
    let mut pair_correlations = [0.0; 5];
    for (i, (dk, dl)) in RunRecord::PAIRS.iter().enumerate() {
        let k = (m + dk) as usize;
        let l = (m + dl) as usize;
        pair_mod_currents[i] = mod_current(psi, k, l);
        pair_correlations[i] = correlation(psi, k, l);
    }
    let currents = (0..psi.wells() - 1)
        .map(|i| current(psi, params, i))
        .collect();
    Sample {
        t: psi.time,
        populations: psi.populations(),
        currents,
        pair_mod_currents,
        pair_correlations,
        energies: params.onsite.clone(),
        control: eval.state,
        residuals: condition_residuals(psi, params, eval.state.gamma, sim.embedded_left()),
        norm: psi.total_norm(),
    }
}

/// Run a scenario to completion or termination, sampling every
/// `sample_stride` steps (plus the final state of a completed run).
///
/// Configuration problems are returned as errors; dynamical outcomes
/// (breakdown, empty wells, blow-up) are recorded in the returned record.
pub fn run(config: &ScenarioConfig) -> Result<RunRecord, Error> {
    let mut sim = Simulation::from_config(config)?;
    let stride = config.output.sample_stride;
    let initial_state = sim.state().clone();
    let norm0 = initial_state.total_norm();
    let mut samples = Vec::new();
    let mut max_residuals = [0.0_f64; 4];
    let mut max_norm_drift = 0.0_f64;

    loop {
        let due = sim.step_index % stride == 0 || sim.step_index == sim.total_steps;
        if due {
            match sim.evaluate() {
                Ok(eval) => {
                    let sample = record_sample(&sim, &eval);
                    for (worst, residual) in max_residuals.iter_mut().zip(&sample.residuals) {
                        *worst = worst.max(residual.abs());
                    }
                    max_norm_drift = max_norm_drift.max((sample.norm - norm0).abs());
                    samples.push(sample);
                }
                Err(error) => {
                    sim.termination = Some(terminate_from(error));
                    break;
                }
            }
        }
        if !sim.advance() {
            break;
        }
    }

    let termination = sim.termination.clone().expect("terminated run");
    Ok(RunRecord {
        wells: config.wells,
        embedded_left: sim.m,
        dt: config.integrator.dt,
        sample_stride: stride,
        schedule: config.gamma.clone(),
        interaction: config.interaction,
        embedded_tunneling: config.tunneling,
        initial_state,
        samples,
        termination,
        max_residuals,
        max_norm_drift,
    })
}

/// Largest deviation of each embedded observable from the independently
/// integrated two-mode reference, over the recorded samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport {
    /// Max |difference| for (n_m, n_{m+1}, jt, C).
    pub max_abs: [f64; 4],
    /// Times at which the maxima occurred.
    pub at_time: [f64; 4],
    pub samples: usize,
}

impl DeviationReport {
    pub fn overall(&self) -> f64 {
        self.max_abs.iter().fold(0.0_f64, |a, &b| a.max(b))
    }
}

impl fmt::Display for DeviationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "embedded-pair deviation from the two-mode reference ({} samples):",
            self.samples
        )?;
        let names = ["n_m", "n_m+1", "jt", "C"];
        for (name, (dev, t)) in names.iter().zip(self.max_abs.iter().zip(&self.at_time)) {
            writeln!(f, "  {name:5}  max |dev| = {dev:.3e}  at t = {t:.4}")?;
        }
        write!(f, "  overall = {:.3e}", self.overall())
    }
}

/// Integrate the two-mode reference from the embedded initial amplitudes
/// with the recorded schedule and compare at every sample time.
pub fn compare_embedded(
    record: &RunRecord,
    config: &ScenarioConfig,
) -> Result<DeviationReport, Error> {
    if config.gamma != record.schedule {
        return Err(Error::InvalidConfig(
            "schedule mismatch between record and configuration".into(),
        ));
    }
    if config.wells != record.wells || config.embedded_index() != record.embedded_left {
        return Err(Error::InvalidConfig(
            "geometry mismatch between record and configuration".into(),
        ));
    }
    let m = record.embedded_left;
    let params = TwoModeParams {
        tunneling: record.embedded_tunneling,
        interaction: record.interaction,
    };
    let mut oracle = TwoModeState::new(
        record.initial_state.amplitudes[m],
        record.initial_state.amplitudes[m + 1],
    );
    let dt = record.dt;
    let mut oracle_step: usize = 0;
    let mut report = DeviationReport {
        max_abs: [0.0; 4],
        at_time: [0.0; 4],
        samples: 0,
    };
    for sample in &record.samples {
        let target = (sample.t / dt).round() as usize;
        while oracle_step < target {
            oracle = two_mode::step(&oracle, &record.schedule, &params, dt);
            oracle_step += 1;
            oracle.time = oracle_step as f64 * dt;
        }
        let reference = oracle.observables();
        let embedded = record.embedded_observables(sample);
        for i in 0..4 {
            let dev = (embedded[i] - reference[i]).abs();
            if dev > report.max_abs[i] {
                report.max_abs[i] = dev;
                report.at_time[i] = sample.t;
            }
        }
        report.samples += 1;
    }
    Ok(report)
}

fn fmt_float(value: f64) -> String {
    // 17 significant digits round-trip f64 exactly.
    format!("{value:.16e}")
}

/// Write the sampled run as CSV: one row per sample with columns
/// `t, n_1..n_N, j_1_2..j_{N-1}_N, J_left, J_right, E_1..E_N, gamma, d, det`.
pub fn export_csv(record: &RunRecord, path: &Path) -> Result<(), Error> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let n = record.wells;
    let mut header = String::from("t");
    for k in 1..=n {
        header.push_str(&format!(",n_{k}"));
    }
    for k in 1..n {
        header.push_str(&format!(",j_{k}_{}", k + 1));
    }
    header.push_str(",J_left,J_right");
    for k in 1..=n {
        header.push_str(&format!(",E_{k}"));
    }
    header.push_str(",gamma,d,det");
    writeln!(out, "{header}").map_err(|e| Error::io(path, e))?;
    for sample in &record.samples {
        let mut row = fmt_float(sample.t);
        for v in &sample.populations {
            row.push(',');
            row.push_str(&fmt_float(*v));
        }
        for v in &sample.currents {
            row.push(',');
            row.push_str(&fmt_float(*v));
        }
        row.push(',');
        row.push_str(&fmt_float(sample.control.j_left));
        row.push(',');
        row.push_str(&fmt_float(sample.control.j_right));
        for v in &sample.energies {
            row.push(',');
            row.push_str(&fmt_float(*v));
        }
        row.push(',');
        row.push_str(&fmt_float(sample.control.gamma));
        row.push(',');
        row.push_str(&fmt_float(sample.control.d));
        row.push(',');
        row.push_str(&fmt_float(sample.control.det_numeric));
        writeln!(out, "{row}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Write momentum-space snapshots as long-format CSV with columns
/// `t, q, density`.
pub fn export_momentum_csv(
    snapshots: &[(f64, LatticeWavefunction)],
    path: &Path,
) -> Result<(), Error> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "t,q,density").map_err(|e| Error::io(path, e))?;
    for (t, psi) in snapshots {
        let spectrum = crate::semiclassical::momentum_transform(psi);
        for (q, a) in spectrum.momenta.iter().zip(&spectrum.amplitudes) {
            writeln!(
                out,
                "{},{},{}",
                fmt_float(*t),
                fmt_float(*q),
                fmt_float(a.norm_sqr())
            )
            .map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}
