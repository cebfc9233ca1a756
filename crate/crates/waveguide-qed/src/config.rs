//! JSON experiment descriptions consumed by the batch runner.
//!
//! A configuration file holds exactly one experiment, selected by its
//! `kind` tag. Fields with natural defaults (ring geometry, integration
//! method, grid resolution) may be omitted. Complex numbers are written
//! as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cloning::BlochSampler;
use crate::collision::MAX_DT_GAMMA;
use crate::emitter::EmitterRates;
use crate::error::{Result, SimError};
use crate::network::{InterferenceTarget, LinearSetup, RingSetup};
use crate::pulse::{PulseEnvelope, PulseShape, DEFAULT_POINTS_PER_SCALE};
use crate::qstate::PhotonQubit;

fn default_phase() -> f64 {
    std::f64::consts::PI
}

fn default_arm_length() -> f64 {
    10.0
}

fn default_dt_gamma() -> f64 {
    1e-3
}

/// Qubit amplitudes as `[re, im]` pairs; normalized on conversion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    /// Amplitude on the first polarization.
    pub alpha: [f64; 2],
    /// Amplitude on the second polarization.
    pub beta: [f64; 2],
}

impl QubitConfig {
    /// Converts to a normalized qubit, rejecting the zero vector.
    pub fn to_qubit(&self) -> Result<PhotonQubit> {
        PhotonQubit::normalized(
            Complex64::new(self.alpha[0], self.alpha[1]),
            Complex64::new(self.beta[0], self.beta[1]),
        )
    }
}

/// Integration method for single-emitter scattering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodConfig {
    /// Step the amplitude equation on the time grid.
    Direct,
    /// Sum the derivative series up to the given order.
    Adiabatic {
        /// Highest derivative order kept in the series.
        order: usize,
    },
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig::Direct
    }
}

/// Range of a swept scalar parameter, inclusive on both ends.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    /// First value of the sweep.
    pub start: f64,
    /// Last value of the sweep.
    pub stop: f64,
    /// Number of points; one point pins the sweep to `start`.
    pub steps: usize,
}

impl RangeSpec {
    /// Expands to the list of swept values.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps == 0 {
            return Err(SimError::InvalidConfig(
                "sweep range needs at least one step".into(),
            ));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "sweep range bounds must be finite, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let span = self.stop - self.start;
        Ok((0..self.steps)
            .map(|i| self.start + span * i as f64 / (self.steps - 1) as f64)
            .collect())
    }
}

/// Named sweep over one scalar parameter of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Which parameter to sweep; `time_scale` is the only supported name.
    pub parameter: String,
    /// Swept range.
    #[serde(flatten)]
    pub range: RangeSpec,
}

impl SweepSpec {
    /// Checks the parameter name and expands the range.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.parameter != "time_scale" {
            return Err(SimError::InvalidConfig(format!(
                "unknown sweep parameter {:?}; supported: \"time_scale\"",
                self.parameter
            )));
        }
        let values = self.range.values()?;
        if values.iter().any(|v| *v <= 0.0) {
            return Err(SimError::InvalidConfig(
                "swept time scales must be positive".into(),
            ));
        }
        Ok(values)
    }
}

/// Single-emitter scattering run, optionally swept over the pulse scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterConfig {
    /// Input pulse shape.
    pub pulse: PulseShape,
    /// Emitter decay rates.
    pub emitter: EmitterRates,
    /// Integration method; defaults to direct stepping.
    #[serde(default)]
    pub method: MethodConfig,
    /// Optional sweep over the pulse time scale.
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    /// Grid points per resolved time scale; defaults to 200.
    #[serde(default)]
    pub points_per_scale: Option<usize>,
}

/// Linear-chain entanglement run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangleLinearConfig {
    /// Input pulse shape.
    pub pulse: PulseShape,
    /// Rates of the upstream emitter.
    pub emitter_a: EmitterRates,
    /// Rates of the downstream emitter.
    pub emitter_b: EmitterRates,
    /// Distance between the emitters.
    pub l_ab: f64,
    /// Distance from the second emitter to the detector.
    pub l_bd: f64,
    /// Grid points per resolved time scale; defaults to 200.
    #[serde(default)]
    pub points_per_scale: Option<usize>,
}

/// Ring entanglement run with direction-symmetric emitters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangleRingConfig {
    /// Input pulse shape.
    pub pulse: PulseShape,
    /// Per-direction waveguide rate of emitter A.
    pub gamma_w: f64,
    /// Loss rate of emitter A.
    #[serde(default)]
    pub gamma_other: f64,
    /// Per-direction waveguide rate of emitter B; defaults to emitter A's.
    #[serde(default)]
    pub gamma_w_b: Option<f64>,
    /// Loss rate of emitter B; defaults to emitter A's.
    #[serde(default)]
    pub gamma_other_b: Option<f64>,
    /// First arm length.
    #[serde(default = "default_arm_length")]
    pub l1: f64,
    /// Second arm length.
    #[serde(default = "default_arm_length")]
    pub l2: f64,
    /// Tuned input-port phase; defaults to the destructive condition.
    #[serde(default = "default_phase")]
    pub interference_phase: f64,
    /// Grid points per resolved time scale; defaults to 200.
    #[serde(default)]
    pub points_per_scale: Option<usize>,
}

/// Symmetric cloning run on the entanglement ring.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloneSymmetricConfig {
    /// Input pulse shape.
    pub pulse: PulseShape,
    /// Per-direction waveguide rate of both emitters.
    pub gamma_w: f64,
    /// Loss rate of both emitters.
    #[serde(default)]
    pub gamma_other: f64,
    /// First arm length.
    #[serde(default = "default_arm_length")]
    pub l1: f64,
    /// Second arm length.
    #[serde(default = "default_arm_length")]
    pub l2: f64,
    /// Tuned input-port phase; defaults to the destructive condition.
    #[serde(default = "default_phase")]
    pub interference_phase: f64,
    /// Input photon polarization state.
    pub qubit: QubitConfig,
    /// Grid points per resolved time scale; defaults to 200.
    #[serde(default)]
    pub points_per_scale: Option<usize>,
}

/// Asymmetric beam-split cloning run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloneAsymmetricConfig {
    /// Per-direction waveguide rate of each arm.
    pub gamma_w: f64,
    /// Optional input pulse; omitted means the ideal narrowband limit.
    #[serde(default)]
    pub pulse: Option<PulseShape>,
    /// Input photon polarization state.
    pub qubit: QubitConfig,
    /// Transfer amplitude of arm A.
    pub eta_bar_a: f64,
    /// Transfer amplitude of arm B.
    pub eta_bar_b: f64,
}

/// Averaged cloning sweep over a transfer-amplitude grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloneSweepConfig {
    /// Grid axis for arm A.
    pub eta_bar_a: RangeSpec,
    /// Grid axis for arm B.
    pub eta_bar_b: RangeSpec,
    /// Input-state averaging rule; defaults to a 128-point lattice.
    #[serde(default)]
    pub sampler: BlochSampler,
}

/// Cross-check of the time-bin model against the amplitude integrator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheckConfig {
    /// Input pulse shape.
    pub pulse: PulseShape,
    /// Emitter decay rates.
    pub emitter: EmitterRates,
    /// Time-bin width in units of the inverse total decay rate.
    #[serde(default = "default_dt_gamma")]
    pub dt_gamma: f64,
    /// Grid points per resolved time scale for the amplitude side.
    #[serde(default)]
    pub points_per_scale: Option<usize>,
}

/// One experiment description, dispatched on the `kind` tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    /// Single-emitter scattering.
    Scatter(ScatterConfig),
    /// Linear-chain entanglement.
    EntangleLinear(EntangleLinearConfig),
    /// Ring entanglement.
    EntangleRing(EntangleRingConfig),
    /// Symmetric cloning on the ring.
    CloneSymmetric(CloneSymmetricConfig),
    /// Asymmetric beam-split cloning.
    CloneAsymmetric(CloneAsymmetricConfig),
    /// Averaged cloning sweep.
    CloneSweep(CloneSweepConfig),
    /// Collision-model cross-check.
    OracleCheck(OracleCheckConfig),
}

impl ExperimentConfig {
    /// Stable name of the experiment kind, matching the JSON tag.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ExperimentConfig::Scatter(_) => "scatter",
            ExperimentConfig::EntangleLinear(_) => "entangle-linear",
            ExperimentConfig::EntangleRing(_) => "entangle-ring",
            ExperimentConfig::CloneSymmetric(_) => "clone-symmetric",
            ExperimentConfig::CloneAsymmetric(_) => "clone-asymmetric",
            ExperimentConfig::CloneSweep(_) => "clone-sweep",
            ExperimentConfig::OracleCheck(_) => "oracle-check",
        }
    }

    /// Parses a configuration from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Collects every schema and physics precondition violation without
    /// running the experiment.
    pub fn check(&self) -> Vec<SimError> {
        let mut issues = Vec::new();
        match self {
            ExperimentConfig::Scatter(c) => check_scatter(c, &mut issues),
            ExperimentConfig::EntangleLinear(c) => check_linear(c, &mut issues),
            ExperimentConfig::EntangleRing(c) => check_ring(c, &mut issues),
            ExperimentConfig::CloneSymmetric(c) => check_clone_symmetric(c, &mut issues),
            ExperimentConfig::CloneAsymmetric(c) => check_clone_asymmetric(c, &mut issues),
            ExperimentConfig::CloneSweep(c) => check_clone_sweep(c, &mut issues),
            ExperimentConfig::OracleCheck(c) => check_oracle(c, &mut issues),
        }
        issues
    }
}

/// Resolution used when a config asks for a probe envelope during
/// validation; coarse on purpose to keep validation fast.
const PROBE_POINTS_PER_SCALE: usize = 64;

fn probe_envelope(pulse: &PulseShape, gamma: f64) -> Result<PulseEnvelope> {
    PulseEnvelope::from_shape_resolved(pulse, gamma, PROBE_POINTS_PER_SCALE)
}

pub(crate) fn resolved_envelope(
    pulse: &PulseShape,
    gamma: f64,
    points_per_scale: Option<usize>,
) -> Result<PulseEnvelope> {
    let pps = points_per_scale.unwrap_or(DEFAULT_POINTS_PER_SCALE);
    PulseEnvelope::from_shape_resolved(pulse, gamma, pps)
}

fn check_scatter(c: &ScatterConfig, issues: &mut Vec<SimError>) {
    if let Err(e) = c.pulse.validate() {
        issues.push(e);
    }
    if let Err(e) = c.emitter.validate() {
        issues.push(e);
    }
    if let Some(sweep) = &c.sweep {
        if let Err(e) = sweep.values() {
            issues.push(e);
        }
    }
    if issues.is_empty() {
        if let MethodConfig::Adiabatic { order } = c.method {
            // The series check needs derivative norms, which a coarse
            // probe envelope supplies at negligible cost.
            let scales = match &c.sweep {
                Some(sweep) => sweep.values().unwrap_or_default(),
                None => vec![c.pulse.time_scale()],
            };
            for scale in scales {
                let shape = c.pulse.with_time_scale(scale);
                match probe_envelope(&shape, c.emitter.gamma_total()) {
                    Ok(env) => {
                        if let Err(e) = env.moments(c.emitter.gamma_total(), order) {
                            issues.push(e);
                            break;
                        }
                    }
                    Err(e) => {
                        issues.push(e);
                        break;
                    }
                }
            }
        }
    }
}

fn check_linear(c: &EntangleLinearConfig, issues: &mut Vec<SimError>) {
    if let Err(e) = c.pulse.validate() {
        issues.push(e);
    }
    let setup = LinearSetup {
        emitter_a: c.emitter_a,
        emitter_b: c.emitter_b,
        l_ab: c.l_ab,
        l_bd: c.l_bd,
    };
    let gamma = c.emitter_a.gamma_total().max(c.emitter_b.gamma_total());
    if gamma <= 0.0 {
        issues.push(SimError::InvalidConfig(
            "emitters have no decay channels".into(),
        ));
        return;
    }
    match probe_envelope(&c.pulse, gamma) {
        Ok(env) => {
            if let Err(e) = setup.validate(&env) {
                issues.push(e);
            }
        }
        Err(e) => issues.push(e),
    }
}

fn ring_setup_from(
    gamma_w: f64,
    gamma_other: f64,
    gamma_w_b: Option<f64>,
    gamma_other_b: Option<f64>,
    l1: f64,
    l2: f64,
    interference_phase: f64,
) -> RingSetup {
    RingSetup {
        emitter_a: EmitterRates::symmetric(gamma_w, gamma_other),
        emitter_b: EmitterRates::symmetric(gamma_w_b.unwrap_or(gamma_w), gamma_other_b.unwrap_or(gamma_other)),
        l1,
        l2,
        interference_phase,
    }
}

impl EntangleRingConfig {
    /// Builds the ring geometry described by this config.
    pub fn setup(&self) -> RingSetup {
        ring_setup_from(
            self.gamma_w,
            self.gamma_other,
            self.gamma_w_b,
            self.gamma_other_b,
            self.l1,
            self.l2,
            self.interference_phase,
        )
    }
}

impl CloneSymmetricConfig {
    /// Builds the ring geometry described by this config.
    pub fn setup(&self) -> RingSetup {
        ring_setup_from(
            self.gamma_w,
            self.gamma_other,
            None,
            None,
            self.l1,
            self.l2,
            self.interference_phase,
        )
    }
}

fn check_ring_geometry(setup: &RingSetup, pulse: &PulseShape, issues: &mut Vec<SimError>) {
    if let Err(e) = pulse.validate() {
        issues.push(e);
        return;
    }
    if let Err(e) = setup.validate() {
        issues.push(e);
        return;
    }
    match probe_envelope(pulse, setup.emitter_a.gamma_total()) {
        Ok(env) => match crate::network::check_interference(
            setup,
            &env,
            InterferenceTarget::Destructive,
        ) {
            Ok(report) if !report.pass => {
                issues.push(SimError::InterferenceConditionViolated(format!(
                    "phase residual {:.3e} rad, arm mismatch {:.3e} pulse lengths",
                    report.phase_residual, report.path_mismatch
                )));
            }
            Ok(_) => {}
            Err(e) => issues.push(e),
        },
        Err(e) => issues.push(e),
    }
}

fn check_ring(c: &EntangleRingConfig, issues: &mut Vec<SimError>) {
    check_ring_geometry(&c.setup(), &c.pulse, issues);
}

fn check_clone_symmetric(c: &CloneSymmetricConfig, issues: &mut Vec<SimError>) {
    if let Err(e) = c.qubit.to_qubit() {
        issues.push(e);
    }
    check_ring_geometry(&c.setup(), &c.pulse, issues);
}

fn check_clone_asymmetric(c: &CloneAsymmetricConfig, issues: &mut Vec<SimError>) {
    if let Err(e) = c.qubit.to_qubit() {
        issues.push(e);
    }
    if !c.gamma_w.is_finite() || c.gamma_w <= 0.0 {
        issues.push(SimError::InvalidConfig(format!(
            "waveguide rate must be positive, got {}",
            c.gamma_w
        )));
    }
    for (label, eta) in [("A", c.eta_bar_a), ("B", c.eta_bar_b)] {
        if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
            issues.push(SimError::InvalidEfficiency(format!(
                "transfer amplitude for arm {label} must lie in [0, 1], got {eta}"
            )));
        }
    }
    if let Some(pulse) = &c.pulse {
        if let Err(e) = pulse.validate() {
            issues.push(e);
        }
    }
}

fn check_clone_sweep(c: &CloneSweepConfig, issues: &mut Vec<SimError>) {
    for (axis, range) in [("eta_bar_a", &c.eta_bar_a), ("eta_bar_b", &c.eta_bar_b)] {
        match range.values() {
            Ok(values) => {
                if values
                    .iter()
                    .any(|v| !v.is_finite() || !(0.0..=1.0).contains(v))
                {
                    issues.push(SimError::InvalidEfficiency(format!(
                        "axis {axis} must stay within [0, 1]"
                    )));
                }
            }
            Err(e) => issues.push(e),
        }
    }
    if let BlochSampler::Fibonacci { points: 0 } = c.sampler {
        issues.push(SimError::InvalidConfig(
            "Fibonacci sampler needs at least one point".into(),
        ));
    }
}

fn check_oracle(c: &OracleCheckConfig, issues: &mut Vec<SimError>) {
    if let Err(e) = c.pulse.validate() {
        issues.push(e);
    }
    if let Err(e) = c.emitter.validate() {
        issues.push(e);
    }
    if !(c.dt_gamma > 0.0) || c.dt_gamma >= MAX_DT_GAMMA {
        issues.push(SimError::StepTooLarge(format!(
            "dt_gamma = {} outside (0, {MAX_DT_GAMMA})",
            c.dt_gamma
        )));
    }
}
