//! Heralded entanglement between two emitters coupled through a waveguide.
//!
//! Two geometries are covered. In the linear chain the photon passes emitter A
//! and then emitter B on a one-way waveguide and a polarization detector at the
//! end heralds the entangled state. In the Sagnac ring the photon is split over
//! the two propagation directions and destructive interference at the input
//! port routes every converted photon to one of two detectors, which heralds
//! Bell states with unit fidelity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detection::{conditional_state, HeraldBranch, Polarization};
use crate::emitter::EmitterRates;
use crate::error::{Result, SimError};
use crate::pulse::{AdiabaticMoments, PulseEnvelope};
use crate::qstate::TwoQubitState;
use crate::scatter::integrate_excited_amplitude;

/// Propagation speed along the waveguide; lengths are quoted in units
/// where this equals one.
pub const SPEED_OF_LIGHT: f64 = 1.0;

/// Below this many pulse lengths of emitter separation the sequential
/// scattering picture breaks down and the simulation refuses to run.
const SEPARATION_HARD_FACTOR: f64 = 1.0;
/// Below this factor the run proceeds but carries a warning.
const SEPARATION_SOFT_FACTOR: f64 = 10.0;

/// Maximum phase residual for an interference condition to count as met.
const PHASE_TOLERANCE: f64 = 1e-6;
/// Maximum arm-length mismatch in units of the pulse coherence length.
const PATH_TOLERANCE: f64 = 1e-2;

/// Truncation order for the moment sums behind the closed-form rates.
const MOMENT_ORDER: usize = 5;

/// Detector positions used by the network and cloning simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorId {
    /// Polarization-filtered detector behind the last emitter of a chain.
    SigmaMinus,
    /// Counterclockwise output port of the ring.
    Ccw,
    /// Clockwise output port of the ring.
    Cw,
}

impl DetectorId {
    /// Stable text label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            DetectorId::SigmaMinus => "sigma_minus",
            DetectorId::Ccw => "ccw",
            DetectorId::Cw => "cw",
        }
    }
}

/// Emitter state heralded by a click in one detector.
#[derive(Debug, Clone)]
pub struct HeraldedOutcome {
    /// Which detector clicked.
    pub detector: DetectorId,
    /// Two-emitter state conditioned on the click.
    pub conditional_state: TwoQubitState,
    /// Unconditional probability of the click.
    pub probability: f64,
}

/// Two emitters on a one-way waveguide followed by a polarization detector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearSetup {
    /// Rates of the upstream emitter.
    pub emitter_a: EmitterRates,
    /// Rates of the downstream emitter.
    pub emitter_b: EmitterRates,
    /// Distance from emitter A to emitter B.
    pub l_ab: f64,
    /// Distance from emitter B to the detector.
    pub l_bd: f64,
}

impl LinearSetup {
    /// Checks rates and geometry against `input` and collects warnings.
    ///
    /// Errors with `SeparationViolated` when the emitters sit closer than
    /// one pulse length; returns a warning string when they sit closer
    /// than ten.
    pub fn validate(&self, input: &PulseEnvelope) -> Result<Vec<String>> {
        self.emitter_a.validate()?;
        self.emitter_b.validate()?;
        if !self.l_ab.is_finite() || !self.l_bd.is_finite() || self.l_ab <= 0.0 || self.l_bd < 0.0
        {
            return Err(SimError::InvalidConfig(format!(
                "waveguide lengths must be finite with l_ab > 0, got l_ab = {}, l_bd = {}",
                self.l_ab, self.l_bd
            )));
        }
        let bandwidth = input.bandwidth()?;
        let separation = self.l_ab * bandwidth / SPEED_OF_LIGHT;
        if separation < SEPARATION_HARD_FACTOR {
            return Err(SimError::SeparationViolated(format!(
                "emitter separation l_ab = {} covers {separation:.3} pulse lengths, \
                 needs at least {SEPARATION_HARD_FACTOR}",
                self.l_ab
            )));
        }
        let mut warnings = Vec::new();
        if separation < SEPARATION_SOFT_FACTOR {
            warnings.push(format!(
                "emitter separation covers only {separation:.3} pulse lengths; \
                 results assume fully sequential scattering"
            ));
        }
        Ok(warnings)
    }
}

/// Output of [`simulate_linear_entanglement`].
#[derive(Debug, Clone)]
pub struct LinearEntanglementResult {
    /// State and click probability heralded by the polarization detector.
    pub outcome: HeraldedOutcome,
    /// Herald probability accumulated from the simulated amplitudes.
    pub success_rate: f64,
    /// Herald probability predicted by the closed-form rate expression.
    pub success_rate_formula: f64,
    /// Moment sum of the perpendicular part of the field arriving at B.
    pub s_perp: f64,
    /// Moment sums of the input pulse against emitter A.
    pub moments: AdiabaticMoments,
    /// Probability of every event other than the herald click.
    pub non_herald_probability: f64,
    /// Non-fatal validity notices collected during the run.
    pub warnings: Vec<String>,
}

/// Closed-form herald rate of the linear chain for identical emitters with
/// efficiency `eta`, input moment sums `moments` and perpendicular moment
/// sum `s_perp`.
///
/// The expression drops the interference term between the parallel and
/// perpendicular response of emitter B, which is of combined fourth order
/// in the bandwidth.
pub fn linear_success_rate_formula(eta: f64, moments: &AdiabaticMoments, s_perp: f64) -> f64 {
    let s = moments.s;
    let r = moments.r;
    let parallel = 1.0 + (1.0 - eta * s).powi(2) + eta * eta * r * r;
    eta * eta * s * parallel + eta.powi(4) * s_perp * (s - s * s - r * r)
}

fn basis_ket(index: usize) -> [Complex64; 4] {
    let mut ket = [Complex64::new(0.0, 0.0); 4];
    ket[index] = Complex64::new(1.0, 0.0);
    ket
}

/// Runs the linear-chain entanglement protocol for a single input photon.
///
/// The input is normalized to one photon, scattered off emitter A, the
/// transmitted field off emitter B, and the converted branches of
/// both emitters are projected on the polarization detector. All envelopes
/// are tracked in the frame retarded by the travel time, so the quoted
/// lengths only enter the separation check.
pub fn simulate_linear_entanglement(
    setup: &LinearSetup,
    input: &PulseEnvelope,
) -> Result<LinearEntanglementResult> {
    let warnings = setup.validate(input)?;
    let f = input.clone().normalized()?;
    let a = &setup.emitter_a;
    let b = &setup.emitter_b;

    let psi_a = integrate_excited_amplitude(&f, a)?;
    psi_a.require_decayed()?;
    let herald_a = psi_a.as_envelope(Complex64::new(0.0, a.gamma_w_ef.sqrt()));
    let transmitted = f.add(&psi_a.as_envelope(Complex64::new(0.0, a.gamma_w_es.sqrt())))?;

    let psi_b = integrate_excited_amplitude(&transmitted, b)?;
    psi_b.require_decayed()?;
    let herald_b = psi_b.as_envelope(Complex64::new(0.0, b.gamma_w_ef.sqrt()));
    let survivor = transmitted.add(&psi_b.as_envelope(Complex64::new(0.0, b.gamma_w_es.sqrt())))?;

    let branches = [
        HeraldBranch {
            envelope: herald_a,
            polarization: Polarization::SigmaMinus,
            ket: basis_ket(2),
        },
        HeraldBranch {
            envelope: herald_b,
            polarization: Polarization::SigmaMinus,
            ket: basis_ket(1),
        },
    ];
    let (state, success_rate) = conditional_state(&branches)?;

    let excit_a = psi_a.norm_squared();
    let excit_b = psi_b.norm_squared();
    let non_herald_probability = survivor.norm_squared()
        + (a.gamma_b_es + a.gamma_b_ef + a.gamma_other) * excit_a
        + (b.gamma_b_es + b.gamma_b_ef + b.gamma_other) * excit_b;

    let moments = f.moments(a.gamma_total(), MOMENT_ORDER)?;
    let s_perp = perpendicular_moment_sum(&transmitted, &f, b)?;
    let success_rate_formula = linear_success_rate_formula(a.efficiency(), &moments, s_perp);

    Ok(LinearEntanglementResult {
        outcome: HeraldedOutcome {
            detector: DetectorId::SigmaMinus,
            conditional_state: state,
            probability: success_rate,
        },
        success_rate,
        success_rate_formula,
        s_perp,
        moments,
        non_herald_probability,
        warnings,
    })
}

/// Moment sum of the component of `field` orthogonal to `reference`,
/// measured by scattering the normalized perpendicular envelope off
/// emitter `b` and dividing out the transfer efficiency.
fn perpendicular_moment_sum(
    field: &PulseEnvelope,
    reference: &PulseEnvelope,
    b: &EmitterRates,
) -> Result<f64> {
    let decomposition = crate::scatter::orthogonal_decomposition(field, reference)?;
    if decomposition.perp_weight < 1e-14 || b.efficiency() == 0.0 {
        return Ok(0.0);
    }
    let unit_perp = decomposition.perp.normalized()?;
    let psi = integrate_excited_amplitude(&unit_perp, b)?;
    let p_transfer = crate::scatter::transfer_probability(&psi, b)?;
    Ok(p_transfer / b.efficiency())
}

/// Which interference condition a ring port is tuned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceTarget {
    /// Paths add in phase at the port.
    Constructive,
    /// Paths cancel at the port.
    Destructive,
}

/// Result of checking a ring against an interference condition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InterferenceReport {
    /// Condition the ring was checked against.
    pub target: InterferenceTarget,
    /// Distance of the tuned phase from the required value, in radians.
    pub phase_residual: f64,
    /// Arm-length mismatch in units of the pulse coherence length.
    pub path_mismatch: f64,
    /// Whether both the phase and the path condition are met.
    pub pass: bool,
}

/// Two emitters in a Sagnac ring with counterpropagating arms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingSetup {
    /// Rates of the first emitter; must couple both directions equally.
    pub emitter_a: EmitterRates,
    /// Rates of the second emitter; must couple both directions equally.
    pub emitter_b: EmitterRates,
    /// Length of the first ring arm.
    pub l1: f64,
    /// Length of the second ring arm.
    pub l2: f64,
    /// Tuned round-trip phase at the input port, in radians.
    pub interference_phase: f64,
}

impl RingSetup {
    /// Balanced ring: identical direction-symmetric emitters, equal arms,
    /// tuned to destructive interference at the input port.
    pub fn symmetric(gamma_w: f64, gamma_other: f64) -> Self {
        RingSetup {
            emitter_a: EmitterRates::symmetric(gamma_w, gamma_other),
            emitter_b: EmitterRates::symmetric(gamma_w, gamma_other),
            l1: 10.0,
            l2: 10.0,
            interference_phase: std::f64::consts::PI,
        }
    }

    /// Checks rates and arm lengths without touching the interference phase.
    pub fn validate(&self) -> Result<()> {
        self.emitter_a.eta_bar()?;
        self.emitter_b.eta_bar()?;
        if !self.l1.is_finite() || !self.l2.is_finite() || self.l1 <= 0.0 || self.l2 <= 0.0 {
            return Err(SimError::InvalidConfig(format!(
                "ring arm lengths must be finite and positive, got l1 = {}, l2 = {}",
                self.l1, self.l2
            )));
        }
        Ok(())
    }
}

fn wrap_to_pi(angle: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut reduced = angle % two_pi;
    if reduced > std::f64::consts::PI {
        reduced -= two_pi;
    }
    if reduced < -std::f64::consts::PI {
        reduced += two_pi;
    }
    reduced
}

/// Compares the tuned ring phase and arm balance against `target`.
///
/// The report passes when the phase sits within 1e-6 radians of the
/// condition and the arm mismatch stays below a hundredth of the pulse
/// coherence length.
pub fn check_interference(
    setup: &RingSetup,
    input: &PulseEnvelope,
    target: InterferenceTarget,
) -> Result<InterferenceReport> {
    setup.validate()?;
    let bandwidth = input.bandwidth()?;
    let wanted = match target {
        InterferenceTarget::Constructive => 0.0,
        InterferenceTarget::Destructive => std::f64::consts::PI,
    };
    let phase_residual = wrap_to_pi(setup.interference_phase - wanted).abs();
    let path_mismatch = (setup.l1 - setup.l2).abs() * bandwidth / SPEED_OF_LIGHT;
    Ok(InterferenceReport {
        target,
        phase_residual,
        path_mismatch,
        pass: phase_residual < PHASE_TOLERANCE && path_mismatch < PATH_TOLERANCE,
    })
}

/// Output of [`simulate_ring_entanglement`].
#[derive(Debug, Clone)]
pub struct RingEntanglementResult {
    /// Heralded states of the two ring detectors, counterclockwise first.
    pub outcomes: [HeraldedOutcome; 2],
    /// Total herald probability over both detectors.
    pub success_rate: f64,
    /// Closed-form herald probability from the loss-reduced efficiency.
    pub success_rate_formula: f64,
    /// Probability that the input photon survives unconverted.
    pub survivor_probability: f64,
    /// Probability of the antisymmetric unconverted branch; zero for
    /// identical emitters.
    pub difference_probability: f64,
    /// Probability of emission into the loss channels of either emitter.
    pub loss_probability: f64,
}

impl RingEntanglementResult {
    /// Sum over every recorded exit channel; equals one for a unit input.
    pub fn total_probability(&self) -> f64 {
        self.success_rate
            + self.survivor_probability
            + self.difference_probability
            + self.loss_probability
    }
}

/// Shared single-pass scattering of one envelope off both ring emitters.
///
/// Destructive interference at the input port keeps the drive of each
/// emitter equal to the bare input, so the two excitations are computed
/// independently. All returned envelopes live on the input grid.
pub(crate) struct RingPass {
    /// Converted emission of emitter A, per direction.
    pub emit_a: PulseEnvelope,
    /// Converted emission of emitter B, per direction.
    pub emit_b: PulseEnvelope,
    /// Unconverted field leaving through the symmetric port.
    pub survivor: PulseEnvelope,
    /// Unconverted field leaving through the antisymmetric port.
    pub difference: PulseEnvelope,
    /// Probability of emission into the loss channels.
    pub loss_probability: f64,
}

pub(crate) fn ring_pass(
    input: &PulseEnvelope,
    a: &EmitterRates,
    b: &EmitterRates,
) -> Result<RingPass> {
    a.eta_bar()?;
    b.eta_bar()?;
    let psi_a = integrate_excited_amplitude(input, a)?;
    psi_a.require_decayed()?;
    let psi_b = integrate_excited_amplitude(input, b)?;
    psi_b.require_decayed()?;
    let emit_a = psi_a.as_envelope(Complex64::new(0.0, a.gamma_w_es.sqrt()));
    let emit_b = psi_b.as_envelope(Complex64::new(0.0, b.gamma_w_es.sqrt()));
    let survivor = input.add(&emit_a)?.add(&emit_b)?;
    let difference = emit_b.sub(&emit_a)?;
    let loss_probability =
        a.gamma_other * psi_a.norm_squared() + b.gamma_other * psi_b.norm_squared();
    Ok(RingPass {
        emit_a,
        emit_b,
        survivor,
        difference,
        loss_probability,
    })
}

/// Runs the ring entanglement protocol for a single input photon.
///
/// Both converted-photon detectors herald a Bell state: the
/// counterclockwise port projects on the symmetric combination and the
/// clockwise port on the antisymmetric one. The Bell character is exact
/// for identical emitters at any bandwidth and any loss rate because
/// both emitters respond to the same drive.
pub fn simulate_ring_entanglement(
    setup: &RingSetup,
    input: &PulseEnvelope,
) -> Result<RingEntanglementResult> {
    let report = check_interference(setup, input, InterferenceTarget::Destructive)?;
    if !report.pass {
        return Err(SimError::InterferenceConditionViolated(format!(
            "ring needs destructive interference at the input port: \
             phase residual {:.3e} rad (limit {PHASE_TOLERANCE:.0e}), \
             arm mismatch {:.3e} pulse lengths (limit {PATH_TOLERANCE:.0e})",
            report.phase_residual, report.path_mismatch
        )));
    }
    let f = input.clone().normalized()?;
    let pass = ring_pass(&f, &setup.emitter_a, &setup.emitter_b)?;

    let ccw_branches = [
        HeraldBranch {
            envelope: pass.emit_a.clone(),
            polarization: Polarization::SigmaMinus,
            ket: basis_ket(2),
        },
        HeraldBranch {
            envelope: pass.emit_b.clone(),
            polarization: Polarization::SigmaMinus,
            ket: basis_ket(1),
        },
    ];
    let cw_branches = [
        HeraldBranch {
            envelope: pass.emit_a.clone(),
            polarization: Polarization::SigmaMinus,
            ket: basis_ket(2),
        },
        HeraldBranch {
            envelope: pass.emit_b.scaled(Complex64::new(-1.0, 0.0)),
            polarization: Polarization::SigmaMinus,
            ket: basis_ket(1),
        },
    ];
    let (ccw_state, ccw_p) = conditional_state(&ccw_branches)?;
    let (cw_state, cw_p) = conditional_state(&cw_branches)?;

    let eta_bar = setup.emitter_a.eta_bar()?;
    let moments = f.moments(setup.emitter_a.gamma_total(), MOMENT_ORDER)?;
    let success_rate_formula = eta_bar * eta_bar * moments.s;

    Ok(RingEntanglementResult {
        outcomes: [
            HeraldedOutcome {
                detector: DetectorId::Ccw,
                conditional_state: ccw_state,
                probability: ccw_p,
            },
            HeraldedOutcome {
                detector: DetectorId::Cw,
                conditional_state: cw_state,
                probability: cw_p,
            },
        ],
        success_rate: ccw_p + cw_p,
        success_rate_formula,
        survivor_probability: pass.survivor.norm_squared(),
        difference_probability: pass.difference.norm_squared(),
        loss_probability: pass.loss_probability,
    })
}
