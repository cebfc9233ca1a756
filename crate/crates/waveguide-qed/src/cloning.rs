//! Copying a photonic polarization qubit onto a pair of emitters.
//!
//! Two schemes are implemented. The symmetric scheme sends the photon into
//! the entanglement ring with the emitters prepared in a Bell state and
//! reads both ring ports with polarization-insensitive detectors; a click
//! on the symmetric port leaves optimal clones on both emitters. The
//! asymmetric scheme splits the photon over two single-emitter rings with
//! tunable loss and recombines the arms on a balanced beam splitter, which
//! trades fidelity between the two copies through the per-arm transfer
//! amplitudes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{conditional_state, HeraldBranch, Polarization};
use crate::emitter::EmitterRates;
use crate::error::{Result, SimError};
use crate::network::{check_interference, ring_pass, DetectorId, InterferenceTarget, RingSetup};
use crate::pulse::{PulseEnvelope, PulseShape};
use crate::qstate::{DensityMatrix, PhotonQubit, Subsystem, TwoQubitState};
use crate::scatter::integrate_excited_amplitude;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// State of both emitter copies conditioned on one detector click.
#[derive(Debug, Clone)]
pub struct CloneBranch {
    /// Detector whose click heralds this branch.
    pub detector: DetectorId,
    /// Reduced state of emitter A.
    pub rho_a: DensityMatrix,
    /// Reduced state of emitter B.
    pub rho_b: DensityMatrix,
    /// Unconditional click probability.
    pub probability: f64,
    /// Overlap of emitter A with the transferred input qubit.
    pub fidelity_a: f64,
    /// Overlap of emitter B with the transferred input qubit.
    pub fidelity_b: f64,
}

/// Output of the cloning simulations.
#[derive(Debug, Clone)]
pub struct CloneResult {
    /// Heralding branches in detector order, symmetric port first.
    pub branches: Vec<CloneBranch>,
    /// Probability that the photon escaped through a loss channel.
    pub loss_probability: f64,
    /// Click-weighted mean clone fidelity over all branches.
    pub one_shot_fidelity: f64,
}

impl CloneResult {
    /// Sum of branch and loss probabilities; equals one for a unit input.
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum::<f64>() + self.loss_probability
    }

    /// Branch heralded by the given detector.
    pub fn branch(&self, detector: DetectorId) -> Option<&CloneBranch> {
        self.branches.iter().find(|b| b.detector == detector)
    }
}

/// One point of a cloning parameter sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CloningSweepPoint {
    /// Transfer amplitude of arm A.
    pub eta_bar_a: f64,
    /// Transfer amplitude of arm B.
    pub eta_bar_b: f64,
    /// Fidelity of copy A averaged over input states.
    pub f_a_avg: f64,
    /// Fidelity of copy B averaged over input states.
    pub f_b_avg: f64,
    /// Herald probability, independent of the input state.
    pub success_rate: f64,
}

fn fidelity_of(rho: &DensityMatrix, qubit: &PhotonQubit) -> Result<f64> {
    rho.fidelity(&qubit.reference_state())
}

fn clone_branch(
    detector: DetectorId,
    state: &TwoQubitState,
    probability: f64,
    qubit: &PhotonQubit,
) -> Result<CloneBranch> {
    let rho_a = state.partial_trace(Subsystem::A);
    let rho_b = state.partial_trace(Subsystem::B);
    let fidelity_a = fidelity_of(&rho_a, qubit)?;
    let fidelity_b = fidelity_of(&rho_b, qubit)?;
    Ok(CloneBranch {
        detector,
        rho_a,
        rho_b,
        probability,
        fidelity_a,
        fidelity_b,
    })
}

fn one_shot_fidelity(branches: &[CloneBranch]) -> f64 {
    branches
        .iter()
        .map(|b| b.probability * 0.5 * (b.fidelity_a + b.fidelity_b))
        .sum()
}

fn basis_ket(index: usize) -> [Complex64; 4] {
    let mut ket = [Complex64::new(0.0, 0.0); 4];
    ket[index] = Complex64::new(1.0, 0.0);
    ket
}

/// Herald probability of the symmetric port for moment sum `s`, lossless.
pub fn symmetric_probability_formula(s: f64) -> f64 {
    1.0 - 0.25 * s
}

/// Clone fidelity heralded by the symmetric port for moment sum `s`,
/// lossless; input-independent.
pub fn symmetric_fidelity_formula(s: f64) -> f64 {
    (0.5 + 0.125 * s) / (1.0 - 0.25 * s)
}

/// Click-weighted mean fidelity over both ports for moment sum `s`,
/// lossless.
pub fn symmetric_one_shot_formula(s: f64) -> f64 {
    0.5 + 0.25 * s
}

/// Clones the photon qubit onto the ring emitters prepared in the Bell
/// state with equal weight on both doubly-flipped components.
///
/// The polarization components of the input act on complementary parts of
/// the emitter state, so one ring pass per polarization covers the full
/// evolution; the two passes share their envelopes because the rates of
/// both transitions match. Each ring port is read without polarization
/// selection and the reduced emitter states are compared against the
/// transferred qubit.
pub fn simulate_symmetric_cloning(
    setup: &RingSetup,
    input: &PulseEnvelope,
    qubit: &PhotonQubit,
) -> Result<CloneResult> {
    let report = check_interference(setup, input, InterferenceTarget::Destructive)?;
    if !report.pass {
        return Err(SimError::InterferenceConditionViolated(format!(
            "cloning ring needs destructive interference at the input port: \
             phase residual {:.3e} rad, arm mismatch {:.3e} pulse lengths",
            report.phase_residual, report.path_mismatch
        )));
    }
    let f = input.clone().normalized()?;
    let pass = ring_pass(&f, &setup.emitter_a, &setup.emitter_b)?;
    let alpha = qubit.alpha() * SQRT_HALF;
    let beta = qubit.beta() * SQRT_HALF;
    let minus_one = Complex64::new(-1.0, 0.0);

    let branch = |env: &PulseEnvelope, scale: Complex64, pol: Polarization, ket: usize| {
        HeraldBranch {
            envelope: env.scaled(scale),
            polarization: pol,
            ket: basis_ket(ket),
        }
    };

    // Symmetric port: passed and survived envelopes plus one converted
    // copy per emitter and input polarization.
    let ccw = [
        branch(&f, alpha, Polarization::SigmaPlus, 3),
        branch(&pass.survivor, alpha, Polarization::SigmaPlus, 0),
        branch(&pass.emit_a, beta, Polarization::SigmaPlus, 1),
        branch(&pass.emit_b, beta, Polarization::SigmaPlus, 2),
        branch(&f, beta, Polarization::SigmaMinus, 0),
        branch(&pass.survivor, beta, Polarization::SigmaMinus, 3),
        branch(&pass.emit_a, alpha, Polarization::SigmaMinus, 2),
        branch(&pass.emit_b, alpha, Polarization::SigmaMinus, 1),
    ];
    // Antisymmetric port: converted copies with opposite signs and the
    // difference of the unconverted responses.
    let cw = [
        branch(&pass.emit_a, beta, Polarization::SigmaPlus, 1),
        branch(&pass.emit_b, beta * minus_one, Polarization::SigmaPlus, 2),
        branch(&pass.difference, alpha, Polarization::SigmaPlus, 0),
        branch(&pass.emit_a, alpha, Polarization::SigmaMinus, 2),
        branch(&pass.emit_b, alpha * minus_one, Polarization::SigmaMinus, 1),
        branch(&pass.difference, beta, Polarization::SigmaMinus, 3),
    ];

    let (ccw_state, ccw_p) = conditional_state(&ccw)?;
    let (cw_state, cw_p) = conditional_state(&cw)?;
    let branches = vec![
        clone_branch(DetectorId::Ccw, &ccw_state, ccw_p, qubit)?,
        clone_branch(DetectorId::Cw, &cw_state, cw_p, qubit)?,
    ];
    let one_shot = one_shot_fidelity(&branches);
    Ok(CloneResult {
        branches,
        // Both polarization sectors excite the emitters with the same
        // envelopes, so the per-pass loss applies at half weight each.
        loss_probability: pass.loss_probability
            * 0.5
            * (qubit.alpha().norm_sqr() + qubit.beta().norm_sqr()),
        one_shot_fidelity: one_shot,
    })
}

/// Per-arm conversion coefficients of the asymmetric scheme.
///
/// Returns the amplitudes multiplying the doubly-converted, the
/// arm-A-passed and the arm-B-passed components of the final state.
pub fn asymmetric_coefficients(eta_bar_a: f64, eta_bar_b: f64) -> (f64, f64, f64) {
    let c1 = eta_bar_a + eta_bar_b - eta_bar_a * eta_bar_b;
    let c2 = 1.0 - eta_bar_a;
    let c3 = eta_bar_a * eta_bar_b + 1.0 - eta_bar_b;
    (c1, c2, c3)
}

/// Closed-form herald probability of the asymmetric scheme, summed over
/// both detectors.
pub fn asymmetric_success_rate(eta_bar_a: f64, eta_bar_b: f64) -> f64 {
    let (c1, c2, c3) = asymmetric_coefficients(eta_bar_a, eta_bar_b);
    0.5 * (c1 * c1 + c2 * c2 + c3 * c3)
}

/// Closed-form clone fidelities of the asymmetric scheme for an input
/// with squared coherence `m` = |alpha beta|^2.
pub fn asymmetric_fidelities(eta_bar_a: f64, eta_bar_b: f64, m: f64) -> (f64, f64) {
    let (c1, c2, c3) = asymmetric_coefficients(eta_bar_a, eta_bar_b);
    let two_r = c1 * c1 + c2 * c2 + c3 * c3;
    let f_a = 1.0 - c2 * c2 * (1.0 - 8.0 * m * eta_bar_b * (1.0 - eta_bar_b)) / two_r;
    let f_b =
        1.0 - (c3 * c3 - 8.0 * m * eta_bar_a * (1.0 - eta_bar_a) * (1.0 - eta_bar_b)) / two_r;
    (f_a, f_b)
}

/// Beam-split cloning circuit with one emitter ring per arm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymmetricSetup {
    /// Per-direction waveguide rate of each ring transition.
    pub gamma_w: f64,
    /// Input pulse shape; `None` evaluates the ideal narrowband limit.
    #[serde(default)]
    pub input: Option<PulseShape>,
}

impl AsymmetricSetup {
    /// Ideal narrowband circuit with the given rate scale.
    pub fn ideal(gamma_w: f64) -> Self {
        AsymmetricSetup {
            gamma_w,
            input: None,
        }
    }

    /// Circuit driven by an explicit pulse; exposes nonadiabatic
    /// distortion that the ideal limit hides. The finite-bandwidth
    /// behavior of this scheme is not covered by closed forms and should
    /// be treated as exploratory.
    pub fn with_input(gamma_w: f64, input: PulseShape) -> Self {
        AsymmetricSetup {
            gamma_w,
            input: Some(input),
        }
    }

    fn validate(&self, eta_bar_a: f64, eta_bar_b: f64) -> Result<()> {
        if !self.gamma_w.is_finite() || self.gamma_w <= 0.0 {
            return Err(SimError::InvalidConfig(format!(
                "waveguide rate must be positive, got {}",
                self.gamma_w
            )));
        }
        for (label, eta) in [("A", eta_bar_a), ("B", eta_bar_b)] {
            if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
                return Err(SimError::InvalidEfficiency(format!(
                    "transfer amplitude for arm {label} must lie in [0, 1], got {eta}"
                )));
            }
        }
        Ok(())
    }
}

/// Clones the photon qubit onto two emitters with tunable imbalance.
///
/// Each arm realizes the map that converts the resonant polarization with
/// amplitude `-eta_bar` while transmitting with amplitude `1 - eta_bar`,
/// with the emitters prepared in the Bell state sharing one flip. Both
/// beam splitter outputs herald the same reduced states; their branches
/// are reported separately along with the closed-form cross-check values.
pub fn simulate_asymmetric_cloning(
    setup: &AsymmetricSetup,
    qubit: &PhotonQubit,
    eta_bar_a: f64,
    eta_bar_b: f64,
) -> Result<CloneResult> {
    setup.validate(eta_bar_a, eta_bar_b)?;
    match &setup.input {
        None => asymmetric_ideal(qubit, eta_bar_a, eta_bar_b),
        Some(shape) => asymmetric_with_pulse(setup.gamma_w, shape, qubit, eta_bar_a, eta_bar_b),
    }
}

fn asymmetric_ideal(qubit: &PhotonQubit, eta_bar_a: f64, eta_bar_b: f64) -> Result<CloneResult> {
    let (c1, c2, c3) = asymmetric_coefficients(eta_bar_a, eta_bar_b);
    let alpha = qubit.alpha();
    let beta = qubit.beta();
    let quarter = Complex64::new(0.5, 0.0);

    // Per-detector polarization components over the emitter basis.
    let w_plus: [Complex64; 4] = [
        -quarter * c1 * beta,
        quarter * c2 * alpha,
        quarter * c3 * alpha,
        Complex64::new(0.0, 0.0),
    ];
    let w_minus: [Complex64; 4] = [
        Complex64::new(0.0, 0.0),
        quarter * c3 * beta,
        quarter * c2 * beta,
        -quarter * c1 * alpha,
    ];

    let mut branches = Vec::with_capacity(2);
    for detector in [DetectorId::Ccw, DetectorId::Cw] {
        let mut rho = DensityMatrix::zeros(4);
        rho.add_outer(&w_plus, 1.0);
        rho.add_outer(&w_minus, 1.0);
        let probability = rho.trace();
        let state = TwoQubitState::from_density(rho.normalized()?)?;
        branches.push(clone_branch(detector, &state, probability, qubit)?);
    }
    let one_shot = one_shot_fidelity(&branches);
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    Ok(CloneResult {
        branches,
        loss_probability: 1.0 - total,
        one_shot_fidelity: one_shot,
    })
}

/// Index of a field component: polarization plus both emitter labels.
type SlotKey = (Polarization, usize, usize);

fn arm_couples(pol: Polarization, emitter_state: usize) -> bool {
    match pol {
        Polarization::SigmaPlus => emitter_state == 0,
        Polarization::SigmaMinus => emitter_state == 1,
    }
}

fn union_rates(gamma_w: f64, eta_bar: f64) -> EmitterRates {
    let gamma_other = 4.0 * gamma_w * (1.0 - eta_bar) / eta_bar;
    EmitterRates {
        gamma_w_es: 2.0 * gamma_w,
        gamma_b_es: 0.0,
        gamma_w_ef: 2.0 * gamma_w,
        gamma_b_ef: 0.0,
        gamma_other,
    }
}

fn asymmetric_with_pulse(
    gamma_w: f64,
    shape: &PulseShape,
    qubit: &PhotonQubit,
    eta_bar_a: f64,
    eta_bar_b: f64,
) -> Result<CloneResult> {
    // Each constructive ring drives its emitter through the symmetric
    // combination of both directions, which behaves as a single mode at
    // twice the per-direction rate.
    let arms = [eta_bar_a, eta_bar_b].map(|eta| {
        if eta > 0.0 {
            Some(union_rates(gamma_w, eta))
        } else {
            None
        }
    });
    let gamma_scale = arms
        .iter()
        .flatten()
        .map(EmitterRates::gamma_total)
        .fold(4.0 * gamma_w, f64::max);
    let f = PulseEnvelope::from_shape(shape, gamma_scale)?.normalized()?;

    let half = Complex64::new(SQRT_HALF, 0.0);
    let alpha = qubit.alpha() * half;
    let beta = qubit.beta() * half;
    let mut slots: Vec<(SlotKey, PulseEnvelope)> = vec![
        ((Polarization::SigmaPlus, 1, 0), f.scaled(alpha)),
        ((Polarization::SigmaPlus, 0, 1), f.scaled(alpha)),
        ((Polarization::SigmaMinus, 1, 0), f.scaled(beta)),
        ((Polarization::SigmaMinus, 0, 1), f.scaled(beta)),
    ];
    let mut loss_probability = 0.0;

    for (arm_index, arm) in arms.iter().enumerate() {
        let Some(rates) = arm else {
            continue;
        };
        let mut next: Vec<(SlotKey, PulseEnvelope)> = Vec::with_capacity(slots.len() + 2);
        let mut merge = |key: SlotKey, env: PulseEnvelope| -> Result<()> {
            for (existing_key, existing) in next.iter_mut() {
                if *existing_key == key {
                    *existing = existing.add(&env)?;
                    return Ok(());
                }
            }
            next.push((key, env));
            Ok(())
        };
        for ((pol, a, b), env) in &slots {
            let local = if arm_index == 0 { *a } else { *b };
            if !arm_couples(*pol, local) {
                merge((*pol, *a, *b), env.clone())?;
                continue;
            }
            let psi = integrate_excited_amplitude(env, rates)?;
            psi.require_decayed()?;
            let emitted = psi.as_envelope(Complex64::new(0.0, rates.gamma_w_es.sqrt()));
            let survivor = env.add(&emitted)?;
            loss_probability += rates.gamma_other * psi.norm_squared();
            let flipped_pol = match pol {
                Polarization::SigmaPlus => Polarization::SigmaMinus,
                Polarization::SigmaMinus => Polarization::SigmaPlus,
            };
            let flipped_key = if arm_index == 0 {
                (flipped_pol, 1 - *a, *b)
            } else {
                (flipped_pol, *a, 1 - *b)
            };
            merge((*pol, *a, *b), survivor)?;
            merge(flipped_key, emitted)?;
        }
        slots = next;
    }

    // The beam splitter sends the same superposition to both detectors up
    // to a global phase, so the two branches share one projection.
    let mut branches = Vec::with_capacity(2);
    for detector in [DetectorId::Ccw, DetectorId::Cw] {
        let herald: Vec<HeraldBranch> = slots
            .iter()
            .map(|((pol, a, b), env)| HeraldBranch {
                envelope: env.scaled(half),
                polarization: *pol,
                ket: basis_ket(2 * a + b),
            })
            .collect();
        let (state, probability) = conditional_state(&herald)?;
        branches.push(clone_branch(detector, &state, probability, qubit)?);
    }
    let one_shot = one_shot_fidelity(&branches);
    Ok(CloneResult {
        branches,
        loss_probability,
        one_shot_fidelity: one_shot,
    })
}

/// Input-state sampler for averaged cloning figures.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "kebab-case")]
pub enum BlochSampler {
    /// Exact average over the uniform sphere measure, where the squared
    /// coherence averages to one sixth.
    ClosedForm,
    /// Deterministic spherical Fibonacci lattice with the given size.
    Fibonacci { points: usize },
}

impl Default for BlochSampler {
    fn default() -> Self {
        BlochSampler::Fibonacci { points: 128 }
    }
}

/// Mean squared coherence of uniformly distributed pure qubit states.
pub const UNIFORM_BLOCH_M: f64 = 1.0 / 6.0;

/// Deterministic quasi-uniform sample of pure qubit states.
pub fn fibonacci_bloch_states(points: usize) -> Vec<PhotonQubit> {
    let golden = 0.5 * (5.0_f64.sqrt() - 1.0);
    (0..points)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / points as f64;
            let theta = z.clamp(-1.0, 1.0).acos();
            let phi = 2.0 * std::f64::consts::PI * ((i as f64 * golden) % 1.0);
            PhotonQubit::from_bloch(theta, phi)
        })
        .collect()
}

/// Clone fidelities and herald rate averaged over input states.
pub fn bloch_average_fidelity(
    eta_bar_a: f64,
    eta_bar_b: f64,
    sampler: &BlochSampler,
) -> Result<(f64, f64, f64)> {
    for eta in [eta_bar_a, eta_bar_b] {
        if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
            return Err(SimError::InvalidEfficiency(format!(
                "transfer amplitude must lie in [0, 1], got {eta}"
            )));
        }
    }
    let rate = asymmetric_success_rate(eta_bar_a, eta_bar_b);
    match sampler {
        BlochSampler::ClosedForm => {
            let (f_a, f_b) = asymmetric_fidelities(eta_bar_a, eta_bar_b, UNIFORM_BLOCH_M);
            Ok((f_a, f_b, rate))
        }
        BlochSampler::Fibonacci { points } => {
            if *points == 0 {
                return Err(SimError::InvalidConfig(
                    "Fibonacci sampler needs at least one point".into(),
                ));
            }
            let mut sum_a = 0.0;
            let mut sum_b = 0.0;
            for qubit in fibonacci_bloch_states(*points) {
                let (f_a, f_b) = asymmetric_fidelities(eta_bar_a, eta_bar_b, qubit.bloch_m());
                sum_a += f_a;
                sum_b += f_b;
            }
            let n = *points as f64;
            Ok((sum_a / n, sum_b / n, rate))
        }
    }
}

/// Sweep along the best-fidelity boundary where arm B converts fully.
pub fn optimal_cloning_curve(n_points: usize) -> Result<Vec<CloningSweepPoint>> {
    curve(n_points, |eta_a| (eta_a, 1.0))
}

/// Sweep along the line that clones equatorial input states symmetrically.
pub fn phase_covariant_curve(n_points: usize) -> Result<Vec<CloningSweepPoint>> {
    curve(n_points, |eta_a| (eta_a, 1.0 / (1.0 + eta_a)))
}

fn curve(n_points: usize, map: impl Fn(f64) -> (f64, f64)) -> Result<Vec<CloningSweepPoint>> {
    if n_points < 2 {
        return Err(SimError::InvalidConfig(format!(
            "a sweep needs at least two points, got {n_points}"
        )));
    }
    (0..n_points)
        .map(|i| {
            let (eta_bar_a, eta_bar_b) = map(i as f64 / (n_points - 1) as f64);
            let (f_a_avg, f_b_avg, success_rate) =
                bloch_average_fidelity(eta_bar_a, eta_bar_b, &BlochSampler::ClosedForm)?;
            Ok(CloningSweepPoint {
                eta_bar_a,
                eta_bar_b,
                f_a_avg,
                f_b_avg,
                success_rate,
            })
        })
        .collect()
}

/// Averaged cloning figures over a full parameter grid, evaluated
/// concurrently in row-major order.
pub fn cloning_sweep(
    eta_bar_a_values: &[f64],
    eta_bar_b_values: &[f64],
    sampler: &BlochSampler,
) -> Result<Vec<CloningSweepPoint>> {
    if eta_bar_a_values.is_empty() || eta_bar_b_values.is_empty() {
        return Err(SimError::InvalidConfig(
            "sweep axes must not be empty".into(),
        ));
    }
    let grid: Vec<(f64, f64)> = eta_bar_a_values
        .iter()
        .flat_map(|&a| eta_bar_b_values.iter().map(move |&b| (a, b)))
        .collect();
    grid.par_iter()
        .map(|&(eta_bar_a, eta_bar_b)| {
            let (f_a_avg, f_b_avg, success_rate) =
                bloch_average_fidelity(eta_bar_a, eta_bar_b, sampler)?;
            Ok(CloningSweepPoint {
                eta_bar_a,
                eta_bar_b,
                f_a_avg,
                f_b_avg,
                success_rate,
            })
        })
        .collect()
}
