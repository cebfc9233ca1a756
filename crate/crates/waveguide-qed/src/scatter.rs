//! Scattering of a one-photon wave packet on a single emitter.
//!
//! The incoming envelope f(t) drives the excited-state amplitude through
//!
//! ```text
//! psi_e'(t) = -(Gamma/2) psi_e(t) + i sqrt(gamma_w_es) f(t)
//! ```
//!
//! which this module integrates two ways: directly, with an exact
//! exponential recurrence suited to the stiff decay term, and through the
//! adiabatic derivative series. Everything else (transfer probabilities,
//! per-reservoir emission probabilities, output envelopes, overlaps) is
//! quadrature over the resulting trajectory.

use num_complex::Complex64;

use crate::emitter::EmitterRates;
use crate::error::{Result, SimError};
use crate::pulse::{integrate_norm_sqr, PulseEnvelope, TimeGrid};

/// Excitation amplitudes still allowed at the end of the grid; larger
/// values mean the grid cut off part of the scattering event.
const DECAY_TOL: f64 = 1e-10;

/// Resolution precondition for the direct integrator.
const MAX_DT_RATE: f64 = 0.05;

/// How the excited-state amplitude was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMethod {
    /// Exponential-recurrence integration of the amplitude equation.
    Direct,
    /// Derivative series truncated at the given order.
    Adiabatic { order: usize },
}

/// Excited-state amplitude psi_e(t) on a time grid.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    grid: TimeGrid,
    psi_e: Vec<Complex64>,
    method: IntegrationMethod,
    carrier: f64,
}

impl AmplitudeTrajectory {
    /// The time grid.
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Amplitude samples.
    pub fn psi_e(&self) -> &[Complex64] {
        &self.psi_e
    }

    /// How the trajectory was computed.
    pub fn method(&self) -> IntegrationMethod {
        self.method
    }

    /// Carrier frequency inherited from the driving envelope.
    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// Integral of |psi_e|^2 over the grid.
    pub fn norm_squared(&self) -> f64 {
        integrate_norm_sqr(&self.grid, &self.psi_e)
    }

    /// Largest |psi_e|^2 over the grid.
    pub fn max_abs_squared(&self) -> f64 {
        self.psi_e.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    /// |psi_e|^2 at the last grid point.
    pub fn final_abs_squared(&self) -> f64 {
        self.psi_e.last().map_or(0.0, |z| z.norm_sqr())
    }

    /// The amplitude as a (sample-backed) envelope, scaled by `factor`.
    pub fn as_envelope(&self, factor: Complex64) -> PulseEnvelope {
        let samples = self.psi_e.iter().map(|z| z * factor).collect();
        PulseEnvelope::from_samples(self.grid, samples)
            .expect("trajectory samples always match their own grid")
            .with_carrier(self.carrier)
    }

    /// Errors unless the excitation has decayed below 1e-10 by the end of
    /// the grid, which every time integral over the trajectory requires.
    pub fn require_decayed(&self) -> Result<()> {
        let tail = self.final_abs_squared();
        if tail < DECAY_TOL {
            Ok(())
        } else {
            Err(SimError::TrajectoryNotDecayed(format!(
                "|psi_e|^2 = {tail:.3e} at the end of the grid, needs < {DECAY_TOL:.0e}; \
                 extend the grid past the pulse"
            )))
        }
    }
}

/// Probability that the photon ends up in each reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirProbabilities {
    /// Forward waveguide mode of the s-e transition (transmitted photon).
    pub w_es: f64,
    /// Forward waveguide mode of the f-e transition (converted photon).
    pub w_ef: f64,
    /// Backward or background mode of the s-e transition.
    pub b_es: f64,
    /// Backward or background mode of the f-e transition.
    pub b_ef: f64,
    /// Lost photon at an undetected frequency.
    pub other: f64,
}

impl ReservoirProbabilities {
    /// Sum over all reservoirs; equals the input norm by construction.
    pub fn total(&self) -> f64 {
        self.w_es + self.w_ef + self.b_es + self.b_ef + self.other
    }
}

/// Everything produced by one scattering event.
#[derive(Debug, Clone)]
pub struct ScatterResult {
    /// Excited-state amplitude over time.
    pub trajectory: AmplitudeTrajectory,
    /// Probability that the emitter ends in the f state.
    pub p_transfer: f64,
    /// Where the photon went.
    pub p_res: ReservoirProbabilities,
    /// Transmitted-channel envelope at the emitter position.
    pub out_w_es: PulseEnvelope,
    /// Converted-channel envelope at the emitter position.
    pub out_w_ef: PulseEnvelope,
}

/// Orthogonal split of an envelope against a reference envelope.
#[derive(Debug, Clone)]
pub struct OrthogonalDecomposition {
    /// Coefficient of the reference in the split.
    pub parallel_coeff: Complex64,
    /// Unit-norm remainder orthogonal to the reference (all zero when the
    /// weight is negligible).
    pub perp: PulseEnvelope,
    /// Squared norm of the remainder.
    pub perp_weight: f64,
}

/// Integrates the excited-state amplitude driven by `f_in` with the exact
/// exponential recurrence
///
/// ```text
/// psi[k+1] = E psi[k] + i sqrt(gamma_w_es) (dt/2) (E f[k] + f[k+1])
/// ```
///
/// where E = exp(-Gamma dt/2) handles the stiff decay analytically. The
/// global error is O(dt^2).
pub fn integrate_excited_amplitude(
    f_in: &PulseEnvelope,
    r: &EmitterRates,
) -> Result<AmplitudeTrajectory> {
    r.validate()?;
    let grid = *f_in.grid();
    let gamma = r.gamma_total();
    if f_in.norm_squared() > 0.0 {
        let fastest = gamma.max(f_in.bandwidth()?);
        if grid.dt() * fastest >= MAX_DT_RATE {
            return Err(SimError::GridTooCoarse(format!(
                "dt * max(Gamma, bandwidth) = {:.3e}, needs < {MAX_DT_RATE}",
                grid.dt() * fastest
            )));
        }
    }
    let decay = (-0.5 * gamma * grid.dt()).exp();
    let drive = Complex64::new(0.0, r.gamma_w_es.sqrt());
    let half_dt = 0.5 * grid.dt();
    let f = f_in.samples();
    let mut psi_e = Vec::with_capacity(grid.len());
    psi_e.push(Complex64::new(0.0, 0.0));
    for k in 0..grid.len() - 1 {
        let source = (f[k] * decay + f[k + 1]) * (drive * half_dt);
        psi_e.push(psi_e[k] * decay + source);
    }
    Ok(AmplitudeTrajectory {
        grid,
        psi_e,
        method: IntegrationMethod::Direct,
        carrier: f_in.carrier(),
    })
}

/// Excited-state amplitude from the adiabatic derivative series
///
/// ```text
/// psi_e(t) = (i sqrt(gamma_w_es) / (Gamma/2)) sum_n (-2/Gamma)^n f^(n)(t)
/// ```
///
/// truncated at order `n_max`, or earlier if the series terms stop
/// shrinking (the truncation actually used is reported by the trajectory
/// method tag).
pub fn excited_amplitude_adiabatic(
    f_in: &PulseEnvelope,
    r: &EmitterRates,
    n_max: usize,
) -> Result<AmplitudeTrajectory> {
    r.validate()?;
    let gamma = r.gamma_total();
    let moments = f_in.moments(gamma, n_max)?;
    let order = moments.truncation_order.min(n_max);
    let grid = *f_in.grid();
    let prefactor = Complex64::new(0.0, r.gamma_w_es.sqrt() / (0.5 * gamma));
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for n in 0..=order {
        let d = f_in.derivative(n)?;
        let c = prefactor * (-2.0 / gamma).powi(n as i32);
        for (a, v) in acc.iter_mut().zip(d.samples()) {
            *a += c * v;
        }
    }
    Ok(AmplitudeTrajectory {
        grid,
        psi_e: acc,
        method: IntegrationMethod::Adiabatic { order },
        carrier: f_in.carrier(),
    })
}

/// Probability that the scattering ends with the emitter in the f state:
/// Gamma_ef times the time integral of |psi_e|^2. The loss channel does
/// not count as transfer.
pub fn transfer_probability(traj: &AmplitudeTrajectory, r: &EmitterRates) -> Result<f64> {
    traj.require_decayed()?;
    Ok(r.gamma_ef() * traj.norm_squared())
}

/// Transfer probability from the closed-form product of the emitter
/// efficiency and the adiabatic moment sum s, truncated at order `n_max`.
pub fn transfer_probability_adiabatic(
    f_in: &PulseEnvelope,
    r: &EmitterRates,
    n_max: usize,
) -> Result<f64> {
    r.validate()?;
    let moments = f_in.moments(r.gamma_total(), n_max)?;
    Ok(r.efficiency() * moments.s)
}

/// Distributes the input norm over the five reservoirs.
///
/// The four emission channels are direct quadratures gamma_j Int
/// |psi_e|^2; the transmitted channel w_es is obtained by closure
/// (input norm minus everything else), which avoids catastrophic
/// cancellation when transmission is nearly extinguished.
pub fn reservoir_probabilities(
    traj: &AmplitudeTrajectory,
    f_in: &PulseEnvelope,
    r: &EmitterRates,
) -> Result<ReservoirProbabilities> {
    if !traj.grid().matches(f_in.grid()) {
        return Err(SimError::GridMismatch(
            "trajectory and input envelope live on different grids".into(),
        ));
    }
    traj.require_decayed()?;
    let occupation = traj.norm_squared();
    let w_ef = r.gamma_w_ef * occupation;
    let b_es = r.gamma_b_es * occupation;
    let b_ef = r.gamma_b_ef * occupation;
    let other = r.gamma_other * occupation;
    let mut w_es = f_in.norm_squared() - w_ef - b_es - b_ef - other;
    if (-1e-10..0.0).contains(&w_es) {
        w_es = 0.0;
    }
    Ok(ReservoirProbabilities {
        w_es,
        w_ef,
        b_es,
        b_ef,
        other,
    })
}

/// Envelope of the transmitted channel, f(t) + i sqrt(gamma_w_es)
/// psi_e(t), carried a distance `l` down the waveguide (phase velocity 1
/// in the units of this crate).
pub fn output_pulse_w_es(
    f_in: &PulseEnvelope,
    traj: &AmplitudeTrajectory,
    r: &EmitterRates,
    l: f64,
) -> Result<PulseEnvelope> {
    let emitted = traj.as_envelope(Complex64::new(0.0, r.gamma_w_es.sqrt()));
    let at_emitter = f_in.add(&emitted)?;
    Ok(at_emitter.with_carrier(f_in.carrier()).propagate(l, 1.0))
}

/// Envelope of the converted channel, i sqrt(gamma_w_ef) psi_e(t),
/// carried a distance `l` down the waveguide.
pub fn output_pulse_w_ef(
    traj: &AmplitudeTrajectory,
    r: &EmitterRates,
    l: f64,
) -> Result<PulseEnvelope> {
    let emitted = traj.as_envelope(Complex64::new(0.0, r.gamma_w_ef.sqrt()));
    Ok(emitted.propagate(l, 1.0))
}

/// Runs one full scattering event: trajectory, transfer probability,
/// reservoir probabilities, and both output envelopes at the emitter
/// position.
pub fn scatter(f_in: &PulseEnvelope, r: &EmitterRates) -> Result<ScatterResult> {
    let trajectory = integrate_excited_amplitude(f_in, r)?;
    let p_transfer = transfer_probability(&trajectory, r)?;
    let p_res = reservoir_probabilities(&trajectory, f_in, r)?;
    let out_w_es = output_pulse_w_es(f_in, &trajectory, r, 0.0)?;
    let out_w_ef = output_pulse_w_ef(&trajectory, r, 0.0)?;
    Ok(ScatterResult {
        trajectory,
        p_transfer,
        p_res,
        out_w_es,
        out_w_ef,
    })
}

/// Overlap of the transmitted envelope with the incoming one, both taken
/// at the emitter position. For a unit-norm input this equals
/// 1 - (gamma_w_es/(Gamma/2)) (s + i r) up to series truncation.
pub fn overlap_with_input(f_in: &PulseEnvelope, result: &ScatterResult) -> Result<Complex64> {
    f_in.inner_product(&result.out_w_es)
}

/// Splits `out` into a component along `reference` and a unit-norm
/// orthogonal remainder.
pub fn orthogonal_decomposition(
    out: &PulseEnvelope,
    reference: &PulseEnvelope,
) -> Result<OrthogonalDecomposition> {
    let ref_norm2 = reference.norm_squared();
    if ref_norm2 < 1e-300 {
        return Err(SimError::ZeroReference);
    }
    let parallel_coeff = reference.inner_product(out)? / ref_norm2;
    let resid = out.sub(&reference.scaled(parallel_coeff))?;
    let perp_weight = resid.norm_squared();
    let perp = if perp_weight < 1e-14 {
        PulseEnvelope::zeros(*out.grid())
    } else {
        resid.scaled(Complex64::new(1.0 / perp_weight.sqrt(), 0.0))
    };
    Ok(OrthogonalDecomposition {
        parallel_coeff,
        perp,
        perp_weight,
    })
}
