//! Error type shared by every module in the crate.
//!
//! Errors fall into two families. Configuration errors describe inputs that
//! can never work (empty pulses, mismatched grids, inconsistent rates) and
//! map to process exit code 2. Numerical errors describe computations that
//! were attempted but left their domain of validity (divergent series,
//! trajectories that have not decayed by the end of the grid) and map to
//! exit code 3.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Error)]
pub enum SimError {
    /// A pulse envelope with zero (or numerically negligible) norm was
    /// passed where a normalizable wave packet is required.
    #[error("pulse envelope has zero norm")]
    ZeroPulse,

    /// Two envelopes or trajectories that must share a time grid do not.
    #[error("time grids do not match: {0}")]
    GridMismatch(String),

    /// The time grid cannot resolve the fastest scale of the problem.
    #[error("time grid too coarse: {0}")]
    GridTooCoarse(String),

    /// The adiabatic series terms stopped shrinking before the requested
    /// order, so truncating it there would not improve the estimate.
    #[error("adiabatic series divergent: {0}")]
    SeriesDivergent(String),

    /// The excited-state amplitude still carries population at the end of
    /// the grid, so scattering probabilities would be incomplete.
    #[error("trajectory not decayed: {0}")]
    TrajectoryNotDecayed(String),

    /// An operation requiring all four waveguide couplings to be equal was
    /// asked of an emitter that breaks that symmetry.
    #[error("emitter rates asymmetric: {0}")]
    AsymmetricRates(String),

    /// A fidelity was requested against a zero reference state.
    #[error("reference state has zero norm")]
    ZeroReference,

    /// Matrix or state dimensions are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Emitters in a chain are too close for their scattering events to be
    /// treated sequentially.
    #[error("emitter separation violated: {0}")]
    SeparationViolated(String),

    /// A ring interferometer is detuned from the interference condition its
    /// protocol relies on.
    #[error("interference condition violated: {0}")]
    InterferenceConditionViolated(String),

    /// An efficiency parameter lies outside its physical range.
    #[error("invalid efficiency: {0}")]
    InvalidEfficiency(String),

    /// A collision-model step is too large for the first-order splitting.
    #[error("collision step too large: {0}")]
    StepTooLarge(String),

    /// An experiment configuration file is structurally valid JSON but
    /// describes an impossible or unsupported experiment.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Filesystem failure while reading configs or writing results.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON parse or serialize failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SimError {
    /// Stable machine-readable code for this error, used in the CLI's JSON
    /// error output.
    pub fn code(&self) -> &'static str {
        match self {
            SimError::ZeroPulse => "zero_pulse",
            SimError::GridMismatch(_) => "grid_mismatch",
            SimError::GridTooCoarse(_) => "grid_too_coarse",
            SimError::SeriesDivergent(_) => "series_divergent",
            SimError::TrajectoryNotDecayed(_) => "trajectory_not_decayed",
            SimError::AsymmetricRates(_) => "asymmetric_rates",
            SimError::ZeroReference => "zero_reference",
            SimError::DimensionMismatch(_) => "dimension_mismatch",
            SimError::SeparationViolated(_) => "separation_violated",
            SimError::InterferenceConditionViolated(_) => "interference_condition_violated",
            SimError::InvalidEfficiency(_) => "invalid_efficiency",
            SimError::StepTooLarge(_) => "step_too_large",
            SimError::InvalidConfig(_) => "invalid_config",
            SimError::Io(_) => "io",
            SimError::Json(_) => "json",
        }
    }

    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// numerical errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::ZeroPulse
            | SimError::GridMismatch(_)
            | SimError::AsymmetricRates(_)
            | SimError::ZeroReference
            | SimError::DimensionMismatch(_)
            | SimError::SeparationViolated(_)
            | SimError::InterferenceConditionViolated(_)
            | SimError::InvalidEfficiency(_)
            | SimError::InvalidConfig(_)
            | SimError::Io(_)
            | SimError::Json(_) => 2,
            SimError::GridTooCoarse(_)
            | SimError::SeriesDivergent(_)
            | SimError::TrajectoryNotDecayed(_)
            | SimError::StepTooLarge(_) => 3,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SimError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_errors_exit_with_2() {
        assert_eq!(SimError::ZeroPulse.exit_code(), 2);
        assert_eq!(SimError::InvalidConfig("x".into()).exit_code(), 2);
        assert_eq!(SimError::AsymmetricRates("x".into()).exit_code(), 2);
    }

    #[test]
    fn numerical_errors_exit_with_3() {
        assert_eq!(SimError::SeriesDivergent("x".into()).exit_code(), 3);
        assert_eq!(SimError::TrajectoryNotDecayed("x".into()).exit_code(), 3);
        assert_eq!(SimError::StepTooLarge("x".into()).exit_code(), 3);
    }

    #[test]
    fn codes_are_snake_case_and_distinct() {
        let codes = [
            SimError::ZeroPulse.code(),
            SimError::GridMismatch(String::new()).code(),
            SimError::GridTooCoarse(String::new()).code(),
            SimError::SeriesDivergent(String::new()).code(),
            SimError::TrajectoryNotDecayed(String::new()).code(),
            SimError::AsymmetricRates(String::new()).code(),
            SimError::ZeroReference.code(),
            SimError::DimensionMismatch(String::new()).code(),
            SimError::SeparationViolated(String::new()).code(),
            SimError::InterferenceConditionViolated(String::new()).code(),
            SimError::InvalidEfficiency(String::new()).code(),
            SimError::StepTooLarge(String::new()).code(),
            SimError::InvalidConfig(String::new()).code(),
        ];
        for (i, a) in codes.iter().enumerate() {
            assert!(a.chars().all(|c| c.is_ascii_lowercase() || c == '_'));
            for b in codes.iter().skip(i + 1) {
                assert_ne!(a, b);
            }
        }
    }
}
