//! Decay-rate bookkeeping for a three-level emitter coupled to a
//! waveguide.
//!
//! The emitter has two optical transitions, s-e and f-e. Each decays into
//! a forward waveguide mode (w) and a backward or background mode (b),
//! giving four radiative channels, plus an optional fifth channel
//! `gamma_other` whose photon is lost (wrong frequency, never detected).
//! Everything downstream of this module only ever sees these five rates
//! and the ratios derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Spontaneous decay rates of one emitter, in units of the reference rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterRates {
    /// s-e transition into the forward waveguide mode.
    pub gamma_w_es: f64,
    /// s-e transition into the backward or background mode.
    pub gamma_b_es: f64,
    /// f-e transition into the forward waveguide mode.
    pub gamma_w_ef: f64,
    /// f-e transition into the backward or background mode.
    pub gamma_b_ef: f64,
    /// Loss channel at a frequency no detector sees.
    #[serde(default)]
    pub gamma_other: f64,
}

/// Result of an impedance-matching check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingReport {
    /// Whether both matching conditions hold within the tolerance.
    pub matched: bool,
    /// The larger of the two condition residuals.
    pub mismatch: f64,
}

impl EmitterRates {
    /// All four radiative channels at the same rate, plus a loss rate.
    /// This is the configuration used by emitters sitting in a ring.
    pub fn symmetric(gamma_w: f64, gamma_other: f64) -> Self {
        EmitterRates {
            gamma_w_es: gamma_w,
            gamma_b_es: gamma_w,
            gamma_w_ef: gamma_w,
            gamma_b_ef: gamma_w,
            gamma_other,
        }
    }

    /// Symmetric emitter addressed through the even combination of the
    /// two propagation directions: both transitions couple that single
    /// mode at twice the per-direction rate and nothing reaches the odd
    /// combination.
    pub fn directional_union(gamma_w: f64, gamma_other: f64) -> Self {
        EmitterRates {
            gamma_w_es: 2.0 * gamma_w,
            gamma_b_es: 0.0,
            gamma_w_ef: 2.0 * gamma_w,
            gamma_b_ef: 0.0,
            gamma_other,
        }
    }

    /// Lossless impedance-matched emitter: all amplitude enters and
    /// leaves through the forward waveguide modes at equal rates.
    pub fn lossless_matched(gamma_w: f64) -> Self {
        EmitterRates {
            gamma_w_es: gamma_w,
            gamma_b_es: 0.0,
            gamma_w_ef: gamma_w,
            gamma_b_ef: 0.0,
            gamma_other: 0.0,
        }
    }

    /// Symmetric emitter whose loss rate is chosen so that the adiabatic
    /// transfer efficiency parameter equals `eta_bar`.
    pub fn symmetric_with_eta_bar(gamma_w: f64, eta_bar: f64) -> Result<Self> {
        if !(eta_bar > 0.0 && eta_bar <= 1.0) {
            return Err(SimError::InvalidEfficiency(format!(
                "eta_bar must lie in (0, 1], got {eta_bar}"
            )));
        }
        if !(gamma_w > 0.0) || !gamma_w.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "waveguide rate must be positive, got {gamma_w}"
            )));
        }
        let gamma_other = 4.0 * gamma_w * (1.0 - eta_bar) / eta_bar;
        Ok(EmitterRates::symmetric(gamma_w, gamma_other))
    }

    /// Checks all rates are finite, non-negative and not all zero.
    pub fn validate(&self) -> Result<()> {
        let rates = [
            self.gamma_w_es,
            self.gamma_b_es,
            self.gamma_w_ef,
            self.gamma_b_ef,
            self.gamma_other,
        ];
        if rates.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "decay rates must be finite and non-negative: {self:?}"
            )));
        }
        if self.gamma_total() <= 0.0 {
            return Err(SimError::InvalidConfig(
                "total decay rate must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Total decay rate of the excited state.
    pub fn gamma_total(&self) -> f64 {
        self.gamma_w_es + self.gamma_b_es + self.gamma_w_ef + self.gamma_b_ef + self.gamma_other
    }

    /// Combined s-e decay rate.
    pub fn gamma_es(&self) -> f64 {
        self.gamma_w_es + self.gamma_b_es
    }

    /// Combined f-e decay rate.
    pub fn gamma_ef(&self) -> f64 {
        self.gamma_w_ef + self.gamma_b_ef
    }

    /// Probability that a photon arriving in the forward s-e mode ends up
    /// transferring the emitter to the f state, in the flat-pulse limit:
    ///
    /// ```text
    /// eta = 4 Gamma_ef gamma_w_es / Gamma^2
    /// ```
    ///
    /// The loss channel enters only through the total rate Gamma.
    pub fn efficiency(&self) -> f64 {
        let g = self.gamma_total();
        4.0 * self.gamma_ef() * self.gamma_w_es / (g * g)
    }

    /// Adiabatic transfer efficiency parameter of a symmetric emitter:
    ///
    /// ```text
    /// eta_bar = 4 gamma_w / (4 gamma_w + gamma_other)
    /// ```
    ///
    /// Defined only when all four radiative rates are equal; the
    /// square of this number is the efficiency of the same emitter
    /// addressed through the even directional combination.
    pub fn eta_bar(&self) -> Result<f64> {
        self.validate()?;
        let g = self.gamma_w_es;
        let all_equal = [self.gamma_b_es, self.gamma_w_ef, self.gamma_b_ef]
            .iter()
            .all(|x| (x - g).abs() <= 1e-12 * g.max(1e-300));
        if !all_equal || g <= 0.0 {
            return Err(SimError::AsymmetricRates(format!(
                "eta_bar needs all four radiative rates equal and positive: {self:?}"
            )));
        }
        let eta_bar = 4.0 * g / (4.0 * g + self.gamma_other);
        debug_assert!(
            (EmitterRates::directional_union(g, self.gamma_other).efficiency()
                - eta_bar * eta_bar)
                .abs()
                < 1e-12,
            "even-mode efficiency must equal eta_bar^2"
        );
        Ok(eta_bar)
    }

    /// Checks the two impedance-matching conditions: the two transitions
    /// decay equally fast, and the s-e transition has no backward or
    /// background leakage.
    pub fn check_impedance_matching(&self, tol: f64) -> MatchingReport {
        let g = self.gamma_total();
        let balance = (self.gamma_es() - self.gamma_ef()).abs() / g;
        let leakage = if self.gamma_b_es == 0.0 {
            0.0
        } else if self.gamma_w_es == 0.0 {
            f64::INFINITY
        } else {
            self.gamma_b_es / self.gamma_w_es
        };
        let mismatch = balance.max(leakage);
        MatchingReport {
            matched: mismatch <= tol,
            mismatch,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn four_equal_rates_give_half_efficiency() {
        let r = EmitterRates::symmetric(0.7, 0.0);
        assert_relative_eq!(r.efficiency(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn matched_lossless_emitter_has_unit_efficiency() {
        let r = EmitterRates::lossless_matched(1.3);
        assert_relative_eq!(r.efficiency(), 1.0, max_relative = 1e-14);
        let report = r.check_impedance_matching(1e-9);
        assert!(report.matched);
        assert_eq!(report.mismatch, 0.0);
    }

    #[test]
    fn even_mode_emitter_has_unit_efficiency() {
        let r = EmitterRates::directional_union(0.5, 0.0);
        assert_relative_eq!(r.efficiency(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn unbalanced_transitions_report_mismatch() {
        // s-e decays twice as fast as f-e with no other leakage.
        let r = EmitterRates {
            gamma_w_es: 2.0,
            gamma_b_es: 0.0,
            gamma_w_ef: 1.0,
            gamma_b_ef: 0.0,
            gamma_other: 0.0,
        };
        let report = r.check_impedance_matching(1e-9);
        assert!(!report.matched);
        assert_relative_eq!(report.mismatch, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn backward_leakage_breaks_matching() {
        let r = EmitterRates {
            gamma_w_es: 1.0,
            gamma_b_es: 1.0,
            gamma_w_ef: 2.0,
            gamma_b_ef: 0.0,
            gamma_other: 0.0,
        };
        let report = r.check_impedance_matching(1e-9);
        assert!(!report.matched);
        assert_relative_eq!(report.mismatch, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn eta_bar_limits() {
        assert_relative_eq!(
            EmitterRates::symmetric(0.3, 0.0).eta_bar().unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            EmitterRates::symmetric(0.3, 1.2).eta_bar().unwrap(),
            0.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn eta_bar_round_trips_with_construction() {
        for eta in [0.05, std::f64::consts::SQRT_2 - 1.0, 0.5, 0.9, 1.0] {
            let r = EmitterRates::symmetric_with_eta_bar(0.8, eta).unwrap();
            assert_relative_eq!(r.eta_bar().unwrap(), eta, max_relative = 1e-12);
        }
    }

    #[test]
    fn eta_bar_rejects_asymmetric_rates() {
        let r = EmitterRates::lossless_matched(1.0);
        assert!(matches!(r.eta_bar(), Err(SimError::AsymmetricRates(_))));
    }

    #[test]
    fn invalid_eta_bar_rejected() {
        assert!(matches!(
            EmitterRates::symmetric_with_eta_bar(1.0, 0.0),
            Err(SimError::InvalidEfficiency(_))
        ));
        assert!(matches!(
            EmitterRates::symmetric_with_eta_bar(1.0, 1.5),
            Err(SimError::InvalidEfficiency(_))
        ));
    }

    #[test]
    fn validate_rejects_negative_rates() {
        let r = EmitterRates {
            gamma_w_es: -1.0,
            gamma_b_es: 0.0,
            gamma_w_ef: 1.0,
            gamma_b_ef: 0.0,
            gamma_other: 0.0,
        };
        assert!(r.validate().is_err());
    }

    #[test]
    fn gamma_other_defaults_to_zero_in_json() {
        let r: EmitterRates = serde_json::from_str(
            r#"{"gamma_w_es":1.0,"gamma_b_es":0.0,"gamma_w_ef":1.0,"gamma_b_ef":0.0}"#,
        )
        .unwrap();
        assert_eq!(r.gamma_other, 0.0);
    }
}
