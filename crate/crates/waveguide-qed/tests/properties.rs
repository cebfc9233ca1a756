//! Property tests over randomized pulses, rates and qubit states.

use num_complex::Complex64;
use proptest::prelude::*;

use waveguide_qed::cloning::{asymmetric_fidelities, simulate_asymmetric_cloning, AsymmetricSetup};
use waveguide_qed::emitter::EmitterRates;
use waveguide_qed::pulse::{PulseEnvelope, PulseShape};
use waveguide_qed::qstate::{DensityMatrix, PhotonQubit, Subsystem, TwoQubitState};
use waveguide_qed::scatter::scatter;

mod common;

fn shape_strategy() -> impl Strategy<Value = PulseShape> {
    prop_oneof![
        (-5.0..5.0f64, 5.0..60.0f64).prop_map(|(c, tau)| PulseShape::gaussian(c, tau)),
        (-5.0..5.0f64, 4.0..40.0f64).prop_map(|(c, w)| PulseShape::sech(c, w)),
        (-5.0..5.0f64, 10.0..50.0f64, 3.0..10.0f64)
            .prop_map(|(c, w, e)| PulseShape::smooth_square(c, w, e)),
    ]
}

fn rates_strategy() -> impl Strategy<Value = EmitterRates> {
    (
        0.05..0.6f64,
        0.0..0.6f64,
        0.05..0.6f64,
        0.0..0.6f64,
        0.0..0.4f64,
    )
        .prop_map(|(w_es, b_es, w_ef, b_ef, other)| EmitterRates {
            gamma_w_es: w_es,
            gamma_b_es: b_es,
            gamma_w_ef: w_ef,
            gamma_b_ef: b_ef,
            gamma_other: other,
        })
}

fn qubit_strategy() -> impl Strategy<Value = PhotonQubit> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(theta, phi)| PhotonQubit::from_bloch(theta, phi))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    // Wherever the photon ends up, the five reservoir probabilities
    // account for exactly the input norm.
    #[test]
    fn reservoirs_account_for_the_input_norm(
        shape in shape_strategy(),
        rates in rates_strategy(),
        amp in 0.3..1.5f64,
    ) {
        let env = PulseEnvelope::from_shape(&shape, rates.gamma_total())
            .unwrap()
            .scaled(Complex64::new(amp, 0.0));
        let result = scatter(&env, &rates).unwrap();
        let defect = (result.p_res.total() - env.norm_squared()).abs();
        prop_assert!(defect < 1e-9, "defect = {defect:.3e}");
    }

    // The transfer probability is a probability, and it never beats the
    // rate-ratio efficiency bound.
    #[test]
    fn transfer_probability_respects_the_efficiency_bound(
        shape in shape_strategy(),
        rates in rates_strategy(),
    ) {
        let env = PulseEnvelope::from_shape(&shape, rates.gamma_total())
            .unwrap()
            .normalized()
            .unwrap();
        let p = scatter(&env, &rates).unwrap().p_transfer;
        let eta = rates.efficiency();
        prop_assert!(p >= 0.0);
        prop_assert!(p <= eta + 1e-9, "p = {p}, eta = {eta}");
    }

    // Every bundled shape is real, so the odd moment sum vanishes
    // identically, not just approximately.
    #[test]
    fn real_envelopes_have_zero_odd_moment_sum(
        shape in shape_strategy(),
        gamma in 0.2..2.0f64,
    ) {
        let env = PulseEnvelope::from_shape(&shape, gamma)
            .unwrap()
            .normalized()
            .unwrap();
        if let Ok(moments) = env.moments(gamma, 3) {
            prop_assert_eq!(moments.r, 0.0);
        }
    }

    // A loss rate chosen for a target transfer amplitude must round-trip.
    #[test]
    fn transfer_amplitude_round_trips_through_rates(
        gamma_w in 0.05..0.5f64,
        eta_bar in 0.05..1.0f64,
    ) {
        let rates = EmitterRates::symmetric_with_eta_bar(gamma_w, eta_bar).unwrap();
        let recovered = rates.eta_bar().unwrap();
        prop_assert!((recovered - eta_bar).abs() < 1e-12);
    }

    // Fidelity against a reference ket cannot see a global phase.
    #[test]
    fn fidelity_ignores_global_phase(
        qubit in qubit_strategy(),
        chi in 0.0..std::f64::consts::TAU,
    ) {
        let ket = [qubit.alpha(), qubit.beta()];
        let rho = DensityMatrix::from_pure(&ket);
        let phase = Complex64::from_polar(1.0, chi);
        let rotated = [ket[0] * phase, ket[1] * phase];
        let direct = rho.fidelity(&ket).unwrap();
        let phased = rho.fidelity(&rotated).unwrap();
        prop_assert!((direct - phased).abs() < 1e-12);
        prop_assert!((direct - 1.0).abs() < 1e-12);
    }

    // Tracing out either qubit preserves the total probability.
    #[test]
    fn partial_trace_preserves_probability(
        qubit in qubit_strategy(),
        other in qubit_strategy(),
    ) {
        let ket = [
            qubit.alpha() * other.alpha(),
            qubit.alpha() * other.beta(),
            qubit.beta() * other.alpha(),
            qubit.beta() * other.beta(),
        ];
        let state = TwoQubitState::from_ket(&ket);
        let rho_a = state.partial_trace(Subsystem::A);
        let rho_b = state.partial_trace(Subsystem::B);
        prop_assert!((rho_a.trace() - 1.0).abs() < 1e-12);
        prop_assert!((rho_b.trace() - 1.0).abs() < 1e-12);
    }

    // On the lossless-B curve the closed-form fidelities are universal:
    // the input state drops out.
    #[test]
    fn lossless_b_curve_is_input_independent(
        eta_a in 0.0..1.0f64,
        m1 in 0.0..0.25f64,
        m2 in 0.0..0.25f64,
    ) {
        let (fa_1, fb_1) = asymmetric_fidelities(eta_a, 1.0, m1);
        let (fa_2, fb_2) = asymmetric_fidelities(eta_a, 1.0, m2);
        prop_assert!((fa_1 - fa_2).abs() < 1e-12);
        prop_assert!((fb_1 - fb_2).abs() < 1e-12);
    }

    // The ideal cloning network is trace-preserving: herald branches
    // plus losses always sum to one.
    #[test]
    fn ideal_cloning_accounts_for_all_probability(
        qubit in qubit_strategy(),
        eta_a in 0.0..1.0f64,
        eta_b in 0.0..1.0f64,
    ) {
        let setup = AsymmetricSetup::ideal(0.25);
        let result = simulate_asymmetric_cloning(&setup, &qubit, eta_a, eta_b).unwrap();
        prop_assert!((result.total_probability() - 1.0).abs() < 1e-12);
        for branch in &result.branches {
            prop_assert!(branch.fidelity_a >= -1e-12 && branch.fidelity_a <= 1.0 + 1e-12);
            prop_assert!(branch.fidelity_b >= -1e-12 && branch.fidelity_b <= 1.0 + 1e-12);
        }
    }

    // The Bloch weight used by the averaged fidelity formulas matches
    // its definition from the amplitudes.
    #[test]
    fn bloch_weight_matches_amplitudes(qubit in qubit_strategy()) {
        let m = (qubit.alpha() * qubit.beta()).norm_sqr();
        prop_assert!((qubit.bloch_m() - m).abs() < 1e-12);
    }
}
