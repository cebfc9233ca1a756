//! Trades fidelity between two clones by tuning the per-arm transfer
//! amplitudes of a beam-split cloning network.
//!
//! The photon is split over two arms, one emitter per arm, and a
//! detector behind the recombining beam splitter heralds success. The
//! transfer amplitude of each arm sets how much of the input state its
//! emitter absorbs, steering fidelity from clone A to clone B.

use waveguide_qed::cloning::{
    asymmetric_fidelities, asymmetric_success_rate, optimal_cloning_curve,
    simulate_asymmetric_cloning, AsymmetricSetup,
};
use waveguide_qed::qstate::PhotonQubit;

fn main() -> waveguide_qed::Result<()> {
    let setup = AsymmetricSetup::ideal(0.25);
    let qubit = PhotonQubit::from_bloch(1.1, 0.7);
    let m = qubit.bloch_m();

    println!("golden points (narrowband route):");
    for (eta_a, eta_b) in [
        (0.5, 1.0),
        (2.0f64.sqrt() - 1.0, std::f64::consts::FRAC_1_SQRT_2),
    ] {
        let result = simulate_asymmetric_cloning(&setup, &qubit, eta_a, eta_b)?;
        let branch = &result.branches[0];
        let herald_rate: f64 = result.branches.iter().map(|b| b.probability).sum();
        let (f_a, f_b) = asymmetric_fidelities(eta_a, eta_b, m);
        println!(
            "  eta_bar = ({eta_a:.6}, {eta_b:.6}): F_A = {:.9} (closed {f_a:.9}), \
             F_B = {:.9} (closed {f_b:.9}), R = {:.9} (closed {:.9})",
            branch.fidelity_a,
            branch.fidelity_b,
            herald_rate,
            asymmetric_success_rate(eta_a, eta_b)
        );
    }

    println!("\noptimal trade-off curve (input-independent fidelities):");
    println!("{:>10}  {:>10}  {:>10}  {:>10}", "eta_bar_a", "F_A", "F_B", "R");
    for point in optimal_cloning_curve(6)? {
        println!(
            "{:>10.3}  {:>10.6}  {:>10.6}  {:>10.6}",
            point.eta_bar_a, point.f_a_avg, point.f_b_avg, point.success_rate
        );
    }
    Ok(())
}
