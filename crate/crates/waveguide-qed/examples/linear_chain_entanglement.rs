//! Heralds entanglement between two emitters on a one-way waveguide and
//! follows the success rate into the slow-pulse limit.
//!
//! The photon first scatters off emitter A, and the transmitted field
//! drives emitter B. A converted-polarization click behind B cannot
//! tell which emitter converted the photon, so it projects the pair
//! onto a superposition of |10> and |01>. For slow pulses the herald
//! rate approaches 5/16 and the state approaches (2|10> + |01>)/sqrt(5).

use num_complex::Complex64;
use waveguide_qed::emitter::EmitterRates;
use waveguide_qed::network::{simulate_linear_entanglement, LinearSetup};
use waveguide_qed::pulse::{PulseEnvelope, PulseShape};

fn main() -> waveguide_qed::Result<()> {
    // Emitters far apart compared to every pulse below, so the two
    // scattering events stay sequential.
    let setup = LinearSetup {
        emitter_a: EmitterRates::symmetric(0.25, 0.0),
        emitter_b: EmitterRates::symmetric(0.25, 0.0),
        l_ab: 1000.0,
        l_bd: 100.0,
    };
    let gamma = setup.emitter_a.gamma_total();

    let root5 = 5.0f64.sqrt();
    let target = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0 / root5, 0.0),
        Complex64::new(2.0 / root5, 0.0),
        Complex64::new(0.0, 0.0),
    ];

    println!(
        "{:>8}  {:>12}  {:>12}  {:>12}",
        "tau", "R", "R formula", "fidelity"
    );
    for tau in [30.0, 100.0, 350.0] {
        let shape = PulseShape::gaussian(0.0, tau);
        let input = PulseEnvelope::from_shape(&shape, gamma)?;
        let result = simulate_linear_entanglement(&setup, &input)?;
        let fidelity = result.outcome.conditional_state.fidelity(&target)?;
        println!(
            "{tau:>8.1}  {:>12.8}  {:>12.8}  {fidelity:>12.8}",
            result.success_rate, result.success_rate_formula
        );
    }
    println!("slow-pulse limit: R -> 5/16 = {:.8}", 5.0 / 16.0);
    Ok(())
}
