//! Heralds Bell states between two emitters in a Sagnac-type ring and
//! shows that emitter loss reduces the rate but not the state quality.
//!
//! The input beam splitter excites only the symmetric combination of
//! the two propagation directions, so with the ring tuned to
//! destructive interference at the input port each emitter sees the
//! clean pulse. A converted photon exits through both ports; each
//! detector heralds one Bell state.

use waveguide_qed::network::{simulate_ring_entanglement, RingSetup};
use waveguide_qed::pulse::{PulseEnvelope, PulseShape};
use waveguide_qed::qstate::BellKind;

fn main() -> waveguide_qed::Result<()> {
    let shape = PulseShape::gaussian(0.0, 150.0);

    println!(
        "{:>12}  {:>10}  {:>12}  {:>10}  {:>10}",
        "gamma_other", "R", "R formula", "F(psi+)", "F(psi-)"
    );
    for gamma_other in [0.0, 1.0] {
        let setup = RingSetup::symmetric(0.25, gamma_other);
        let input = PulseEnvelope::from_shape(&shape, setup.emitter_a.gamma_total())?;
        let result = simulate_ring_entanglement(&setup, &input)?;
        let f_plus = result.outcomes[0]
            .conditional_state
            .bell_fidelity(BellKind::PsiPlus);
        let f_minus = result.outcomes[1]
            .conditional_state
            .bell_fidelity(BellKind::PsiMinus);
        println!(
            "{gamma_other:>12.2}  {:>10.6}  {:>12.6}  {f_plus:>10.6}  {f_minus:>10.6}",
            result.success_rate, result.success_rate_formula
        );
    }
    println!("\nwith gamma_other = 4 gamma_w the rate drops near s/4 while");
    println!("both heralded states remain exact Bell states.");
    Ok(())
}
