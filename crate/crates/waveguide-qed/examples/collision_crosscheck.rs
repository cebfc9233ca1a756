//! Cross-checks the amplitude integrator against the time-bin collision
//! model on the same scattering problem.
//!
//! The collision model discretizes every reservoir into a train of
//! two-level bins visited once per step. It is an independent route to
//! the same probabilities, converging at first order in the step.

use waveguide_qed::collision::evolve_collision;
use waveguide_qed::emitter::EmitterRates;
use waveguide_qed::pulse::{PulseEnvelope, PulseShape};
use waveguide_qed::scatter::scatter;

fn main() -> waveguide_qed::Result<()> {
    let emitter = EmitterRates::symmetric(0.2, 0.1);
    let gamma = emitter.gamma_total();
    let shape = PulseShape::gaussian(0.0, 40.0);
    let input = PulseEnvelope::from_shape(&shape, gamma)?.normalized()?;

    let reference = scatter(&input, &emitter)?;
    println!("amplitude route p_transfer = {:.9}", reference.p_transfer);

    println!(
        "{:>10}  {:>14}  {:>12}  {:>12}",
        "dt*Gamma", "binned p", "difference", "norm defect"
    );
    for dt_gamma in [8e-3, 4e-3, 2e-3, 1e-3] {
        let result = evolve_collision(&input, &emitter, dt_gamma / gamma)?;
        println!(
            "{dt_gamma:>10.0e}  {:>14.9}  {:>12.3e}  {:>12.3e}",
            result.p_transfer(),
            (result.p_transfer() - reference.p_transfer).abs(),
            result.max_norm_deviation()
        );
    }
    Ok(())
}
