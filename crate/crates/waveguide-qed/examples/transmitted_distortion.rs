//! Splits the transmitted pulse into a part parallel to the input and a
//! perpendicular remainder, and checks the overlap against its
//! narrowband closed form.
//!
//! The transmitted field stays close to the input shape for a slow
//! pulse; both the overlap deficit and the perpendicular weight follow
//! the even moment sum s of the pulse.

use waveguide_qed::emitter::EmitterRates;
use waveguide_qed::pulse::{PulseEnvelope, PulseShape};
use waveguide_qed::scatter::{orthogonal_decomposition, scatter};

fn main() -> waveguide_qed::Result<()> {
    let emitter = EmitterRates::lossless_matched(0.5);
    let gamma = emitter.gamma_total();

    println!(
        "{:>8}  {:>14}  {:>14}  {:>12}",
        "tau", "overlap", "closed form", "perp weight"
    );
    for tau in [20.0, 50.0, 200.0] {
        let shape = PulseShape::gaussian(0.0, tau);
        let input = PulseEnvelope::from_shape(&shape, gamma)?.normalized()?;
        let result = scatter(&input, &emitter)?;

        let overlap = input.inner_product(&result.out_w_es)?;
        let moments = input.moments(gamma, 4)?;
        let closed = 1.0 - (emitter.gamma_w_es / (gamma / 2.0)) * moments.s;

        let split = orthogonal_decomposition(&result.out_w_es, &input)?;
        println!(
            "{tau:>8.1}  {:>14.9}  {closed:>14.9}  {:>12.3e}",
            overlap.re, split.perp_weight
        );
    }
    Ok(())
}
