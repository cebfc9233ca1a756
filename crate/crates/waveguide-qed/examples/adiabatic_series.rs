//! Compares direct integration of the transfer probability against the
//! derivative-moment series, order by order.
//!
//! The series expresses the transfer probability as the emitter
//! efficiency times a sum over squared pulse derivatives. Each extra
//! order gains two powers of bandwidth over decay rate, until the
//! asymptotic series stops improving.

use waveguide_qed::emitter::EmitterRates;
use waveguide_qed::pulse::{PulseEnvelope, PulseShape};
use waveguide_qed::scatter::{scatter, transfer_probability_adiabatic};

fn main() -> waveguide_qed::Result<()> {
    let emitter = EmitterRates::lossless_matched(0.5);
    let gamma = emitter.gamma_total();

    for tau in [10.0, 30.0] {
        let shape = PulseShape::gaussian(0.0, tau);
        let input = PulseEnvelope::from_shape(&shape, gamma)?.normalized()?;
        let direct = scatter(&input, &emitter)?.p_transfer;
        println!(
            "tau = {tau}, dw/Gamma = {:.5}, direct p = {direct:.12}",
            input.bandwidth()? / gamma
        );
        println!("{:>7}  {:>16}  {:>12}", "order", "series p", "residual");
        for order in 0..=3 {
            let series = transfer_probability_adiabatic(&input, &emitter, order)?;
            println!(
                "{order:>7}  {series:>16.12}  {:>12.3e}",
                (series - direct).abs()
            );
        }
        println!();
    }
    Ok(())
}
