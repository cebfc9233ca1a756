//! Scatters a Gaussian single-photon pulse off an impedance-matched
//! three-level emitter and prints where the photon ends up.
//!
//! With the two waveguide couplings equal and no loss, a pulse much
//! longer than the emitter lifetime converts almost completely into the
//! other polarization, transferring the emitter from |s> to |f>.

use waveguide_qed::emitter::EmitterRates;
use waveguide_qed::pulse::{PulseEnvelope, PulseShape};
use waveguide_qed::scatter::scatter;

fn main() -> waveguide_qed::Result<()> {
    let emitter = EmitterRates::lossless_matched(0.5);
    let gamma = emitter.gamma_total();

    println!("{:>10}  {:>12}  {:>12}  {:>12}", "tau", "dw/Gamma", "p_transfer", "defect");
    for tau in [5.0, 20.0, 100.0, 400.0] {
        let shape = PulseShape::gaussian(0.0, tau);
        let input = PulseEnvelope::from_shape(&shape, gamma)?.normalized()?;
        let bandwidth = input.bandwidth()?;
        let result = scatter(&input, &emitter)?;
        println!(
            "{:>10.1}  {:>12.5}  {:>12.9}  {:>12.3e}",
            tau,
            bandwidth / gamma,
            result.p_transfer,
            (result.p_res.total() - 1.0).abs()
        );
    }

    let shape = PulseShape::gaussian(0.0, 100.0);
    let input = PulseEnvelope::from_shape(&shape, gamma)?.normalized()?;
    let result = scatter(&input, &emitter)?;
    println!("\nreservoir probabilities at tau = 100:");
    println!("  transmitted (w_es): {:.6e}", result.p_res.w_es);
    println!("  converted   (w_ef): {:.6e}", result.p_res.w_ef);
    println!("  backward    (b_es): {:.6e}", result.p_res.b_es);
    println!("  backward    (b_ef): {:.6e}", result.p_res.b_ef);
    println!("  lost        (other): {:.6e}", result.p_res.other);
    Ok(())
}
