//! Ideal broadband photodetection of a channel carrying several
//! amplitude branches.
//!
//! A detector click projects onto "one photon in this channel" without
//! resolving arrival time. Each branch pairs a channel envelope and a
//! polarization with the emitter-pair state left behind; the conditional
//! state after the click is the envelope Gram matrix contracted against
//! those kets. Branches of different polarization never interfere.

use num_complex::Complex64;

use crate::error::Result;
use crate::pulse::PulseEnvelope;
use crate::qstate::{DensityMatrix, TwoQubitState};

/// Photon polarization label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    SigmaPlus,
    SigmaMinus,
}

/// One amplitude branch arriving at a detector: the photon envelope in
/// the detected channel, its polarization, and the (unnormalized)
/// emitter-pair amplitude it drags along.
#[derive(Debug, Clone)]
pub struct HeraldBranch {
    pub envelope: PulseEnvelope,
    pub polarization: Polarization,
    pub ket: [Complex64; 4],
}

/// Emitter-pair state conditioned on a click, and the click probability.
///
/// The unnormalized state is
///
/// ```text
/// rho = sum_ij <e_j, e_i> delta(pol_i, pol_j) |ket_i><ket_j|
/// ```
///
/// and the probability is its trace. When the probability is negligible
/// (below 1e-14) the conditional state is reported as maximally mixed
/// with probability zero.
pub fn conditional_state(branches: &[HeraldBranch]) -> Result<(TwoQubitState, f64)> {
    let n = branches.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut gram = vec![zero; n * n];
    for i in 0..n {
        for j in i..n {
            let overlap = if branches[i].polarization == branches[j].polarization {
                branches[i].envelope.inner_product(&branches[j].envelope)?
            } else {
                zero
            };
            gram[i * n + j] = overlap;
            gram[j * n + i] = overlap.conj();
        }
    }
    let mut rho = DensityMatrix::zeros(4);
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = zero;
            for i in 0..n {
                for j in 0..n {
                    // <e_j, e_i> is stored at gram[j*n + i].
                    acc += gram[j * n + i] * branches[i].ket[a] * branches[j].ket[b].conj();
                }
            }
            rho.set(a, b, acc);
        }
    }
    let p = rho.trace();
    if p < 1e-14 {
        return Ok((TwoQubitState::maximally_mixed(), 0.0));
    }
    rho.scale(1.0 / p);
    Ok((TwoQubitState::from_density(rho)?, p))
}
