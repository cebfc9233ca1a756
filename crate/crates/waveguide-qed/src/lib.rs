//! Single-photon wave packets scattering on three-level emitters in
//! waveguides, and the heralded entanglement and cloning networks built
//! from that interaction.
//!
//! The physical unit is a Λ-type emitter: one excited state decaying to
//! two ground states through orthogonally polarized transitions, each
//! coupled to directional waveguide modes and possibly to loss. A
//! single-photon pulse drives one transition; emission on the other
//! heralds a state transfer. Everything else in the crate composes this
//! element: chains and rings of emitters produce Bell states, and
//! beam-split arrangements clone polarization qubits with tunable
//! fidelity trade-offs.
//!
//! # Where to start
//!
//! Each major capability has a runnable example:
//!
//! - `scatter_single_emitter`: reservoir bookkeeping for one scattering
//!   event and the approach to complete transfer.
//! - `adiabatic_series`: the derivative-moment series against direct
//!   integration, order by order.
//! - `transmitted_distortion`: overlap and shape distortion of the
//!   unconverted pulse.
//! - `collision_crosscheck`: the time-bin oracle against the amplitude
//!   integrator.
//! - `linear_chain_entanglement`: herald rate 5/16 on a one-way chain.
//! - `ring_entanglement`: Bell states from both ports of a Sagnac-type
//!   ring, with and without loss.
//! - `symmetric_cloning`: universal 5/6-fidelity clones on the ring.
//! - `asymmetric_cloning`: fidelity trade-off between two clones.
//! - `cloning_tradeoff_sweep`: the bundled 21 x 21 sweep dataset.
//! - `validate_config`: configuration checking without running.
//!
//! # Modules
//!
//! [`pulse`] holds envelopes on time grids and their derivative moment
//! sums; [`emitter`] the decay-rate sets; [`scatter`] the single-pass
//! amplitude integration and output wave packets; [`collision`] an
//! independent time-bin model used as a test oracle; [`qstate`] density
//! matrices, qubits and Bell states; [`detection`] projection onto
//! herald clicks; [`network`] the linear chain and the ring; [`cloning`]
//! symmetric and asymmetric cloning plus averaged sweeps; [`config`] and
//! [`runner`] the JSON batch layer behind the `wqed` binary.

pub mod cloning;
pub mod collision;
pub mod config;
pub mod detection;
pub mod emitter;
pub mod error;
pub mod network;
pub mod pulse;
pub mod qstate;
pub mod runner;
pub mod scatter;

pub use error::{Result, SimError};
