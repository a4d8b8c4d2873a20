//! Simulator and analysis library for noiseless linear amplification of
//! single microwave photons.
//!
//! The crate models two amplifier designs over registers of two-level
//! bosonic modes: the heralded quantum-scissors amplifier and a
//! measurement-based one-way amplifier built from a four-node cluster of
//! entangled modes read out by on/off detectors. Both run as full
//! state-vector simulations and as closed-form expressions, with the two
//! routes cross-checked everywhere.
//!
//! Layout:
//!
//! * [`hilbert`] — dense states, operators and density matrices over named
//!   two-level modes.
//! * [`gates`] — beamsplitter, Hadamard, CZ, CNOT, controlled rotation and
//!   Paulis.
//! * [`channels`] — the amplitude-damping channel in three equivalent
//!   representations, plus distance → transmissivity conversion.
//! * [`detectors`] — on/off detection with dark counts and inefficiency,
//!   and the four joint two-detector observables.
//! * [`protocols`] — the two amplifier engines.
//! * [`applications`] — idler restoration for sensing, remote entanglement,
//!   and secret-key-rate analysis.
//! * [`verify`] — the acceptance suite behind `cargo test` and the command
//!   line `verify` subcommand.

pub mod applications;
pub mod channels;
pub mod detectors;
pub mod error;
pub mod gates;
pub mod hilbert;
pub mod protocols;
pub mod verify;

pub use error::{Error, Result};
