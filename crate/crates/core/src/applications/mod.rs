//! The three applications built on the protocol engines: idler restoration
//! for entanglement-enhanced sensing, remote entanglement of qubit–photon
//! pairs, and secret-key-rate analysis over lossy links.

pub mod entangle;
pub mod sensing;
pub mod skr;

pub use entangle::{remote_entangle, RemoteEntangleResult};
pub use sensing::{
    full_restoration_t, required_probe_pairs, sensing_restore, tmsv_truncated, SensingRun,
    TmsvParams, TmsvState,
};
pub use skr::{
    direct_transmission_success, op2_direct_crossover_per_link_km, plob_bound, skr_protocol,
    SkrRun, SkrScenario,
};
