//! The fixed gate library used by every protocol.
//!
//! Two-mode gates act on the ordered pair of target modes, first target =
//! most significant bit. The beamsplitter mixes only the single-photon
//! subspace `{|10⟩, |01⟩}`; `|00⟩` and `|11⟩` are left alone, the latter
//! because no protocol in scope ever feeds two photons into one splitter
//! except as a bookkeeping bucket for failed heralds.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::LinearOp;

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if !(min..=max).contains(&value) || !value.is_finite() {
        return Err(Error::ParamOutOfRange {
            name,
            value,
            min,
            max,
        });
    }
    Ok(())
}

/// A gate with its parameters, range-checked at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSpec {
    /// Beamsplitter with the given transmissivity.
    Bs(f64),
    H,
    Cz,
    /// Controlled rotation by an angle in `[0, π/2]`.
    Cr(f64),
    Cnot,
    X,
    Z,
}

impl GateSpec {
    pub fn build(self) -> Result<LinearOp> {
        match self {
            GateSpec::Bs(tau) => beamsplitter(tau),
            GateSpec::H => Ok(hadamard()),
            GateSpec::Cz => Ok(cz()),
            GateSpec::Cr(theta) => {
                check_range("theta", theta, 0.0, std::f64::consts::FRAC_PI_2)?;
                Ok(controlled_rotation(theta))
            }
            GateSpec::Cnot => Ok(cnot()),
            GateSpec::X => Ok(pauli_x()),
            GateSpec::Z => Ok(pauli_z()),
        }
    }
}

/// Two-mode beamsplitter of transmissivity `tau`.
///
/// Column convention on the single-photon subspace:
/// `|10⟩ ↦ √τ|10⟩ + √(1−τ)|01⟩` and `|01⟩ ↦ −√(1−τ)|10⟩ + √τ|01⟩`
/// (minus sign on the reflected upper-right entry).
pub fn beamsplitter(tau: f64) -> Result<LinearOp> {
    check_range("transmissivity", tau, 0.0, 1.0)?;
    let t = tau.sqrt();
    let r = (1.0 - tau).sqrt();
    let z = c(0.0);
    // basis order |00⟩, |01⟩, |10⟩, |11⟩
    Ok(LinearOp::from_rows(
        2,
        &[
            &[c(1.0), z, z, z],
            &[z, c(t), c(r), z],
            &[z, c(-r), c(t), z],
            &[z, z, z, c(1.0)],
        ],
    ))
}

/// Mixing angle of a beamsplitter with transmissivity `gamma = cos²θ`.
///
/// Exposed so callers hand over transmissivities, never angles.
pub fn angle_from_transmissivity(gamma: f64) -> Result<f64> {
    check_range("transmissivity", gamma, 0.0, 1.0)?;
    Ok(gamma.sqrt().acos())
}

pub fn hadamard() -> LinearOp {
    let r = c(std::f64::consts::FRAC_1_SQRT_2);
    LinearOp::from_rows(1, &[&[r, r], &[r, -r]])
}

pub fn pauli_x() -> LinearOp {
    let z = c(0.0);
    LinearOp::from_rows(1, &[&[z, c(1.0)], &[c(1.0), z]])
}

pub fn pauli_z() -> LinearOp {
    let z = c(0.0);
    LinearOp::from_rows(1, &[&[c(1.0), z], &[z, c(-1.0)]])
}

/// Controlled phase: `|11⟩` picks up a minus sign. Symmetric in its modes.
pub fn cz() -> LinearOp {
    let z = c(0.0);
    LinearOp::from_rows(
        2,
        &[
            &[c(1.0), z, z, z],
            &[z, c(1.0), z, z],
            &[z, z, c(1.0), z],
            &[z, z, z, c(-1.0)],
        ],
    )
}

/// Controlled NOT, first target mode is the control.
pub fn cnot() -> LinearOp {
    let z = c(0.0);
    LinearOp::from_rows(
        2,
        &[
            &[c(1.0), z, z, z],
            &[z, c(1.0), z, z],
            &[z, z, z, c(1.0)],
            &[z, z, c(1.0), z],
        ],
    )
}

/// Controlled rotation: identity when the control is `|0⟩`, the plane
/// rotation `R(θ) = [[cosθ, −sinθ], [sinθ, cosθ]]` on the target when the
/// control is `|1⟩`.
pub fn controlled_rotation(theta: f64) -> LinearOp {
    let z = c(0.0);
    let ct = c(theta.cos());
    let st = c(theta.sin());
    LinearOp::from_rows(
        2,
        &[
            &[c(1.0), z, z, z],
            &[z, c(1.0), z, z],
            &[z, z, ct, -st],
            &[z, z, st, ct],
        ],
    )
}
