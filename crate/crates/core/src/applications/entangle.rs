//! Remote entanglement of superconducting qubit–photon pairs by a
//! measurement-based Bell swap on the two middle nodes.
//!
//! Each of the four nodes prepares a transmon–photon pair
//! `(|0,e⟩ + |1,g⟩)/√2`; photonic CZ gates entangle the S–I, A–F and I–A
//! photons. Every node then lives in the two-dimensional code subspace
//! spanned by `{|0,e⟩, |1,g⟩}`, so the whole arrangement is a four-node
//! linear cluster of effective qubits. Reading the two middle nodes in the
//! effective diagonal basis `(|0,e⟩ ± |1,g⟩)/√2` swaps the entanglement onto
//! the end nodes; outcome-dependent Pauli feed-forward (an X on both the
//! photonic and atomic degrees of freedom of the final node, and a Z on the
//! first) standardizes every branch to the same Bell state.
//!
//! Transmon levels are modelled as ordinary two-level modes with
//! `|e⟩ ↦ |0⟩` and `|g⟩ ↦ |1⟩`.

use num_complex::Complex64;

use crate::detectors::{self, DetectorModel};
use crate::error::{Error, Result};
use crate::gates;
use crate::hilbert::{LinearOp, ModeRegister, PureState};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Outcome signs of the two node readouts, in pattern order
/// `(++, +−, −+, −−)`.
#[derive(Debug, Clone)]
pub struct SwapBranch {
    /// Ideal Born weight of this outcome pattern.
    pub probability: f64,
    /// Corrected conditional state on `(S, Sq, F, Fq)`.
    pub state: PureState,
    /// Fidelity of the corrected state with the target Bell pair.
    pub fidelity: f64,
    /// Whether the photonic-and-atomic X feed-forward was applied.
    pub x_corrected: bool,
    /// Whether the Z feed-forward was applied.
    pub z_corrected: bool,
}

/// Result of one entanglement-swapping run.
#[derive(Debug, Clone)]
pub struct RemoteEntangleResult {
    pub branches: [SwapBranch; 4],
    /// Probability that both readouts agree (matched operating point).
    pub op1_probability: f64,
    /// Probability that the readouts differ.
    pub op2_probability: f64,
    /// Probability that the matched heralding pattern is faithfully
    /// registered by the detector pair (both report "on").
    pub op1_success: f64,
    /// Probability that a mixed heralding pattern is faithfully registered,
    /// averaged over its two orderings.
    pub op2_success: f64,
    /// Mean of the two registered success probabilities.
    pub average_success: f64,
    /// The Bell pair every corrected branch lands on.
    pub target: PureState,
}

/// The effective-qubit target Bell state
/// `(|0,e⟩_S |1,g⟩_F + |1,g⟩_S |0,e⟩_F)/√2` on `(S, Sq, F, Fq)`.
pub fn target_bell() -> PureState {
    let reg = ModeRegister::new(["S", "Sq", "F", "Fq"]).expect("fixed register");
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = ndarray::Array1::<C>::zeros(16);
    amps[0b0011] = c(r);
    amps[0b1100] = c(r);
    PureState::new(reg, amps).expect("fixed state")
}

fn node_pair(photon: &str, transmon: &str) -> Result<PureState> {
    let reg = ModeRegister::new([photon, transmon])?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = ndarray::Array1::<C>::zeros(4);
    amps[0b00] = c(r);
    amps[0b11] = c(r);
    PureState::new(reg, amps)
}

/// In-code Hadamard on a node: decode the pair, rotate the photon, encode.
fn code_hadamard() -> LinearOp {
    let cnot = gates::cnot();
    let h_i = gates::hadamard().tensor(&LinearOp::identity(1));
    cnot.compose(&h_i)
        .expect("fixed dims")
        .compose(&cnot)
        .expect("fixed dims")
}

/// Perform the measurement-based entanglement swap.
///
/// `d1` reads node I, `d2` reads node A.
pub fn remote_entangle(d1: &DetectorModel, d2: &DetectorModel) -> Result<RemoteEntangleResult> {
    let state = node_pair("S", "Sq")?
        .tensor(&node_pair("I", "Iq")?)?
        .tensor(&node_pair("A", "Aq")?)?
        .tensor(&node_pair("F", "Fq")?)?
        .apply(&gates::cz(), &["S", "I"])?
        .apply(&gates::cz(), &["A", "F"])?
        .apply(&gates::cz(), &["I", "A"])?;

    // decode the middle nodes so the transmon flags code-subspace leakage
    let decoded = state
        .apply(&gates::cnot(), &["I", "Iq"])?
        .apply(&gates::cnot(), &["A", "Aq"])?;
    let ket0 = [c(1.0), c(0.0)];
    let ket1 = [c(0.0), c(1.0)];
    let leak_i = decoded.contract("Iq", ket1)?.norm_sqr();
    let leak_a = decoded.contract("Aq", ket1)?.norm_sqr();
    if leak_i > 1e-14 || leak_a > 1e-14 {
        return Err(Error::NotPositiveSemidefinite(leak_i.max(leak_a)));
    }
    let in_code = decoded.contract("Iq", ket0)?.contract("Aq", ket0)?;

    let raw = detectors::diagonal_branches(&in_code, "I", "A")?;
    let target = target_bell();
    let frame = code_hadamard();
    let z_s = gates::pauli_z();
    let x_pair = gates::pauli_x().tensor(&gates::pauli_x());

    let mut branches = Vec::with_capacity(4);
    for (idx, branch) in raw.iter().enumerate() {
        let probability = branch.norm_sqr();
        let (sign_i, sign_a) = (idx >> 1 == 0, idx & 1 == 0); // true = "+"
        let mut s = branch
            .normalize()?
            .apply(&frame, &["F", "Fq"])?;
        let z_corrected = !sign_a;
        if z_corrected {
            s = s.apply(&z_s, &["S"])?;
        }
        let x_corrected = sign_i;
        if x_corrected {
            s = s.apply(&x_pair, &["F", "Fq"])?;
        }
        let fidelity = s.inner(&target)?.norm_sqr();
        branches.push(SwapBranch {
            probability,
            state: s,
            fidelity,
            x_corrected,
            z_corrected,
        });
    }
    let branches: [SwapBranch; 4] = branches.try_into().expect("four branches");

    let op1_probability = branches[0].probability + branches[3].probability;
    let op2_probability = branches[1].probability + branches[2].probability;
    let op1_success = d1.on_given_on() * d2.on_given_on();
    let op2_success =
        0.5 * (d1.off_given_off() * d2.on_given_on() + d1.on_given_on() * d2.off_given_off());

    Ok(RemoteEntangleResult {
        branches,
        op1_probability,
        op2_probability,
        op1_success,
        op2_success,
        average_success: 0.5 * (op1_success + op2_success),
        target,
    })
}
