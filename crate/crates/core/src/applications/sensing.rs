//! Idler restoration for low-power entanglement-enhanced sensing.
//!
//! A weak two-mode squeezed vacuum source emits signal–idler pairs; the
//! idler sits in a lossy memory while the signal interrogates a target. The
//! amplifier is run on the stored idler to undo the storage loss. States are
//! truncated to the single-photon level and kept *unnormalized*: the
//! truncated amplitudes are carried verbatim and the sub-unity squared norm
//! is the truncation weight. Only conditional post-measurement states get
//! renormalized.

use num_complex::Complex64;

use crate::channels;
use crate::detectors::{self, DetectorModel};
use crate::error::{Error, Result};
use crate::gates;
use crate::hilbert::{DensityOperator, ModeRegister, PureState};
use crate::protocols::{gain_closed_form, AmplifierConfig, OperatingPoint};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Two-mode squeezed vacuum source strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmsvParams {
    mean_photon_number: f64,
}

impl TmsvParams {
    pub fn new(mean_photon_number: f64) -> Result<Self> {
        if mean_photon_number < 0.0 || !mean_photon_number.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "mean_photon_number",
                value: mean_photon_number,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(Self { mean_photon_number })
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.mean_photon_number
    }

    /// `λ² = N_S / (1 + N_S)`.
    pub fn lambda_sqr(&self) -> f64 {
        self.mean_photon_number / (1.0 + self.mean_photon_number)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_sqr().sqrt()
    }

    /// Vacuum amplitude of the truncated source, `α = √(1−λ²)`.
    pub fn alpha(&self) -> f64 {
        (1.0 - self.lambda_sqr()).sqrt()
    }

    /// Pair amplitude of the truncated source, `β = λ√(1−λ²)`.
    pub fn beta(&self) -> f64 {
        self.lambda() * self.alpha()
    }

    /// Weight of the discarded multi-photon tail, `λ⁴`.
    pub fn truncated_fraction(&self) -> f64 {
        self.lambda_sqr() * self.lambda_sqr()
    }

    /// The single-photon truncation holds for a weak source; above a mean
    /// photon number of 0.1 the discarded tail approaches the percent level.
    pub fn truncation_warning(&self) -> bool {
        self.mean_photon_number > 0.1
    }
}

/// A truncated source state with its bookkeeping.
#[derive(Debug, Clone)]
pub struct TmsvState {
    /// Unnormalized state `α|000⟩ + β√γ|110⟩ + β√(1−γ)|101⟩` on `(S, I, E)`.
    pub state: PureState,
    /// Squared norm kept by the truncation, `1 − λ⁴`.
    pub truncation_weight: f64,
    /// Weight of the discarded tail, `λ⁴`.
    pub truncated_fraction: f64,
    /// Set when the truncation is questionable (mean photon number > 0.1).
    pub warning: bool,
}

/// Truncated two-mode squeezed vacuum with the idler run through a loss
/// channel of survivability `gamma`, on register `(S, I, E)`.
pub fn tmsv_truncated(params: &TmsvParams, gamma: f64) -> Result<TmsvState> {
    let (alpha, beta) = (params.alpha(), params.beta());
    let reg_si = ModeRegister::new(["S", "I"])?;
    let mut amps = ndarray::Array1::<C>::zeros(4);
    amps[0b00] = c(alpha);
    amps[0b11] = c(beta);
    let ideal = PureState::new(reg_si, amps)?;
    let state = channels::adc_beamsplitter(gamma, &ideal, "I", "E")?;
    Ok(TmsvState {
        state,
        truncation_weight: 1.0 - params.truncated_fraction(),
        truncated_fraction: params.truncated_fraction(),
        warning: params.truncation_warning(),
    })
}

/// One operating point of a sensing restoration run.
#[derive(Debug, Clone)]
pub struct SensingBranch {
    /// Ideal heralding weight within the truncation.
    pub probability: f64,
    /// Heralding weight including detector registration.
    pub registered_probability: f64,
    /// Normalized conditional state on `(S, E, F)`; opposite outcomes are
    /// X-corrected on `F`.
    pub state: PureState,
    /// Signal–output density operator on `(S, F)` after tracing `E`.
    pub output_density: DensityOperator,
}

/// Result of a sensing restoration run.
#[derive(Debug, Clone)]
pub struct SensingRun {
    pub pattern_weights: [f64; 4],
    pub op1: Option<SensingBranch>,
    pub op2: Option<SensingBranch>,
    pub truncation_weight: f64,
}

impl SensingRun {
    pub fn op(&self, op: OperatingPoint) -> Result<&SensingBranch> {
        let branch = match op {
            OperatingPoint::Op1 => &self.op1,
            OperatingPoint::Op2 => &self.op2,
        };
        branch.as_ref().ok_or(Error::ZeroProbabilityBranch)
    }
}

fn sensing_branch(
    raw: &PureState,
    probability: f64,
    registered_probability: f64,
    x_correct: bool,
) -> Result<Option<SensingBranch>> {
    if probability < 1e-15 {
        return Ok(None);
    }
    let mut state = raw.normalize()?;
    if x_correct {
        state = state.apply(&gates::pauli_x(), &["F"])?;
    }
    let output_density = state.density().partial_trace(&["S", "F"])?;
    Ok(Some(SensingBranch {
        probability,
        registered_probability,
        state,
        output_density,
    }))
}

/// Run the amplifier on a stored idler: entangle the idler with the
/// auxiliary resource, measure both in the diagonal basis, correct.
pub fn sensing_restore(
    params: &TmsvParams,
    gamma: f64,
    t: f64,
    d1: &DetectorModel,
    d2: &DetectorModel,
) -> Result<SensingRun> {
    let source = tmsv_truncated(params, gamma)?;
    let reg_af = ModeRegister::new(["A", "F"])?;
    let mut amps = ndarray::Array1::<C>::zeros(4);
    amps[0b00] = c((1.0 - t).sqrt());
    amps[0b11] = c(t.sqrt());
    let resource = PureState::new(reg_af, amps)?;

    let h = gates::hadamard();
    let state = source
        .state
        .tensor(&resource)?
        .apply(&gates::cz(), &["I", "A"])?
        .apply(&h, &["I"])?
        .apply(&h, &["A"])?;

    let branches = detectors::diagonal_branches(&state, "I", "A")?;
    let w: Vec<f64> = branches.iter().map(|b| b.norm_sqr()).collect();

    let op1_raw = branches[0].add(&branches[3])?;
    let op1_reg = w[0] * d1.off_given_off() * d2.off_given_off()
        + w[3] * d1.on_given_on() * d2.on_given_on();
    let op2_raw = branches[1].add(&branches[2].scale(c(-1.0)))?;
    let op2_reg = w[1] * d1.off_given_off() * d2.on_given_on()
        + w[2] * d1.on_given_on() * d2.off_given_off();

    Ok(SensingRun {
        pattern_weights: [w[0], w[1], w[2], w[3]],
        op1: sensing_branch(&op1_raw, w[0] + w[3], op1_reg, false)?,
        op2: sensing_branch(&op2_raw, w[1] + w[2], op2_reg, true)?,
        truncation_weight: source.truncation_weight,
    })
}

/// Splitter setting at which the amplifier's gain exactly undoes the
/// storage loss, i.e. `G(t) · γ = 1`, found by bisection to 1e-9.
///
/// For a pure single-photon input the root sits at the interval boundary
/// (`t = 1` for matched outcomes, `t = 0` for opposite ones); the bisection
/// handles boundary roots explicitly.
pub fn full_restoration_t(alpha_sqr: f64, gamma: f64, op: OperatingPoint) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha_sqr) {
        return Err(Error::ParamOutOfRange {
            name: "alpha_sqr",
            value: alpha_sqr,
            min: 0.0,
            max: 1.0,
        });
    }
    if gamma <= 0.0 || gamma > 1.0 {
        return Err(Error::ParamOutOfRange {
            name: "gamma",
            value: gamma,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    let ideal = DetectorModel::ideal();
    let residual = |t: f64| -> f64 {
        let cfg = AmplifierConfig::from_weights(alpha_sqr, gamma, t, ideal, ideal)
            .expect("validated parameters");
        match gain_closed_form(&cfg, op) {
            Ok(g) => g * gamma - 1.0,
            Err(_) => f64::INFINITY,
        }
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (f_lo, f_hi) = (residual(lo), residual(hi));
    if f_lo.abs() < 1e-12 {
        return Ok(lo);
    }
    if f_hi.abs() < 1e-12 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InfiniteGain(f_lo.min(f_hi)));
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let f_mid = residual(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Probe pairs needed so the expected number of heralded pairs reaches
/// `target` at the given mean success probability.
pub fn required_probe_pairs(target: f64, mean_success: f64) -> Result<f64> {
    if !(mean_success > 0.0 && mean_success <= 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "mean_success",
            value: mean_success,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    Ok((target / mean_success).ceil())
}
