//! QND on/off detection in the diagonal basis, with dark counts and
//! inefficiency, and the four joint two-detector observables.
//!
//! A detector reads one mode. Its "off" answer means the photon was found in
//! the detector's off-state (`|+⟩` for a diagonal-basis QND detector, `|0⟩`
//! for a Fock-basis on/off detector); "on" means the on-state (`|−⟩` or
//! `|1⟩`). Dark counts flip off-reads to on with probability `μ`; detection
//! inefficiency leaks the on-state onto the off-state with amplitude
//! `√(1−η)`, modelled as the substitution `|−⟩ → √η|−⟩ + √(1−η)|+⟩` applied
//! inside probability evaluation only.
//!
//! Two probability notions coexist and agree for ideal detectors:
//!
//! * **reported** — the probability that the detector pair announces a given
//!   pattern, misreads included. These come from the η-absorbed observables,
//!   which resolve the identity exactly, so they always sum to one.
//! * **registered** — the probability that a pattern occurs *and* is
//!   faithfully announced. These are the closed-form curve quantities; their
//!   sum falls below one exactly by the misread probability.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{LinearOp, PureState};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `|+⟩` as a column vector.
pub const PLUS: [C; 2] = [C::new(SQRT_HALF, 0.0), C::new(SQRT_HALF, 0.0)];
/// `|−⟩` as a column vector.
pub const MINUS: [C; 2] = [C::new(SQRT_HALF, 0.0), C::new(-SQRT_HALF, 0.0)];

/// Efficiency and dark-count probability of one on/off detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    eta: f64,
    mu: f64,
}

impl DetectorModel {
    pub fn new(eta: f64, mu: f64) -> Result<Self> {
        for (name, value) in [("eta", eta), ("mu", mu)] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::ParamOutOfRange {
                    name: if name == "eta" { "eta" } else { "mu" },
                    value,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        Ok(Self { eta, mu })
    }

    pub fn ideal() -> Self {
        Self { eta: 1.0, mu: 0.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// P(reads "on" | photon in the on-state) `= μ(1−η) + η`.
    pub fn on_given_on(&self) -> f64 {
        self.mu * (1.0 - self.eta) + self.eta
    }

    /// P(reads "off" | photon in the on-state) `= (1−μ)(1−η)`.
    pub fn off_given_on(&self) -> f64 {
        (1.0 - self.mu) * (1.0 - self.eta)
    }

    /// P(reads "on" | photon in the off-state) `= μ`.
    pub fn on_given_off(&self) -> f64 {
        self.mu
    }

    /// P(reads "off" | photon in the off-state) `= 1−μ`.
    pub fn off_given_off(&self) -> f64 {
        1.0 - self.mu
    }

    /// Response `P(read | true)` for one detector; rows/columns ordered
    /// (off, on).
    pub fn response(&self) -> [[f64; 2]; 2] {
        [
            [self.off_given_off(), self.off_given_on()],
            [self.on_given_off(), self.on_given_on()],
        ]
    }
}

/// Ideal on/off projectors in the Fock basis: `M_off = |0⟩⟨0|`,
/// `M_on = |1⟩⟨1|` (truncated to the single-photon level).
pub fn ideal_onoff() -> (LinearOp, LinearOp) {
    (
        LinearOp::projector([c(1.0), c(0.0)]),
        LinearOp::projector([c(0.0), c(1.0)]),
    )
}

/// QND on/off operators in the diagonal basis with dark counts folded in:
/// `M_off = (1−μ)|+⟩⟨+|`, `M_on = μ|+⟩⟨+| + |−⟩⟨−|`.
///
/// Inefficiency is not part of these operators; it acts as the state
/// substitution `|−⟩ → √η|−⟩ + √(1−η)|+⟩` before they are evaluated.
pub fn qnd_onoff(model: &DetectorModel) -> (LinearOp, LinearOp) {
    let p_plus = LinearOp::projector(PLUS);
    let p_minus = LinearOp::projector(MINUS);
    let off = p_plus.scale(1.0 - model.mu());
    let on = p_plus.scale(model.mu()).add(&p_minus).expect("same dim");
    (off, on)
}

/// On/off operators with both dark counts and inefficiency absorbed:
/// `M_off = (1−μ)(|+⟩⟨+| + (1−η)|−⟩⟨−|)`,
/// `M_on = μ|+⟩⟨+| + (μ(1−η)+η)|−⟩⟨−|`.
///
/// These are diagonal in the `{|+⟩, |−⟩}` basis and sum to the identity
/// exactly, for every `η` and `μ`.
pub fn absorbed_onoff(model: &DetectorModel) -> (LinearOp, LinearOp) {
    let p_plus = LinearOp::projector(PLUS);
    let p_minus = LinearOp::projector(MINUS);
    let off = p_plus
        .scale(model.off_given_off())
        .add(&p_minus.scale(model.off_given_on()))
        .expect("same dim");
    let on = p_plus
        .scale(model.on_given_off())
        .add(&p_minus.scale(model.on_given_on()))
        .expect("same dim");
    (off, on)
}

/// One of the four joint detector observables.
#[derive(Debug, Clone)]
pub struct JointObservable {
    pub index: usize,
    pub operator: LinearOp,
}

/// The four joint observables (off⊗off, off⊗on, on⊗off, on⊗on) in the
/// η-absorbed representation, which resolves the identity.
pub fn joint_observables(d1: &DetectorModel, d2: &DetectorModel) -> [JointObservable; 4] {
    let (off1, on1) = absorbed_onoff(d1);
    let (off2, on2) = absorbed_onoff(d2);
    [
        JointObservable {
            index: 0,
            operator: off1.tensor(&off2),
        },
        JointObservable {
            index: 1,
            operator: off1.tensor(&on2),
        },
        JointObservable {
            index: 2,
            operator: on1.tensor(&off2),
        },
        JointObservable {
            index: 3,
            operator: on1.tensor(&on2),
        },
    ]
}

/// Unnormalized `⟨s₁ s₂|ψ⟩` branches for the four diagonal-basis patterns
/// `(+,+), (+,−), (−,+), (−,−)` on two named modes, in that order.
///
/// The squared norm of each branch is the ideal Born weight of the pattern.
pub fn diagonal_branches(state: &PureState, mode1: &str, mode2: &str) -> Result<[PureState; 4]> {
    let pp = state.contract(mode1, PLUS)?.contract(mode2, PLUS)?;
    let pm = state.contract(mode1, PLUS)?.contract(mode2, MINUS)?;
    let mp = state.contract(mode1, MINUS)?.contract(mode2, PLUS)?;
    let mm = state.contract(mode1, MINUS)?.contract(mode2, MINUS)?;
    Ok([pp, pm, mp, mm])
}

/// The outcome statistics of a joint two-detector measurement.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    /// Ideal Born weights of the four diagonal patterns.
    pub pattern_weights: [f64; 4],
    /// P(detectors announce pattern l), misreads included; sums to one.
    pub reported: [f64; 4],
    /// P(pattern l occurs and is faithfully announced); the closed-form
    /// curve quantities.
    pub registered: [f64; 4],
    /// Normalized conditional states per pattern; `None` marks a
    /// zero-probability branch.
    pub post_states: [Option<PureState>; 4],
}

/// Measure two modes of `state` with the given detector pair.
pub fn outcome_probabilities(
    state: &PureState,
    modes: (&str, &str),
    detectors: (&DetectorModel, &DetectorModel),
) -> Result<OutcomeDistribution> {
    let branches = diagonal_branches(state, modes.0, modes.1)?;
    let weights: [f64; 4] = [
        branches[0].norm_sqr(),
        branches[1].norm_sqr(),
        branches[2].norm_sqr(),
        branches[3].norm_sqr(),
    ];
    let r1 = detectors.0.response();
    let r2 = detectors.1.response();
    // pattern index l = 2*read1 + read2, truth index j = 2*true1 + true2
    let mut reported = [0.0f64; 4];
    let mut registered = [0.0f64; 4];
    for l in 0..4 {
        let (read1, read2) = (l >> 1, l & 1);
        for (j, w) in weights.iter().enumerate() {
            let (true1, true2) = (j >> 1, j & 1);
            let resp = r1[read1][true1] * r2[read2][true2];
            reported[l] += w * resp;
            if j == l {
                registered[l] = w * resp;
            }
        }
    }
    let post_states = branches.map(|b| b.normalize().ok());
    Ok(OutcomeDistribution {
        pattern_weights: weights,
        reported,
        registered,
        post_states,
    })
}

/// Closed-form registered pattern probabilities for the amplifier's
/// four-mode output state, as functions of the input weights, the channel
/// survivability and the splitter setting:
///
/// ```text
/// P₀ = (1−μ₁)(1−μ₂) (1−t) [α² + β²(1−γ)]
/// P₁ = (1−μ₁) K₂     t    [α² + β²(1−γ)]
/// P₂ = K₁ (1−μ₂)     β² γ (1−t)
/// P₃ = K₁ K₂         β² γ t
/// ```
///
/// with `K = μ(1−η) + η`.
pub fn pattern_probabilities_closed(
    alpha_sqr: f64,
    beta_sqr: f64,
    gamma: f64,
    t: f64,
    d1: &DetectorModel,
    d2: &DetectorModel,
) -> [f64; 4] {
    let a = alpha_sqr + beta_sqr * (1.0 - gamma);
    [
        d1.off_given_off() * d2.off_given_off() * (1.0 - t) * a,
        d1.off_given_off() * d2.on_given_on() * t * a,
        d1.on_given_on() * d2.off_given_off() * beta_sqr * gamma * (1.0 - t),
        d1.on_given_on() * d2.on_given_on() * beta_sqr * gamma * t,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{states_equal_up_to_phase, TOL_ALGEBRA};
    use crate::protocols::{AmplifierConfig, oneway_build};

    #[test]
    fn ideal_onoff_probabilities() {
        let (off, on) = ideal_onoff();
        assert!(off.add(&on).unwrap().max_abs_diff(&LinearOp::identity(1)) < TOL_ALGEBRA);
        let one = PureState::qubit("m", c(0.0), c(1.0)).unwrap();
        let (p, _) = one.project(&on, &["m"]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRA);
        let zero = PureState::qubit("m", c(1.0), c(0.0)).unwrap();
        assert!(matches!(
            zero.project(&on, &["m"]),
            Err(crate::error::Error::ZeroProbabilityBranch)
        ));
        let plus = PureState::qubit("m", c(SQRT_HALF), c(SQRT_HALF)).unwrap();
        let (p, _) = plus.project(&on, &["m"]).unwrap();
        assert!((p - 0.5).abs() < TOL_ALGEBRA);
    }

    #[test]
    fn qnd_onoff_completeness_and_dark_counts() {
        for (eta, mu) in [(1.0, 0.0), (0.85, 0.015), (0.5, 0.5)] {
            let d = DetectorModel::new(eta, mu).unwrap();
            let (off, on) = qnd_onoff(&d);
            assert!(off.add(&on).unwrap().max_abs_diff(&LinearOp::identity(1)) < TOL_ALGEBRA);
        }
        // μ=0, η=1: P(on | |−⟩) = 1
        let ideal = DetectorModel::ideal();
        let (_, on) = qnd_onoff(&ideal);
        let minus = PureState::qubit("m", MINUS[0], MINUS[1]).unwrap();
        let (p, _) = minus.project(&on, &["m"]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRA);
        // μ=0.015: P(on | |+⟩) = 0.015
        let d = DetectorModel::new(1.0, 0.015).unwrap();
        let (_, on) = qnd_onoff(&d);
        let plus = PureState::qubit("m", PLUS[0], PLUS[1]).unwrap();
        let (p, _) = plus.project(&on, &["m"]).unwrap();
        assert!((p - 0.015).abs() < TOL_ALGEBRA);
    }

    #[test]
    fn inefficiency_leak_lands_on_plus() {
        // η=0.85, μ=0: P(on | |−⟩) = 0.85, the leak reads "off"
        let d = DetectorModel::new(0.85, 0.0).unwrap();
        assert!((d.on_given_on() - 0.85).abs() < TOL_ALGEBRA);
        assert!((d.off_given_on() - 0.15).abs() < TOL_ALGEBRA);
        // per-detector responses are normalized
        for (eta, mu) in [(0.85, 0.015), (0.5, 0.5), (0.0, 0.3)] {
            let d = DetectorModel::new(eta, mu).unwrap();
            assert!((d.on_given_on() + d.off_given_on() - 1.0).abs() < TOL_ALGEBRA);
            assert!((d.on_given_off() + d.off_given_off() - 1.0).abs() < TOL_ALGEBRA);
        }
    }

    #[test]
    fn absorbed_observables_resolve_identity() {
        for (eta, mu) in [(1.0, 0.0), (0.85, 0.015), (0.5, 0.5), (0.0, 1.0)] {
            let d1 = DetectorModel::new(eta, mu).unwrap();
            let d2 = DetectorModel::new(mu, eta).unwrap();
            let obs = joint_observables(&d1, &d2);
            let mut sum = obs[0].operator.clone();
            for o in &obs[1..] {
                sum = sum.add(&o.operator).unwrap();
            }
            assert!(sum.max_abs_diff(&LinearOp::identity(2)) < TOL_ALGEBRA);
            for o in &obs {
                assert!(o.operator.min_eigenvalue() > -TOL_ALGEBRA);
            }
        }
    }

    #[test]
    fn joint_ideal_patterns() {
        let ideal = DetectorModel::ideal();
        let obs = joint_observables(&ideal, &ideal);
        let plus_plus = PureState::qubit("a", PLUS[0], PLUS[1])
            .unwrap()
            .tensor(&PureState::qubit("b", PLUS[0], PLUS[1]).unwrap())
            .unwrap();
        let (p, _) = plus_plus.project(&obs[0].operator, &["a", "b"]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRA);
        let plus_minus = PureState::qubit("a", PLUS[0], PLUS[1])
            .unwrap()
            .tensor(&PureState::qubit("b", MINUS[0], MINUS[1]).unwrap())
            .unwrap();
        let (p, _) = plus_minus.project(&obs[1].operator, &["a", "b"]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRA);
    }

    fn amp_state(alpha_sqr: f64, gamma: f64, t: f64) -> PureState {
        let cfg = AmplifierConfig::from_weights(
            alpha_sqr,
            gamma,
            t,
            DetectorModel::ideal(),
            DetectorModel::ideal(),
        )
        .unwrap();
        oneway_build(&cfg).unwrap()
    }

    #[test]
    fn reported_probabilities_sum_to_one_on_parameter_grid() {
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        for &alpha_sqr in &grid {
            for &gamma in &grid {
                for &t in &grid {
                    let state = amp_state(alpha_sqr, gamma, t);
                    for &eta in &grid {
                        for &mu in &grid {
                            let d = DetectorModel::new(eta, mu).unwrap();
                            let dist =
                                outcome_probabilities(&state, ("I", "A"), (&d, &d)).unwrap();
                            let total: f64 = dist.reported.iter().sum();
                            assert!(
                                (total - 1.0).abs() < 1e-11,
                                "sum {total} at α²={alpha_sqr} γ={gamma} t={t} η={eta} μ={mu}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn registered_matches_closed_form_across_grid() {
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let settings = [(1.0, 0.0), (0.85, 0.015), (0.5, 0.015), (0.75, 0.25)];
        for &alpha_sqr in &grid {
            for &gamma in &grid {
                for &t in &grid {
                    let state = amp_state(alpha_sqr, gamma, t);
                    for &(eta, mu) in &settings {
                        let d = DetectorModel::new(eta, mu).unwrap();
                        let dist = outcome_probabilities(&state, ("I", "A"), (&d, &d)).unwrap();
                        let closed = pattern_probabilities_closed(
                            alpha_sqr,
                            1.0 - alpha_sqr,
                            gamma,
                            t,
                            &d,
                            &d,
                        );
                        for (l, (reg, cl)) in
                            dist.registered.iter().zip(closed.iter()).enumerate()
                        {
                            assert!(
                                (reg - cl).abs() < 1e-10,
                                "pattern {l}: {reg} vs {cl}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn registered_example_values() {
        // α=0, β=1, γ=0.5, t=0.5, ideal: (0.25, 0.25, 0.25, 0.25)
        let state = amp_state(0.0, 0.5, 0.5);
        let ideal = DetectorModel::ideal();
        let dist = outcome_probabilities(&state, ("I", "A"), (&ideal, &ideal)).unwrap();
        for l in 0..4 {
            assert!((dist.registered[l] - 0.25).abs() < 1e-10);
            assert!((dist.reported[l] - 0.25).abs() < 1e-10);
        }
        // μ=0.015, η=0.85: P₃ = 0.25 (0.015·0.15 + 0.85)²
        let d = DetectorModel::new(0.85, 0.015).unwrap();
        let dist = outcome_probabilities(&state, ("I", "A"), (&d, &d)).unwrap();
        let k = 0.015 * 0.15 + 0.85;
        assert!((dist.registered[3] - 0.25 * k * k).abs() < 1e-12);
    }

    #[test]
    fn reported_agrees_with_absorbed_operator_expectation() {
        let state = amp_state(0.3, 0.6, 0.4);
        let d1 = DetectorModel::new(0.85, 0.015).unwrap();
        let d2 = DetectorModel::new(0.6, 0.1).unwrap();
        let dist = outcome_probabilities(&state, ("I", "A"), (&d1, &d2)).unwrap();
        for obs in joint_observables(&d1, &d2) {
            let applied = state.apply(&obs.operator, &["I", "A"]).unwrap();
            let expect = state.inner(&applied).unwrap().re;
            assert!((dist.reported[obs.index] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn on_on_registration_monotone_in_eta_and_mu() {
        let state = amp_state(0.5, 0.7, 0.6);
        let mut last = -1.0;
        for eta in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let d = DetectorModel::new(eta, 0.2).unwrap();
            let p = outcome_probabilities(&state, ("I", "A"), (&d, &d))
                .unwrap()
                .registered[3];
            assert!(p >= last);
            last = p;
        }
        let mut last = -1.0;
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let d = DetectorModel::new(0.6, mu).unwrap();
            let p = outcome_probabilities(&state, ("I", "A"), (&d, &d))
                .unwrap()
                .registered[3];
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn post_states_are_the_pattern_projections() {
        let state = amp_state(0.5, 0.5, 0.5);
        let d = DetectorModel::new(0.85, 0.015).unwrap();
        let dist = outcome_probabilities(&state, ("I", "A"), (&d, &d)).unwrap();
        let branches = diagonal_branches(&state, "I", "A").unwrap();
        for (post, branch) in dist.post_states.iter().zip(branches.iter()) {
            match (post, branch.normalize().ok()) {
                (Some(a), Some(b)) => {
                    assert!(states_equal_up_to_phase(a, &b, TOL_ALGEBRA).unwrap())
                }
                (None, None) => {}
                _ => panic!("post-state flag mismatch"),
            }
        }
        // photon-only input at γ=1, t=1: the (+,+) branch has zero weight
        let state = amp_state(0.0, 1.0, 1.0);
        let dist = outcome_probabilities(&state, ("I", "A"), (&d, &d)).unwrap();
        assert!(dist.pattern_weights[0] < 1e-14);
        assert!(dist.post_states[0].is_none());
    }
}
