//! Secret-key generation over a lossy link with the amplifier as a midpoint
//! entanglement swapper.
//!
//! A weak two-mode squeezed source sits at one end, the auxiliary resource
//! at the other; the stored signal modes `S` and `F` stay local while `I`
//! and `A` meet at the midpoint after each crossing half the span. With a
//! total end-to-end power transmissivity `χ` and a midpoint split, each half
//! link damps with survivability `γ = γ̃ = √χ`.
//!
//! The key-rate map is deliberately minimal: one secret bit per faithfully
//! heralded entangled pair, applied uniformly to every protocol including
//! the direct-transmission reference, so curves are comparable. The
//! repeater-less bound is also provided for reference. Alternative rate
//! maps (e.g. scaling by a fidelity-dependent key fraction) can replace
//! [`SkrRun::skr_op1`]/[`SkrRun::skr_op2`] without touching the engine.

use num_complex::Complex64;

use crate::channels::{self, LinkBudget};
use crate::detectors::{self, DetectorModel};
use crate::error::{Error, Result};
use crate::gates;
use crate::hilbert::{ModeRegister, PureState};

use super::sensing::TmsvParams;

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// One secret-key scenario over a symmetric lossy span.
#[derive(Debug, Clone)]
pub struct SkrScenario {
    /// End-to-end link; the midpoint split assigns half the distance to
    /// each amplifier arm.
    pub link: LinkBudget,
    /// Auxiliary splitter weight.
    pub t: f64,
    /// Source strength.
    pub tmsv: TmsvParams,
    /// Detector reading node I.
    pub detector1: DetectorModel,
    /// Detector reading node A.
    pub detector2: DetectorModel,
    /// Repeater segments for the reference bound (1 = direct link).
    pub repeater_links: u8,
}

impl SkrScenario {
    pub fn new(
        link: LinkBudget,
        t: f64,
        tmsv: TmsvParams,
        detector1: DetectorModel,
        detector2: DetectorModel,
        repeater_links: u8,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParamOutOfRange {
                name: "t",
                value: t,
                min: 0.0,
                max: 1.0,
            });
        }
        if !(1..=2).contains(&repeater_links) {
            return Err(Error::ParamOutOfRange {
                name: "repeater_links",
                value: repeater_links as f64,
                min: 1.0,
                max: 2.0,
            });
        }
        Ok(Self {
            link,
            t,
            tmsv,
            detector1,
            detector2,
            repeater_links,
        })
    }

    /// End-to-end power transmissivity.
    pub fn chi(&self) -> f64 {
        self.link.power_transmissivity()
    }

    /// Per-half-link survivability `γ = γ̃ = √χ`.
    pub fn half_link_survivability(&self) -> f64 {
        self.chi().sqrt()
    }
}

/// Result of one secret-key protocol run.
#[derive(Debug, Clone)]
pub struct SkrRun {
    pub chi: f64,
    pub gamma: f64,
    /// Ideal Born weights of the four patterns within the truncation.
    pub pattern_weights: [f64; 4],
    /// Simulated matched-branch weight.
    pub n_plus: f64,
    /// Simulated opposite-branch weight.
    pub n_minus: f64,
    /// Matched conditional state on `(S, E, F, E2)`, no feed-forward.
    pub op1_state: Option<PureState>,
    /// Opposite conditional state, X-corrected on `F`.
    pub op2_state: Option<PureState>,
    /// Both-environments-vacuum weight of the matched branch: the
    /// entanglement-bearing success probability.
    pub p_s: f64,
    /// Both-environments-vacuum weight of the opposite branch.
    pub p_d: f64,
    /// `p_s` with per-pattern detector registration folded in.
    pub p_s_registered: f64,
    /// `p_d` with per-pattern detector registration folded in.
    pub p_d_registered: f64,
    /// Registered matched success with its vacuum offset removed: the rate
    /// of pairs that actually carry the photon, `β²γγ̃t` scaled by the
    /// on–on registration. This is the curve that decays like `χ/2`.
    pub p_s_bell_registered: f64,
    /// Vacuum offset of the matched branch (no photon anywhere).
    pub vacuum_offset_op1: f64,
    /// Signal-less offset of the opposite branch.
    pub vacuum_offset_op2: f64,
    /// Key rate of the matched operating point, bits/use.
    pub skr_op1: f64,
    /// Key rate of the opposite operating point, bits/use.
    pub skr_op2: f64,
    /// Scissors comparison: the one-click success scaled by its
    /// single-click registration with the same detector pair.
    pub skr_qs: f64,
    /// Repeater-less reference bound for the scenario's segment count.
    pub plob: f64,
    /// Direct-transmission success under the same uniform rate map.
    pub direct: f64,
}

/// Closed-form matched-branch weight
/// `N₊ = α²(1−tγ̃) + β²[tγ̃(2γ−1) + 1 − γ]`.
pub fn n_plus_closed(alpha_sqr: f64, beta_sqr: f64, gamma: f64, gamma2: f64, t: f64) -> f64 {
    alpha_sqr * (1.0 - t * gamma2)
        + beta_sqr * (t * gamma2 * (2.0 * gamma - 1.0) + 1.0 - gamma)
}

/// Closed-form opposite-branch weight
/// `N₋ = α²tγ̃ + β²[γ + γ̃t(1−2γ)]`.
pub fn n_minus_closed(alpha_sqr: f64, beta_sqr: f64, gamma: f64, gamma2: f64, t: f64) -> f64 {
    alpha_sqr * t * gamma2 + beta_sqr * (gamma + gamma2 * t * (1.0 - 2.0 * gamma))
}

/// Entanglement-bearing matched success, `P_S = α²(1−t) + β²γγ̃t`.
pub fn p_s_closed(alpha_sqr: f64, beta_sqr: f64, gamma: f64, gamma2: f64, t: f64) -> f64 {
    alpha_sqr * (1.0 - t) + beta_sqr * gamma * gamma2 * t
}

/// Entanglement-bearing opposite success, `P_D = α²tγ̃ + β²γ(1−t)`.
pub fn p_d_closed(alpha_sqr: f64, beta_sqr: f64, gamma: f64, gamma2: f64, t: f64) -> f64 {
    alpha_sqr * t * gamma2 + beta_sqr * gamma * (1.0 - t)
}

/// Build the six-mode pre-measurement state on `(S, I, E, A, F, E2)`:
/// truncated source with a lossy idler arm (`gamma`), lossy auxiliary arm
/// (`gamma2`), entangling CZ and the basis-change Hadamards.
pub fn build_skr_state(
    tmsv: &TmsvParams,
    gamma: f64,
    gamma2: f64,
    t: f64,
) -> Result<PureState> {
    let source = super::sensing::tmsv_truncated(tmsv, gamma)?;
    let reg_af = ModeRegister::new(["A", "F"])?;
    let mut amps = ndarray::Array1::<C>::zeros(4);
    amps[0b00] = c((1.0 - t).sqrt());
    amps[0b11] = c(t.sqrt());
    let resource = PureState::new(reg_af, amps)?;
    let resource = channels::adc_beamsplitter(gamma2, &resource, "A", "E2")?;

    let h = gates::hadamard();
    source
        .state
        .tensor(&resource)?
        .apply(&gates::cz(), &["I", "A"])?
        .apply(&h, &["I"])?
        .apply(&h, &["A"])
}

fn env_vacuum_weight(branch: &PureState) -> Result<f64> {
    let ket0 = [c(1.0), c(0.0)];
    Ok(branch.contract("E", ket0)?.contract("E2", ket0)?.norm_sqr())
}

/// Run the midpoint-swap key protocol.
pub fn skr_protocol(scenario: &SkrScenario) -> Result<SkrRun> {
    let chi = scenario.chi();
    let gamma = scenario.half_link_survivability();
    let t = scenario.t;
    let d1 = &scenario.detector1;
    let d2 = &scenario.detector2;

    let state = build_skr_state(&scenario.tmsv, gamma, gamma, t)?;
    let branches = detectors::diagonal_branches(&state, "I", "A")?;
    let w: Vec<f64> = branches.iter().map(|b| b.norm_sqr()).collect();

    let op1_raw = branches[0].add(&branches[3])?;
    let op2_raw = branches[1].add(&branches[2].scale(c(-1.0)))?;
    let n_plus = w[0] + w[3];
    let n_minus = w[1] + w[2];

    // entanglement-bearing (both environments vacuum) parts, per pattern so
    // each carries its own registration factor
    let s_matched_off = env_vacuum_weight(&branches[0])?;
    let s_matched_on = env_vacuum_weight(&branches[3])?;
    let d_mixed_off_on = env_vacuum_weight(&branches[1])?;
    let d_mixed_on_off = env_vacuum_weight(&branches[2])?;
    let p_s = s_matched_off + s_matched_on;
    let p_d = d_mixed_off_on + d_mixed_on_off;
    let p_s_registered = s_matched_off * d1.off_given_off() * d2.off_given_off()
        + s_matched_on * d1.on_given_on() * d2.on_given_on();
    let p_d_registered = d_mixed_off_on * d1.off_given_off() * d2.on_given_on()
        + d_mixed_on_off * d1.on_given_on() * d2.off_given_off();
    let p_s_bell_registered = s_matched_on * d1.on_given_on() * d2.on_given_on();

    let op1_state = if n_plus < 1e-15 {
        None
    } else {
        Some(op1_raw.normalize()?)
    };
    let op2_state = if n_minus < 1e-15 {
        None
    } else {
        Some(op2_raw.normalize()?.apply(&gates::pauli_x(), &["F"])?)
    };

    // scissors reference: one and only one photon at the midpoint splitter,
    // heralded by a single faithful click
    let qs_registration =
        0.5 * (d1.on_given_on() * d2.off_given_off() + d1.off_given_off() * d2.on_given_on());

    Ok(SkrRun {
        chi,
        gamma,
        pattern_weights: [w[0], w[1], w[2], w[3]],
        n_plus,
        n_minus,
        op1_state,
        op2_state,
        p_s,
        p_d,
        p_s_registered,
        p_d_registered,
        p_s_bell_registered,
        vacuum_offset_op1: s_matched_off,
        vacuum_offset_op2: d_mixed_off_on,
        skr_op1: p_s_registered,
        skr_op2: p_d_registered,
        skr_qs: p_d * qs_registration,
        plob: plob_bound(chi, scenario.repeater_links)?,
        direct: direct_transmission_success(chi),
    })
}

/// Repeater-less key-rate bound `−log₂(1 − χ^(1/K))` in bits/use.
///
/// `K = 1` is the direct point-to-point reference; a lossless channel has
/// unbounded capacity, returned as infinity.
pub fn plob_bound(chi: f64, repeater_links: u8) -> Result<f64> {
    if !(0.0..=1.0).contains(&chi) || chi == 0.0 {
        return Err(Error::InfiniteAttenuation);
    }
    if !(1..=2).contains(&repeater_links) {
        return Err(Error::ParamOutOfRange {
            name: "repeater_links",
            value: repeater_links as f64,
            min: 1.0,
            max: 2.0,
        });
    }
    let root = chi.powf(1.0 / repeater_links as f64);
    if root >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(1.0 - root).log2())
}

/// Success probability of sending the photon straight through: the same
/// one-bit-per-success rate map applied to direct transmission.
pub fn direct_transmission_success(chi: f64) -> f64 {
    chi
}

/// Per-half-link distance beyond which the opposite operating point of the
/// midpoint swap outrates direct transmission over the combined span, with
/// ideal detectors and the balanced splitter.
///
/// Found by bisection on the total span; the returned value is half the
/// crossover span, i.e. the distance from either party to the midpoint
/// station.
pub fn op2_direct_crossover_per_link_km(
    attenuation_db_per_km: f64,
    tmsv: &TmsvParams,
) -> Result<f64> {
    let ideal = DetectorModel::ideal();
    let margin = |total_km: f64| -> Result<f64> {
        let link = LinkBudget::new(attenuation_db_per_km, total_km)?;
        let scenario = SkrScenario::new(link, 0.5, *tmsv, ideal, ideal, 1)?;
        let run = skr_protocol(&scenario)?;
        Ok(run.skr_op2 - run.direct)
    };
    let l_att = LinkBudget::new(attenuation_db_per_km, 0.0)?.attenuation_length_km();
    let (mut lo, mut hi) = (1e-6, 40.0 * l_att);
    if margin(lo)? > 0.0 || margin(hi)? < 0.0 {
        return Err(Error::InfiniteAttenuation);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if margin(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    Ok(0.25 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::TOL_CHAIN;

    fn scenario(distance_km: f64, t: f64, ns: f64) -> SkrScenario {
        SkrScenario::new(
            LinkBudget::new(0.0063, distance_km).unwrap(),
            t,
            TmsvParams::new(ns).unwrap(),
            DetectorModel::ideal(),
            DetectorModel::ideal(),
            1,
        )
        .unwrap()
    }

    /// Independent nine-term expansion of the pre-measurement state, written
    /// straight into the computational basis.
    fn oracle_state(lambda: f64, gamma: f64, gamma2: f64, t: f64) -> PureState {
        let alpha = (1.0 - lambda * lambda).sqrt();
        let beta = lambda * alpha;
        let reg = ModeRegister::new(["S", "I", "E", "A", "F", "E2"]).unwrap();
        let mut amps = ndarray::Array1::<C>::zeros(64);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (coefficient, s, i in ±, e, a in ±, f, e2)
        let terms: [(f64, usize, i8, usize, i8, usize, usize); 9] = [
            (alpha * (1.0 - t).sqrt(), 0, 1, 0, 1, 0, 0),
            (alpha * (t * gamma2).sqrt(), 0, 1, 0, -1, 1, 0),
            (alpha * (t * (1.0 - gamma2)).sqrt(), 0, 1, 0, 1, 1, 1),
            (beta * (gamma * (1.0 - t)).sqrt(), 1, -1, 0, 1, 0, 0),
            (-beta * (gamma * gamma2 * t).sqrt(), 1, -1, 0, -1, 1, 0),
            (beta * (gamma * (1.0 - gamma2) * t).sqrt(), 1, -1, 0, 1, 1, 1),
            (beta * ((1.0 - gamma) * (1.0 - t)).sqrt(), 1, 1, 1, 1, 0, 0),
            (beta * (t * (1.0 - gamma) * gamma2).sqrt(), 1, 1, 1, -1, 1, 0),
            (
                beta * (t * (1.0 - gamma) * (1.0 - gamma2)).sqrt(),
                1,
                1,
                1,
                1,
                1,
                1,
            ),
        ];
        for (coeff, s, isign, e, asign, f, e2) in terms {
            for ibit in 0..2usize {
                for abit in 0..2usize {
                    let mut amp = coeff * r * r;
                    if isign < 0 && ibit == 1 {
                        amp = -amp;
                    }
                    if asign < 0 && abit == 1 {
                        amp = -amp;
                    }
                    let idx = (s << 5) | (ibit << 4) | (e << 3) | (abit << 2) | (f << 1) | e2;
                    amps[idx] += c(amp);
                }
            }
        }
        PureState::new(reg, amps).unwrap()
    }

    #[test]
    fn state_matches_term_by_term_oracle() {
        for (lambda, gamma, gamma2, t) in
            [(0.1, 0.8, 0.6, 0.7), (0.3, 0.5, 0.5, 0.5), (0.2, 1.0, 0.4, 0.3)]
        {
            let tmsv = TmsvParams::new(lambda * lambda / (1.0 - lambda * lambda)).unwrap();
            assert!((tmsv.lambda() - lambda).abs() < 1e-12);
            let built = build_skr_state(&tmsv, gamma, gamma2, t).unwrap();
            let oracle = oracle_state(lambda, gamma, gamma2, t);
            assert!(built.max_abs_diff(&oracle).unwrap() < 1e-12);
        }
    }

    #[test]
    fn branch_norms_match_closed_forms() {
        for (lambda, gamma, gamma2, t) in
            [(0.1, 0.8, 0.6, 0.7), (0.25, 0.4, 0.9, 0.2), (0.15, 0.7, 0.7, 0.5)]
        {
            let tmsv = TmsvParams::new(lambda * lambda / (1.0 - lambda * lambda)).unwrap();
            let state = build_skr_state(&tmsv, gamma, gamma2, t).unwrap();
            let branches = detectors::diagonal_branches(&state, "I", "A").unwrap();
            let n_plus = branches[0].norm_sqr() + branches[3].norm_sqr();
            let n_minus = branches[1].norm_sqr() + branches[2].norm_sqr();
            let (a2, b2) = (tmsv.alpha().powi(2), tmsv.beta().powi(2));
            assert!((n_plus - n_plus_closed(a2, b2, gamma, gamma2, t)).abs() < 1e-10);
            assert!((n_minus - n_minus_closed(a2, b2, gamma, gamma2, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn entangled_success_matches_closed_forms() {
        let sc = scenario(300.0, 0.6, 0.02);
        let run = skr_protocol(&sc).unwrap();
        let (a2, b2) = (sc.tmsv.alpha().powi(2), sc.tmsv.beta().powi(2));
        let g = sc.half_link_survivability();
        assert!((run.p_s - p_s_closed(a2, b2, g, g, sc.t)).abs() < TOL_CHAIN);
        assert!((run.p_d - p_d_closed(a2, b2, g, g, sc.t)).abs() < TOL_CHAIN);
        // ideal detectors: registration changes nothing
        assert!((run.p_s - run.p_s_registered).abs() < 1e-14);
        assert!((run.skr_qs - run.p_d).abs() < 1e-14);
    }

    #[test]
    fn zero_distance_balanced_setting() {
        // χ=1, t=1/2, weak source: both success probabilities near 1/2
        let sc = scenario(0.0, 0.5, 1e-4);
        let run = skr_protocol(&sc).unwrap();
        assert!((run.chi - 1.0).abs() < 1e-12);
        assert!((run.p_s - 0.5).abs() < 1e-3);
        assert!((run.p_d - 0.5).abs() < 1e-3);
    }

    #[test]
    fn quarter_transmissivity_opposite_point() {
        // χ=0.25, t=1/2, α²≈1: P_D ≈ √χ/2 = 0.25
        let link = LinkBudget::new(0.0063, 0.0).unwrap();
        let l_att = link.attenuation_length_km();
        let distance = l_att * 4.0f64.ln();
        let sc = scenario(distance, 0.5, 1e-4);
        let run = skr_protocol(&sc).unwrap();
        assert!((run.chi - 0.25).abs() < 1e-9);
        assert!((run.p_d - 0.25).abs() < 1e-3);
    }

    #[test]
    fn asymptotic_scalings_at_weak_squeezing() {
        let sc = scenario(500.0, 0.5, 1e-6 / (1.0 - 1e-6)); // λ² = 1e-6
        let run = skr_protocol(&sc).unwrap();
        let chi = run.chi;
        // opposite point: P_D / (√χ/2) → 1
        assert!((run.p_d / (chi.sqrt() / 2.0) - 1.0).abs() < 0.01);
        // matched point: entangled part over β²χ/2 → 1
        let beta_sqr = sc.tmsv.beta().powi(2);
        let entangled = run.p_s - run.vacuum_offset_op1;
        assert!((entangled / (beta_sqr * chi / 2.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn plob_reference_values() {
        assert!((plob_bound(0.5, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(plob_bound(1.0, 1).unwrap().is_infinite());
        let k2 = plob_bound(0.5, 2).unwrap();
        assert!((k2 - -(1.0 - 0.5f64.sqrt()).log2()).abs() < 1e-12);
        assert!((k2 - 1.77).abs() < 0.01);
        assert!(plob_bound(0.0, 1).is_err());
        assert!(plob_bound(0.5, 3).is_err());
    }

    #[test]
    fn crossover_sits_near_the_attenuation_half_length() {
        // ideal detectors, weak source: the opposite point overtakes the
        // direct line at χ ≈ 1/4, i.e. L_att·ln2 per half link
        let tmsv = TmsvParams::new(1e-6).unwrap();
        let crossover = op2_direct_crossover_per_link_km(0.0063, &tmsv).unwrap();
        let l_att = LinkBudget::new(0.0063, 0.0).unwrap().attenuation_length_km();
        assert!((crossover - l_att * 2.0f64.ln()).abs() < 1.0, "{crossover}");
    }

    #[test]
    fn rates_are_monotone_nonincreasing_in_distance() {
        let settings = [
            DetectorModel::ideal(),
            DetectorModel::new(0.85, 0.015).unwrap(),
            DetectorModel::new(0.5, 0.5).unwrap(),
        ];
        for d in settings {
            let mut last = [f64::INFINITY; 6];
            for i in 0..40 {
                let distance = 50.0 * i as f64;
                let sc = SkrScenario::new(
                    LinkBudget::new(0.0063, distance).unwrap(),
                    0.5,
                    TmsvParams::new(0.01).unwrap(),
                    d,
                    d,
                    1,
                )
                .unwrap();
                let run = skr_protocol(&sc).unwrap();
                let now = [
                    run.skr_op1,
                    run.skr_op2,
                    run.p_s_bell_registered,
                    run.skr_qs,
                    run.direct,
                    run.plob,
                ];
                for (a, b) in now.iter().zip(last.iter()) {
                    assert!(a <= b, "rate increased with distance");
                }
                last = now;
            }
        }
    }

    #[test]
    fn bell_rate_drops_the_vacuum_offset() {
        let sc = scenario(200.0, 0.5, 0.01);
        let run = skr_protocol(&sc).unwrap();
        let beta_sqr = sc.tmsv.beta().powi(2);
        let g = sc.half_link_survivability();
        assert!((run.p_s_bell_registered - beta_sqr * g * g * sc.t).abs() < 1e-12);
        assert!(run.p_s_bell_registered < run.p_s_registered);
    }

    #[test]
    fn detector_imperfections_scale_the_rates() {
        let d = DetectorModel::new(0.85, 0.015).unwrap();
        let sc = SkrScenario::new(
            LinkBudget::new(0.6, 10.0).unwrap(),
            0.5,
            TmsvParams::new(0.01).unwrap(),
            d,
            d,
            1,
        )
        .unwrap();
        let run = skr_protocol(&sc).unwrap();
        let mixed = d.off_given_off() * d.on_given_on();
        assert!((run.p_d_registered - run.p_d * mixed).abs() < 1e-12);
        assert!(run.p_s_registered < run.p_s);
        // scissors with half-probability dark counts loses half its rate
        let dqs = DetectorModel::new(0.85, 0.5).unwrap();
        let sc_qs = SkrScenario::new(
            LinkBudget::new(0.6, 10.0).unwrap(),
            0.5,
            TmsvParams::new(0.01).unwrap(),
            dqs,
            dqs,
            1,
        )
        .unwrap();
        let run_qs = skr_protocol(&sc_qs).unwrap();
        let reg = dqs.on_given_on() * dqs.off_given_off();
        assert!((run_qs.skr_qs - run_qs.p_d * reg).abs() < 1e-12);
    }
}
