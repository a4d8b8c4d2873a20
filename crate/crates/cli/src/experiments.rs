//! The experiment implementations behind each subcommand.
//!
//! Sweep points are independent pure function evaluations; rows are emitted
//! in sweep order, so identical invocations produce identical bytes.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use oneway_nla::applications::{
    remote_entangle, sensing_restore, skr_protocol, tmsv_truncated, SkrScenario, TmsvParams,
};
use oneway_nla::applications::sensing::full_restoration_t;
use oneway_nla::channels::LinkBudget;
use oneway_nla::detectors::DetectorModel;
use oneway_nla::protocols::{
    gain_closed_form, qs_nla_run, success_probability_closed_form, AmplifierConfig,
    OperatingPoint,
};

use crate::sweep::{CsvWriter, Sweep};

type ExpResult = Result<(), Box<dyn std::error::Error>>;

/// Flags shared by every experiment.
#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Vacuum weight |alpha|^2 of the input (exactly one of --alpha2/--beta2)
    #[arg(long = "alpha2")]
    pub alpha2: Option<f64>,
    /// Photon weight |beta|^2 of the input
    #[arg(long = "beta2")]
    pub beta2: Option<f64>,
    /// Detector efficiency for both detectors unless overridden
    #[arg(long, default_value = "1.0")]
    pub eta: f64,
    /// Dark-count probability for both detectors unless overridden
    #[arg(long, default_value = "0.0")]
    pub mu: f64,
    /// Efficiency override for the second detector
    #[arg(long = "eta2")]
    pub eta2: Option<f64>,
    /// Dark-count override for the second detector
    #[arg(long = "mu2")]
    pub mu2: Option<f64>,
    /// Output path; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reserved: all computations are deterministic
    #[arg(long)]
    pub seed: Option<u64>,
}

fn detectors(common: &CommonArgs) -> Result<(DetectorModel, DetectorModel), String> {
    let d1 = DetectorModel::new(common.eta, common.mu).map_err(|e| e.to_string())?;
    let d2 = DetectorModel::new(
        common.eta2.unwrap_or(common.eta),
        common.mu2.unwrap_or(common.mu),
    )
    .map_err(|e| e.to_string())?;
    Ok((d1, d2))
}

fn input_weight(common: &CommonArgs) -> Result<f64, String> {
    match (common.alpha2, common.beta2) {
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(1.0 - b),
        (Some(_), Some(_)) => Err("give exactly one of --alpha2 and --beta2".into()),
        (None, None) => Err("one of --alpha2 or --beta2 is required".into()),
    }
}

fn common_header(w: &mut CsvWriter, common: &CommonArgs) -> std::io::Result<()> {
    w.param("eta", common.eta)?;
    w.param("mu", common.mu)?;
    if let Some(eta2) = common.eta2 {
        w.param("eta2", eta2)?;
    }
    if let Some(mu2) = common.mu2 {
        w.param("mu2", mu2)?;
    }
    if let Some(seed) = common.seed {
        w.param("seed (reserved, unused)", seed)?;
    }
    Ok(())
}

pub fn gain(
    sink: &mut dyn Write,
    common: &CommonArgs,
    gamma: f64,
    t: &Sweep,
    op: &str,
) -> ExpResult {
    let alpha2 = input_weight(common)?;
    let (d1, d2) = detectors(common)?;
    let (want_op1, want_op2, want_mean) = match op {
        "1" => (true, false, false),
        "2" => (false, true, false),
        "both" => (true, true, false),
        "avg" => (true, true, true),
        other => return Err(format!("--op must be 1, 2, both or avg, got `{other}`").into()),
    };

    let mut w = CsvWriter::new(sink, "gain")?;
    w.param("alpha2", alpha2)?;
    w.param("gamma", gamma)?;
    w.param("t", t)?;
    w.param("op", op)?;
    common_header(&mut w, common)?;
    let mut cols = vec!["t"];
    if want_op1 {
        cols.push("gain_op1");
    }
    if want_op2 {
        cols.push("gain_op2");
    }
    if want_mean {
        cols.push("gain_mean");
    }
    w.columns(&cols)?;
    for tv in t.values() {
        let cfg = AmplifierConfig::from_weights(alpha2, gamma, tv, d1, d2)?;
        let g1 = gain_closed_form(&cfg, OperatingPoint::Op1).unwrap_or(f64::INFINITY);
        let g2 = gain_closed_form(&cfg, OperatingPoint::Op2).unwrap_or(f64::INFINITY);
        let mut row = vec![tv];
        if want_op1 {
            row.push(g1);
        }
        if want_op2 {
            row.push(g2);
        }
        if want_mean {
            row.push(0.5 * (g1 + g2));
        }
        w.row(&row)?;
    }
    Ok(())
}

pub fn psucc(sink: &mut dyn Write, common: &CommonArgs, gamma: f64, t: &Sweep) -> ExpResult {
    let alpha2 = input_weight(common)?;
    let (d1, d2) = detectors(common)?;

    let mut w = CsvWriter::new(sink, "psucc")?;
    w.param("alpha2", alpha2)?;
    w.param("gamma", gamma)?;
    w.param("t", t)?;
    common_header(&mut w, common)?;
    w.columns(&["t", "p_op1", "p_op2", "p_mean", "p_qs"])?;
    for tv in t.values() {
        let cfg = AmplifierConfig::from_weights(alpha2, gamma, tv, d1, d2)?;
        let p1 = success_probability_closed_form(&cfg, OperatingPoint::Op1);
        let p2 = success_probability_closed_form(&cfg, OperatingPoint::Op2);
        let qs = qs_nla_run(&cfg)?.registered_success;
        w.row(&[tv, p1, p2, 0.5 * (p1 + p2), qs])?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn skr(
    sink: &mut dyn Write,
    common: &CommonArgs,
    atten_db_km: f64,
    distance: &Sweep,
    k: u8,
    t: f64,
    ns: f64,
) -> ExpResult {
    let (d1, d2) = detectors(common)?;
    let tmsv = TmsvParams::new(ns)?;

    let mut w = CsvWriter::new(sink, "skr")?;
    w.param("atten_db_km", atten_db_km)?;
    w.param(
        "attenuation_length_km",
        crate::sweep::fmt_float(LinkBudget::new(atten_db_km, 0.0)?.attenuation_length_km()),
    )?;
    w.param("distance_km", distance)?;
    w.param("k", k)?;
    w.param("t", t)?;
    w.param("ns", ns)?;
    w.param("distance semantics", "end-to-end span, split at the midpoint")?;
    common_header(&mut w, common)?;
    w.columns(&[
        "distance_km",
        "chi",
        "plob",
        "direct",
        "skr_op1",
        "skr_op1_bell",
        "skr_op2",
        "skr_mean",
        "skr_qs",
    ])?;
    for dist in distance.values() {
        let link = LinkBudget::new(atten_db_km, dist)?;
        let scenario = SkrScenario::new(link, t, tmsv, d1, d2, k)?;
        let run = skr_protocol(&scenario)?;
        w.row(&[
            dist,
            run.chi,
            run.plob,
            run.direct,
            run.skr_op1,
            run.p_s_bell_registered,
            run.skr_op2,
            0.5 * (run.skr_op1 + run.skr_op2),
            run.skr_qs,
        ])?;
    }
    Ok(())
}

pub fn sensing(
    sink: &mut dyn Write,
    common: &CommonArgs,
    gamma: f64,
    t: &Sweep,
    ns: f64,
) -> ExpResult {
    let (d1, d2) = detectors(common)?;
    let tmsv = TmsvParams::new(ns)?;
    let source = tmsv_truncated(&tmsv, gamma)?;
    // normalized vacuum fraction of the truncated source
    let alpha2 = tmsv.alpha().powi(2) / source.truncation_weight;

    let mut w = CsvWriter::new(sink, "sensing")?;
    w.param("gamma", gamma)?;
    w.param("t", t)?;
    w.param("ns", ns)?;
    w.param("truncation_weight", crate::sweep::fmt_float(source.truncation_weight))?;
    if source.warning {
        w.param("truncation_warning", "mean photon number above 0.1")?;
    }
    for op in [OperatingPoint::Op1, OperatingPoint::Op2] {
        if let Ok(tr) = full_restoration_t(alpha2, gamma, op) {
            let name = match op {
                OperatingPoint::Op1 => "t_restore_op1",
                OperatingPoint::Op2 => "t_restore_op2",
            };
            w.param(name, crate::sweep::fmt_float(tr))?;
        }
    }
    common_header(&mut w, common)?;
    w.columns(&["t", "p_op1", "p_op2", "reg_op1", "reg_op2"])?;
    for tv in t.values() {
        let run = sensing_restore(&tmsv, gamma, tv, &d1, &d2)?;
        let (p1, r1) = run
            .op1
            .as_ref()
            .map_or((0.0, 0.0), |b| (b.probability, b.registered_probability));
        let (p2, r2) = run
            .op2
            .as_ref()
            .map_or((0.0, 0.0), |b| (b.probability, b.registered_probability));
        w.row(&[tv, p1, p2, r1, r2])?;
    }
    Ok(())
}

pub fn entangle(sink: &mut dyn Write, common: &CommonArgs) -> ExpResult {
    let (d1, d2) = detectors(common)?;
    let result = remote_entangle(&d1, &d2)?;

    let mut w = CsvWriter::new(sink, "entangle")?;
    common_header(&mut w, common)?;
    w.columns(&[
        "p_off_off",
        "p_off_on",
        "p_on_off",
        "p_on_on",
        "fidelity_min",
        "succ_op1",
        "succ_op2",
        "succ_mean",
    ])?;
    let min_fid = result
        .branches
        .iter()
        .map(|b| b.fidelity)
        .fold(f64::INFINITY, f64::min);
    w.row(&[
        result.branches[0].probability,
        result.branches[1].probability,
        result.branches[2].probability,
        result.branches[3].probability,
        min_fid,
        result.op1_success,
        result.op2_success,
        result.average_success,
    ])?;
    Ok(())
}

