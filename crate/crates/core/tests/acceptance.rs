//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p oneway-nla --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use oneway_nla::verify::{self, CheckOutcome};

fn report(outcome: CheckOutcome) {
    let status = if outcome.passed { "PASS" } else { "FAIL" };
    println!(
        "{status} criterion {:>2}: {} — {}",
        outcome.id, outcome.name, outcome.detail
    );
    assert!(
        outcome.passed,
        "criterion {} ({}) failed: {}",
        outcome.id, outcome.name, outcome.detail
    );
}

#[test]
fn criterion_01_adc_three_way_equivalence() {
    report(verify::check_adc_equivalence());
}

#[test]
fn criterion_02_gain_unity_at_balanced_splitter() {
    report(verify::check_gain_unity_at_half());
}

#[test]
fn criterion_03_closed_form_vs_simulation() {
    report(verify::check_closed_form_vs_simulation());
}

#[test]
fn criterion_04_probability_completeness() {
    report(verify::check_probability_completeness());
}

#[test]
fn criterion_05_scissors_oneway_equivalence() {
    report(verify::check_scissors_oneway_equivalence());
}

#[test]
fn criterion_06_gain_curve_regeneration() {
    report(verify::check_gain_curves());
}

#[test]
fn criterion_07_success_probability_regeneration() {
    report(verify::check_success_probability_curves());
}

#[test]
fn criterion_08_remote_entanglement() {
    report(verify::check_remote_entanglement());
}

#[test]
fn criterion_09_secret_key_rate_suite() {
    report(verify::check_skr_suite());
}

#[test]
fn criterion_10_reduction_chain() {
    report(verify::check_reduction_chain());
}
