//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (visible under --nocapture, or in the failure report).
//! Tolerances are pinned inside the criterion implementations.

use polymoment_cli::verify::{self, CriterionResult};

fn gate(result: CriterionResult) {
    println!(
        "criterion {}: {} - {}",
        result.index,
        if result.passed { "PASS" } else { "FAIL" },
        result.name
    );
    for (name, value) in &result.scalars {
        println!("  {name} = {value:.17e}");
    }
    if !result.info.is_empty() {
        println!("  {}", result.info);
    }
    assert!(result.passed, "criterion {} ({}): {}", result.index, result.name, result.info);
}

#[test]
fn criterion_01_exact_second_moment_values() {
    gate(verify::criterion_1());
}

#[test]
fn criterion_02_first_moment_closed_form() {
    gate(verify::criterion_2());
}

#[test]
fn criterion_03_prime_counts_and_partial_sums() {
    gate(verify::criterion_3());
}

#[test]
fn criterion_04_coefficient_support_cutoff() {
    gate(verify::criterion_4());
}

#[test]
fn criterion_05_zero_radii() {
    gate(verify::criterion_5());
}

#[test]
fn criterion_06_truncated_square_consistency() {
    gate(verify::criterion_6());
}

#[test]
fn criterion_07_mean_value_identity() {
    gate(verify::criterion_7());
}

#[test]
fn criterion_08_proxy_bound_fitted_constant() {
    gate(verify::criterion_8());
}

#[test]
fn criterion_09_block_partition_and_majorant() {
    gate(verify::criterion_9());
}

#[test]
fn criterion_10_mollifier_identities() {
    gate(verify::criterion_10());
}

#[test]
fn criterion_11_moment_growth() {
    gate(verify::criterion_11());
}

#[test]
fn criterion_12_thread_count_determinism() {
    gate(verify::criterion_12());
}
