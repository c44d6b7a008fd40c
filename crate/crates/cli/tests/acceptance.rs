//! One test per acceptance check; each prints its PASS/FAIL line.

use std::io::Write;

use rackforge_cli::verify::run_check;

/// Writes straight to the stdout handle so the line shows even for passing tests.
fn check(id: u8) {
    let result = run_check(id);
    let _ = writeln!(std::io::stdout().lock(), "{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_type_d_table() {
    check(1);
}

#[test]
fn criterion_02_cyclotomic_primes() {
    check(2);
}

#[test]
fn criterion_03_positive_witnesses() {
    check(3);
}

#[test]
fn criterion_04_proven_absence() {
    check(4);
}

#[test]
fn criterion_05_two_cycle_cases() {
    check(5);
}

#[test]
fn criterion_06_jacobi_law() {
    check(6);
}

#[test]
fn criterion_07_class_counts() {
    check(7);
}

#[test]
fn criterion_08_cohomology_golden() {
    check(8);
}

#[test]
fn criterion_09_commuting_squares() {
    check(9);
}

#[test]
fn criterion_10_symmetric_witnesses() {
    check(10);
}

#[test]
fn criterion_11_abelian_subracks() {
    check(11);
}

#[test]
fn criterion_12_census() {
    check(12);
}

#[test]
fn criterion_13_property_suites() {
    check(13);
}
