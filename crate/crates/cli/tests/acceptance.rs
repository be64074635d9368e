//! The twelve acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line.

use fockext_cli::acceptance::run_criterion;

const SEED: u64 = 7;

fn check(id: usize) {
    let o = run_criterion(id, SEED);
    println!("{}", o.line());
    assert!(o.passed, "{}", o.line());
}

#[test]
fn criterion_01() {
    check(1);
}

#[test]
fn criterion_02() {
    check(2);
}

#[test]
fn criterion_03() {
    check(3);
}

#[test]
fn criterion_04() {
    check(4);
}

#[test]
fn criterion_05() {
    check(5);
}

#[test]
fn criterion_06() {
    check(6);
}

#[test]
fn criterion_07() {
    check(7);
}

#[test]
fn criterion_08() {
    check(8);
}

#[test]
fn criterion_09() {
    check(9);
}

#[test]
fn criterion_10() {
    check(10);
}

#[test]
fn criterion_11() {
    check(11);
}

#[test]
fn criterion_12() {
    check(12);
}
