//! The acceptance gate: each test covers one numbered criterion and prints a
//! single pass/fail line before asserting.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use quadzeta::exact::{rat, Rat};
use quadzeta::field::{BaseField, SplitType};
use quadzeta::kloosterman::{displayed_closed_form, euler_factor_at_2, kloosterman, matching_k_values, Variant};
use quadzeta::orderzeta::{jtilde, order_polynomial};
use quadzeta::verify::{check_arthur, check_congruence, check_fe, check_oracle_local, check_oracle_tree, check_zagier_fe};

fn fields() -> Vec<BaseField> {
    vec![
        BaseField::rational(),
        BaseField::quadratic(-1).unwrap(),
        BaseField::quadratic(2).unwrap(),
        BaseField::quadratic(5).unwrap(),
        BaseField::quadratic(-5).unwrap(),
    ]
}

fn report(n: u32, passed: bool, detail: &str, start: Instant, limit: Option<Duration>) {
    let elapsed = start.elapsed();
    let in_time = limit.map_or(true, |l| elapsed <= l);
    let verdict = if passed && in_time { "PASS" } else { "FAIL" };
    println!(
        "criterion {}: {} ({}; {:.2?}{})",
        n,
        verdict,
        detail,
        elapsed,
        limit.map_or(String::new(), |l| format!(" of {:?} budget", l)),
    );
    assert!(passed, "criterion {}: {}", n, detail);
    assert!(in_time, "criterion {}: over time budget ({:.2?})", n, elapsed);
}

#[test]
fn criterion_1_functional_equation() {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = 0;
    for (i, field) in fields().into_iter().enumerate() {
        let count = if i == 0 { 500 } else { 100 };
        let r = check_fe(&field, count, 7);
        cases += r.cases;
        failures += r.failures;
    }
    report(
        1,
        failures == 0 && cases >= 900,
        &format!("term-wise s -> 1-s symmetry, {} deltas, {} failures", cases, failures),
        start,
        Some(Duration::from_secs(60)),
    );
}

#[test]
fn criterion_2_divisor_expansion() {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = 0;
    for field in fields() {
        let count = if field.is_rational() { 500 } else { 100 };
        let r = check_arthur(&field, count, 7);
        cases += r.cases;
        failures += r.failures;
    }
    report(
        2,
        failures == 0 && cases > 3000,
        &format!("divisor expansion == local product, {} deltas incl. tau sweeps, {} failures", cases, failures),
        start,
        None,
    );
}

#[test]
fn criterion_3_polynomial_functional_equation() {
    let start = Instant::now();
    let mut cases = 0;
    let mut ok = true;
    for family in [SplitType::Ramified, SplitType::Inert, SplitType::Split] {
        for n in 0..=10u32 {
            for q in [2u64, 3, 4, 5, 7, 9] {
                let p = order_polynomial(family, n, q);
                let qr = rat(q as i64, 1);
                // (q x^2)^n P(1/(qx)) = P(x) coefficient-wise
                for j in 0..=2 * n as usize {
                    let lhs = Rat::from(p.coeffs[2 * n as usize - j].clone())
                        * (&qr).pow(j as i32 - n as i32);
                    ok &= lhs == Rat::from(p.coeffs[j].clone());
                }
                let jt = jtilde(&p);
                ok &= jt.reflect() == jt;
                cases += 1;
            }
        }
    }
    report(
        3,
        ok,
        &format!("(qx^2)^n P(1/(qx)) == P(x) for {} (family, n, q) triples", cases),
        start,
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn criterion_4_ideal_count_oracles() {
    let start = Instant::now();
    let r = check_oracle_local(&BaseField::rational());
    report(
        4,
        r.passed,
        &format!("local and global ideal counts, {} cases, {} failures", r.cases, r.failures),
        start,
        Some(Duration::from_secs(300)),
    );
}

#[test]
fn criterion_5_tree_lattice_oracle() {
    let start = Instant::now();
    let r = check_oracle_tree(&BaseField::rational());
    report(
        5,
        r.passed,
        &format!("fixed-lattice counts vs closed forms, {} cases, {} failures", r.cases, r.failures),
        start,
        Some(Duration::from_secs(120)),
    );
}

#[test]
fn criterion_6_congruence_divisibility() {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = 0;
    for field in fields() {
        let r = check_congruence(&field, 50, 7);
        cases += r.cases;
        failures += r.failures;
    }
    report(
        6,
        failures == 0,
        &format!("congruence <=> divides S, {} (delta, ideal) cases, {} failures", cases, failures),
        start,
        None,
    );
}

#[test]
fn criterion_7_zagier_functional_equation() {
    let start = Instant::now();
    let r = check_zagier_fe(&BaseField::rational());
    report(
        7,
        r.passed,
        &format!("Lambda(s) = Lambda(1-s) numerically + L(1) references, {} cases, {} failures", r.cases, r.failures),
        start,
        None,
    );
}

#[test]
fn criterion_8_euler_factor_at_two() {
    let start = Instant::now();
    let matching = matching_k_values(18).unwrap();
    let mut ok = matching == vec![1, 3];
    for &k in &matching {
        let e = euler_factor_at_2(k, Complex64::new(1.0, 0.0), Variant::WithoutCc, 18).unwrap();
        ok &= (e.re - displayed_closed_form(k)).abs() <= e.tail_bound;
    }
    let k11 = kloosterman(1, 1, 2, 1, -1).unwrap().value;
    ok &= k11 == 4;
    report(
        8,
        ok,
        &format!("without-cc factor matches closed form for k in {:?} (k <= 4); K_1,1 = {}", matching, k11),
        start,
        None,
    );
}
