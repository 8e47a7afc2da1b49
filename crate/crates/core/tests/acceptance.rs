//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every tolerance and threshold is pinned here in code. A passing
//! coefficientwise check is evidence to the stated truncation order, not a
//! proof; the README says the same.

use std::time::Instant;

use qident::arith::{partition, rat, KroneckerChar};
use qident::etasolve::{fit_eta_quotient, FitResult};
use qident::numerics::{
    check_constants, closed_beta, closed_zeta, dirichlet_l, hurwitz_zeta, limit_table, pi,
    rational_multiple_detect, wallis_partial, BigFloat, QContext,
};
use qident::qforms::{divisor_series, eta_quotient_series, pochhammer, EtaQuotient};
use qident::registry::{
    auxiliary_limits, builtin_registry, check_partition_congruence, lookup, verify, Expr,
    IdentityEntry, Verification,
};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: the beta(3) q-analogue verifies exactly at order 1000 in
/// under 10 seconds, and the shared coefficients start 1, 4, 8, 16, 26.
#[test]
fn criterion_1_beta3_at_order_1000() {
    let entries = builtin_registry();
    let entry = lookup(&entries, "beta3_q").unwrap();
    let started = Instant::now();
    let verdict = verify(entry, 1000).unwrap();
    let elapsed = started.elapsed();
    let heads = entry.lhs.eval(5).unwrap().coeff_strings();
    let pass = verdict.is_verified()
        && heads == ["1", "4", "8", "16", "26"]
        && elapsed.as_secs_f64() < 10.0;
    report(
        1,
        pass,
        &format!(
            "beta3_q verified at order 1000 in {:.2}s, leading coefficients {:?}",
            elapsed.as_secs_f64(),
            heads
        ),
    );
}

/// Criterion 2: every built-in identity verifies exactly at order 500, in
/// under 60 seconds total.
#[test]
fn criterion_2_full_registry_at_order_500() {
    let entries = builtin_registry();
    assert!(entries.len() >= 15);
    let started = Instant::now();
    let mut failures = Vec::new();
    for entry in &entries {
        match verify(entry, 500) {
            Ok(Verification::Verified) => {}
            Ok(Verification::Mismatch { index, .. }) => {
                failures.push(format!("{} at index {index}", entry.id))
            }
            Err(e) => failures.push(format!("{}: {e}", entry.id)),
        }
    }
    let elapsed = started.elapsed();
    let pass = failures.is_empty() && elapsed.as_secs_f64() < 60.0;
    report(
        2,
        pass,
        &format!(
            "{} identities at order 500 in {:.2}s{}",
            entries.len(),
            elapsed.as_secs_f64(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(", failures: {failures:?}")
            }
        ),
    );
}

/// Criterion 3: corrupting any single eta exponent of the beta3 product by
/// +-1 produces a mismatch at index <= 10.
#[test]
fn criterion_3_mutation_sensitivity() {
    let entries = builtin_registry();
    let good = lookup(&entries, "beta3_q").unwrap();
    // RHS = poch(2,4)^e1 * poch(4,4)^e2 / poch(1,2)^e3 with (2, 6, 4).
    let build = |e1: i64, e2: i64, e3: i64| -> Expr {
        Expr::div(
            Expr::mul(
                Expr::pow(Expr::Poch { c: 2, b: 4 }, e1),
                Expr::pow(Expr::Poch { c: 4, b: 4 }, e2),
            ),
            Expr::pow(Expr::Poch { c: 1, b: 2 }, e3),
        )
    };
    assert_eq!(good.rhs, build(2, 6, 4), "mutation base must match catalog");
    let mut worst = 0usize;
    let mut all_caught = true;
    for (e1, e2, e3) in [
        (1, 6, 4),
        (3, 6, 4),
        (2, 5, 4),
        (2, 7, 4),
        (2, 6, 3),
        (2, 6, 5),
    ] {
        let mutant = IdentityEntry {
            id: format!("beta3_mutant_{e1}_{e2}_{e3}"),
            lhs: good.lhs.clone(),
            rhs: build(e1, e2, e3),
            citation: "mutation".into(),
            limit_meta: None,
        };
        match verify(&mutant, 50).unwrap() {
            Verification::Mismatch { index, .. } => worst = worst.max(index),
            Verification::Verified => all_caught = false,
        }
    }
    report(
        3,
        all_caught && worst <= 10,
        &format!("six single-exponent mutants all caught, worst index {worst}"),
    );
}

/// Criterion 4: the fitter recovers the five catalogued exponent maps from
/// divisor-sum targets alone, and round-trips 100 random exponent maps at
/// order 200.
#[test]
fn criterion_4_eta_fitter() {
    let chi = |top: i64| KroneckerChar::new(top).unwrap();
    let paper_cases: Vec<(i64, u32, Vec<usize>, Vec<(usize, i64)>)> = vec![
        (-4, 2, vec![1, 2, 4], vec![(1, -4), (2, 6), (4, 4)]),
        (-3, 2, vec![1, 3], vec![(1, -3), (3, 9)]),
        (5, 1, vec![1, 5], vec![(1, -1), (5, 5)]),
        (8, 1, vec![1, 2, 4, 8], vec![(1, -2), (2, 3), (4, 1), (8, 2)]),
        (
            12,
            1,
            vec![1, 2, 3, 4, 6, 12],
            vec![(1, -2), (2, 2), (3, 2), (4, 1), (12, 1)],
        ),
    ];
    for (top, weight, candidates, expect) in &paper_cases {
        let target = divisor_series(&chi(*top), *weight, 200);
        let got = fit_eta_quotient(&target, candidates).unwrap();
        assert_eq!(
            got,
            FitResult::Fitted(EtaQuotient::new(expect.clone())),
            "divisor-sum target for top {top}"
        );
    }

    // 100 random maps over periods {1,2,3,4,6}, |r| <= 6, candidates
    // additionally offering the unused period 12; deterministic LCG.
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as i64
    };
    let mut round_trips = 0usize;
    for _ in 0..100 {
        let mut pairs = Vec::new();
        for &d in &[1usize, 2, 3, 4, 6] {
            let magnitude = next() % 7;
            let sign = if next() % 2 == 0 { 1 } else { -1 };
            pairs.push((d, sign * magnitude));
        }
        let eta = EtaQuotient::new(pairs.clone());
        let target = eta_quotient_series(&eta, 200);
        let got = fit_eta_quotient(&target, &[1, 2, 3, 4, 6, 12]).unwrap();
        assert_eq!(got, FitResult::Fitted(eta), "round trip for {pairs:?}");
        round_trips += 1;
    }
    report(
        4,
        round_trips == 100,
        &format!("five catalogued maps recovered, {round_trips}/100 random round trips"),
    );
}

/// Criterion 5: the numeric layer reproduces every closed form to 1e-10 in
/// under 30 seconds: beta(3) = pi^3/32, closed beta vs L(-4, 2n+1) for
/// n = 0..2, closed zeta vs Hurwitz zeta for m = 1..5, all twelve
/// catalogued constants, and continued-fraction recovery of 4/81.
#[test]
fn criterion_5_numeric_closed_forms() {
    let started = Instant::now();
    let bits = 256;
    let tol = rat(1, 10_000_000_000);

    let beta3 = dirichlet_l(-4, 3, bits).unwrap();
    let target = pi(bits).powi(3).div_int(32);
    assert!(
        beta3.abs_diff(&target).abs_below_rational(&tol),
        "beta(3) vs pi^3/32"
    );

    for n in 0..=2u32 {
        let closed = closed_beta(n, bits);
        let l = dirichlet_l(-4, 2 * n + 1, bits).unwrap();
        assert!(
            closed.abs_diff(&l).abs_below_rational(&tol),
            "closed beta vs L at n = {n}"
        );
    }
    for m in 1..=5u32 {
        let closed = closed_zeta(m, bits);
        let h = hurwitz_zeta(2 * m, &rat(1, 1), bits);
        assert!(
            closed.abs_diff(&h).abs_below_rational(&tol),
            "closed zeta vs hurwitz at m = {m}"
        );
    }

    let checks = check_constants(&tol, bits).unwrap();
    assert_eq!(checks.len(), 12);
    for c in &checks {
        assert!(c.pass, "constant {} off by {}", c.id, c.abs_err.to_decimal(20));
    }

    let value = dirichlet_l(-3, 3, bits).unwrap();
    let base = pi(bits).powi(3).div(&qident::numerics::sqrt_u64(3, bits));
    let detected = rational_multiple_detect(&value, &base, 10_000);
    assert_eq!(detected, Some(rat(4, 81)), "L(3,(-3|.)) / (pi^3/sqrt 3)");

    let elapsed = started.elapsed();
    report(
        5,
        elapsed.as_secs_f64() < 30.0,
        &format!(
            "beta/zeta closed forms, 12 constants, and 4/81 detection at 1e-10 in {:.2}s",
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 6: q -> 1 limits. At q = 0.9999 the scaled beta3 product is
/// within 1% of pi^3/16 and the even/odd quotient within 1% of pi/2, both
/// approaching monotonically over q = 0.9, 0.99, 0.999, 0.9999; the Wallis
/// partial product at K = 10^5 is within 5e-6 of pi/2.
#[test]
fn criterion_6_limits() {
    let bits = 96;
    let q_list = [rat(9, 10), rat(99, 100), rat(999, 1000), rat(9999, 10_000)];

    let entries = builtin_registry();
    let beta3 = lookup(&entries, "beta3_q").unwrap();
    let meta = beta3.limit_meta.as_ref().unwrap();
    assert_eq!(meta.weight, 3);

    let check_rows = |rows: &[qident::numerics::LimitRow], label: &str| {
        for pair in rows.windows(2) {
            assert!(
                pair[1].abs_err.cmp_value(&pair[0].abs_err) == std::cmp::Ordering::Less,
                "{label}: approach not monotone between q = {} and q = {}",
                pair[0].q,
                pair[1].q
            );
        }
        let last = rows.last().unwrap();
        let rel_ok = last
            .abs_err
            .cmp_value(&last.target.mul_rational(&rat(1, 100)))
            == std::cmp::Ordering::Less;
        assert!(rel_ok, "{label}: final row not within 1% of target");
    };

    let rows = limit_table(&beta3.rhs, meta.weight, &meta.constant, &q_list, bits).unwrap();
    check_rows(&rows, "beta3 product");

    // Corroborate with the Lambert sum side at the extreme point.
    let ctx = QContext::new(&rat(9999, 10_000), bits).unwrap();
    let lhs_value = ctx.eval(&beta3.lhs).unwrap();
    let scale = BigFloat::from_rational(&rat(1, 10_000), ctx.work_bits()).powi(3);
    let scaled = lhs_value.mul(&scale).to_bits(bits);
    let target = qident::numerics::pi_expr_value(&meta.constant, bits);
    assert!(
        scaled.abs_diff(&target).cmp_value(&target.mul_rational(&rat(1, 100)))
            == std::cmp::Ordering::Less,
        "lambert-sum side at q = 0.9999"
    );

    let (_, eq11_expr, eq11_meta) = auxiliary_limits().remove(0);
    let rows = limit_table(&eq11_expr, eq11_meta.weight, &eq11_meta.constant, &q_list, bits)
        .unwrap();
    check_rows(&rows, "even/odd quotient");

    let wallis_bits = 192;
    let w = wallis_partial(100_000, wallis_bits);
    let err = w.abs_diff(&pi(wallis_bits).div_int(2));
    assert!(
        err.abs_below_rational(&rat(5, 1_000_000)),
        "wallis at K = 10^5 off by {}",
        err.to_decimal(12)
    );

    report(
        6,
        true,
        "beta3 to pi^3/16 and even/odd quotient to pi/2 monotone and within 1% at q = 0.9999; \
         Wallis(10^5) within 5e-6 of pi/2",
    );
}

/// Criterion 7: p(5n+4) = 0 (mod 5) for n = 0..199, with partition values
/// cross-checked against the series inverse of (q;q)_inf for n <= 300.
#[test]
fn criterion_7_partition_congruence() {
    assert!(check_partition_congruence(5, 4, 200).is_verified());
    let inv = pochhammer(1, 1, 301).inverse().unwrap();
    for n in 0..=300usize {
        let from_series = inv.coefficient(n).unwrap();
        let from_recurrence = qident::arith::Rational::from_integer(partition(n));
        assert_eq!(*from_series, from_recurrence, "p({n})");
    }
    report(
        7,
        true,
        "p(5n+4) = 0 (mod 5) for 200 cases; recurrence matches 1/(q;q)_inf to n = 300",
    );
}

/// Criterion 8: the identities are exact, so there is no reproduction gap
/// to accept; the README states that coefficientwise verification is
/// evidence to order N, not a proof.
#[test]
fn criterion_8_readme_documents_evidence_scope() {
    let readme = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../README.md"
    ))
    .expect("workspace README.md present");
    let lower = readme.to_lowercase();
    let documented = lower.contains("not a proof") && lower.contains("evidence");
    report(
        8,
        documented,
        "README states truncation-order checks are evidence, not proof",
    );
}

/// The numerics invariant backing the registry: both sides of every
/// catalogued identity agree numerically at q in {0.2, 0.5, 0.8} to 1e-20.
#[test]
fn numeric_corroboration_of_every_identity() {
    let tol = qident::arith::Rational::new(
        1.into(),
        num_bigint::BigInt::from(10u32).pow(20),
    );
    for q in [rat(1, 5), rat(1, 2), rat(4, 5)] {
        let ctx = QContext::new(&q, 128).unwrap();
        for entry in builtin_registry() {
            let lhs = ctx.eval(&entry.lhs).unwrap();
            let rhs = ctx.eval(&entry.rhs).unwrap();
            assert!(
                lhs.abs_diff(&rhs).abs_below_rational(&tol),
                "{} at q = {}: lhs {} rhs {}",
                entry.id,
                q,
                lhs.to_decimal(30),
                rhs.to_decimal(30)
            );
        }
    }
}
