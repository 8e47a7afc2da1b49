//! High-precision numeric evaluation: closed-form constants, Dirichlet
//! L-values via Hurwitz zeta and Euler-Maclaurin, q -> 1 limit tables,
//! the Wallis product, and rational-multiple detection.
//!
//! Precision is always an explicit per-call parameter in bits (default 256),
//! never ambient state; concurrent evaluations are independent.

mod bigfloat;
mod lvalues;
mod qeval;

pub use bigfloat::{pi, sqrt_u64, BigFloat};
pub use lvalues::{dirichlet_l, hurwitz_zeta, LValueError};
pub use qeval::{limit_table, LimitRow, QContext, QEvalError};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{bernoulli, euler_number, factorial, rat_int, Rational};
use crate::registry::PiExpr;

/// Default working precision in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Smallest b with 2^-b <= tol, for a positive rational tolerance.
pub fn tolerance_bits(tol: &Rational) -> u32 {
    assert!(tol.is_positive(), "tolerance must be positive");
    // ceil(log2(den/num)) via bit lengths, corrected by one comparison.
    let mut b = (tol.denom().bits() as i64 - tol.numer().bits() as i64).max(0) as u32;
    while !(Rational::new(BigInt::one(), BigInt::one() << b) <= *tol) {
        b += 1;
    }
    b
}

/// Working precision for a requested tolerance: the base precision, doubled
/// when the tolerance comes within 32 bits of the precision floor.
pub fn working_precision(base_bits: u32, tol_bits: u32) -> u32 {
    let mut bits = base_bits;
    while bits < tol_bits + 32 {
        bits *= 2;
    }
    bits
}

/// Evaluates a closed-form constant coefficient * pi^power / sqrt(d).
pub fn pi_expr_value(expr: &PiExpr, bits: u32) -> BigFloat {
    let mut v = if expr.pi_power > 0 {
        pi(bits).powi(expr.pi_power)
    } else {
        BigFloat::one(bits)
    };
    v = v.mul_rational(&expr.coefficient);
    if expr.sqrt_divisor != 1 {
        v = v.div(&sqrt_u64(expr.sqrt_divisor, bits));
    }
    v
}

/// Euler's closed form zeta(2m) = (-1)^(m-1) 2^(2m-1) pi^(2m) B_2m / (2m)!.
pub fn closed_zeta(m: u32, bits: u32) -> BigFloat {
    assert!(m >= 1);
    let sign = if m % 2 == 1 { 1 } else { -1 };
    let coeff = rat_int(sign)
        * Rational::new(BigInt::one() << (2 * m - 1), factorial(2 * m as u64))
        * bernoulli(2 * m as usize);
    pi(bits).powi(2 * m).mul_rational(&coeff)
}

/// The closed form beta(2n+1) = (-1)^n E_2n pi^(2n+1) / (4^(n+1) (2n)!).
pub fn closed_beta(n: u32, bits: u32) -> BigFloat {
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let coeff = rat_int(sign)
        * Rational::new(
            euler_number(2 * n as usize),
            BigInt::from(4).pow(n + 1) * factorial(2 * n as u64),
        );
    pi(bits).powi(2 * n + 1).mul_rational(&coeff)
}

/// A catalogued L-value with its closed form.
#[derive(Debug, Clone)]
pub struct ConstantEntry {
    pub id: &'static str,
    /// Kronecker top of the character.
    pub top: i64,
    /// The s in L(s, chi).
    pub s: u32,
    pub closed: PiExpr,
}

/// The twelve catalogued closed-form constants: the Leibniz and beta(3)
/// values for the modulus-4 character, the four displayed constants for the
/// moduli 3, 5, 8 and 12, and the six further sums (the last involving the
/// odd modulus-8 character (-8|.), whose sign pattern on odd arguments is
/// (-1)^(k(k+3)/2)).
pub fn constant_entries() -> Vec<ConstantEntry> {
    let entry = |id, top, s, num, den, pi_power, sqrt_divisor| ConstantEntry {
        id,
        top,
        s,
        closed: PiExpr::new(num, den, pi_power, sqrt_divisor),
    };
    vec![
        entry("beta1", -4, 1, 1, 4, 1, 1),
        entry("beta3", -4, 3, 1, 32, 3, 1),
        entry("l3_m3", -3, 3, 4, 81, 3, 3),
        entry("l2_m5", 5, 2, 4, 25, 2, 5),
        entry("l2_m8", 8, 2, 1, 8, 2, 2),
        entry("l2_m12", 12, 2, 1, 6, 2, 3),
        entry("l3_m8_odd", -8, 3, 3, 64, 3, 2),
        entry("l4_m8", 8, 4, 11, 768, 4, 2),
        entry("l4_m12", 12, 4, 23, 1296, 4, 3),
        entry("l4_m5", 5, 4, 8, 375, 4, 5),
        entry("l5_m3", -3, 5, 4, 729, 5, 3),
        entry("l6_m5", 5, 6, 536, 234375, 6, 5),
    ]
}

/// Result of checking one catalogued constant at a tolerance.
#[derive(Debug, Clone)]
pub struct ConstantCheck {
    pub id: &'static str,
    pub computed: BigFloat,
    pub closed: BigFloat,
    pub abs_err: BigFloat,
    pub pass: bool,
}

/// Computes each catalogued L-value by Euler-Maclaurin and compares it with
/// its closed form at the given tolerance.
pub fn check_constants(tol: &Rational, bits: u32) -> Result<Vec<ConstantCheck>, LValueError> {
    let mut out = Vec::new();
    for entry in constant_entries() {
        let computed = dirichlet_l(entry.top, entry.s, bits)?;
        let closed = pi_expr_value(&entry.closed, bits);
        let abs_err = computed.abs_diff(&closed);
        out.push(ConstantCheck {
            id: entry.id,
            pass: abs_err.abs_below_rational(tol),
            computed,
            closed,
            abs_err,
        });
    }
    Ok(out)
}

/// Continued-fraction reconstruction of value/base as a rational with
/// denominator at most max_den. Succeeds only when the residual
/// |value/base - p/q| falls below the precision margin 2^-(bits/2), so a
/// merely-good approximation with a small denominator is rejected.
pub fn rational_multiple_detect(
    value: &BigFloat,
    base: &BigFloat,
    max_den: u64,
) -> Option<Rational> {
    assert!(!base.is_zero(), "rational_multiple_detect: base must be nonzero");
    let bits = value.bits();
    let x = value.div(base);
    let margin = bits / 2;

    let accept = |p: &BigInt, q: &BigInt| -> bool {
        if q.is_zero() || *q > BigInt::from(max_den) {
            return false;
        }
        let candidate = BigFloat::from_rational(&Rational::new(p.clone(), q.clone()), bits);
        x.abs_diff(&candidate).abs_below_pow2(margin)
    };

    // Convergents p_i/q_i of the continued fraction of x.
    let mut rem = x.clone();
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_cur, mut q_cur) = (rem.floor_int(), BigInt::one());
    if accept(&p_cur, &q_cur) {
        return Some(Rational::new(p_cur, q_cur));
    }
    for _ in 0..128 {
        let frac = rem.fract();
        if frac.abs_below_pow2(margin) {
            break;
        }
        rem = frac.recip();
        let a = rem.floor_int();
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        if q_next > BigInt::from(max_den) {
            break;
        }
        if accept(&p_next, &q_next) {
            return Some(Rational::new(p_next, q_next));
        }
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    }
    None
}

/// Partial Wallis product prod_{n<=K} 4n^2/(4n^2 - 1); increases toward
/// pi/2 at rate O(1/K).
pub fn wallis_partial(k: u64, bits: u32) -> BigFloat {
    assert!(k >= 1);
    let work = bits + 32;
    let mut v = BigFloat::one(work);
    for n in 1..=k {
        let sq = 4 * (n as i64) * (n as i64);
        v = v.mul_int(sq).div_int(sq - 1);
    }
    v.to_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn assert_close(a: &BigFloat, b: &BigFloat, neg_pow: u32) {
        assert!(
            a.abs_diff(b).abs_below_pow2(neg_pow),
            "difference {} exceeds 2^-{neg_pow}",
            a.abs_diff(b).to_decimal(50)
        );
    }

    #[test]
    fn precision_policy() {
        assert_eq!(tolerance_bits(&rat(1, 1024)), 10);
        assert_eq!(tolerance_bits(&rat(1, 1000)), 10);
        assert_eq!(tolerance_bits(&rat(1, 1025)), 11);
        assert_eq!(working_precision(256, 100), 256);
        // Within 32 bits of the floor: double.
        assert_eq!(working_precision(256, 230), 512);
        assert_eq!(working_precision(256, 600), 1024);
    }

    #[test]
    fn closed_zeta_values() {
        let bits = 256;
        assert_close(&closed_zeta(1, bits), &pi(bits).powi(2).div_int(6), 200);
        assert_close(&closed_zeta(2, bits), &pi(bits).powi(4).div_int(90), 200);
        assert_close(&closed_zeta(3, bits), &pi(bits).powi(6).div_int(945), 200);
        assert!(closed_zeta(1, bits).to_decimal(10).starts_with("1.6449340668"));
    }

    #[test]
    fn closed_beta_values() {
        let bits = 256;
        assert_close(&closed_beta(0, bits), &pi(bits).div_int(4), 200);
        assert_close(&closed_beta(1, bits), &pi(bits).powi(3).div_int(32), 200);
        assert_close(
            &closed_beta(2, bits),
            &pi(bits).powi(5).mul_int(5).div_int(1536),
            200,
        );
    }

    #[test]
    fn closed_zeta_against_direct_summation() {
        // Oracle: direct sum of n^-2m with an integral tail bracket.
        for m in 1..=5u32 {
            let bits = 192;
            let v = closed_zeta(m, bits).to_f64();
            let s = 2 * m as i32;
            let mut direct = 0f64;
            let k_max = 2000u64;
            for n in 1..=k_max {
                direct += (n as f64).powi(-s);
            }
            let tail_hi = (k_max as f64).powi(1 - s) / (s as f64 - 1.0);
            let slack = 1e-12; // f64 accumulation noise in the oracle
            assert!(
                v >= direct - slack && v <= direct + 1.5 * tail_hi + slack,
                "m = {m}: {v} vs {direct}"
            );
        }
    }

    #[test]
    fn constants_table_is_consistent() {
        let entries = constant_entries();
        assert_eq!(entries.len(), 12);
        for e in &entries {
            // (-1)^s * d = top must be 0 or 1 mod 4 (discriminant shape) and
            // the sign of the top must match the parity of s.
            assert_eq!(e.top < 0, e.s % 2 == 1, "{}", e.id);
            assert!(e.top.rem_euclid(4) <= 1, "{}", e.id);
            assert_eq!(e.closed.pi_power, e.s, "{}", e.id);
        }
    }

    #[test]
    fn all_twelve_constants_verify_at_1e10() {
        let checks = check_constants(&rat(1, 10_000_000_000), 256).unwrap();
        for c in &checks {
            assert!(
                c.pass,
                "{}: computed {} vs closed {}",
                c.id,
                c.computed.to_decimal(30),
                c.closed.to_decimal(30)
            );
        }
    }

    #[test]
    fn detect_recovers_exact_ratio() {
        let bits = 256;
        assert_eq!(
            rational_multiple_detect(&pi(bits), &pi(bits), 10_000),
            Some(rat(1, 1))
        );
        let value = pi(bits).powi(3).mul_rational(&rat(4, 81)).div(&sqrt_u64(3, bits));
        let base = pi(bits).powi(3).div(&sqrt_u64(3, bits));
        assert_eq!(rational_multiple_detect(&value, &base, 10_000), Some(rat(4, 81)));
    }

    #[test]
    fn detect_rejects_irrational_ratio() {
        let bits = 256;
        // pi / sqrt(2) is not a small rational.
        assert_eq!(
            rational_multiple_detect(&pi(bits), &sqrt_u64(2, bits), 10_000),
            None
        );
        // sqrt(2) / sqrt(8) = 1/2 though.
        assert_eq!(
            rational_multiple_detect(&sqrt_u64(2, bits), &sqrt_u64(8, bits), 10_000),
            Some(rat(1, 2))
        );
    }

    #[test]
    fn wallis_values() {
        let bits = 128;
        assert_close(
            &wallis_partial(1, bits),
            &BigFloat::from_rational(&rat(4, 3), bits),
            120,
        );
        // Monotone increasing in K.
        let w10 = wallis_partial(10, bits);
        let w11 = wallis_partial(11, bits);
        assert!(w11.cmp_value(&w10) == std::cmp::Ordering::Greater);
        // K = 1000 is within about pi/(8K) of pi/2.
        let w = wallis_partial(1000, bits);
        let err = w.abs_diff(&pi(bits).div_int(2));
        assert!(err.abs_below_rational(&rat(1, 2000)));
        assert!(!err.abs_below_rational(&rat(1, 10_000)));
    }
}
