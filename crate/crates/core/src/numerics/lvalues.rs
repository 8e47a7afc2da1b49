//! Hurwitz zeta and Dirichlet L-values by Euler-Maclaurin summation.
//!
//! For integer s >= 2 the Hurwitz zeta value
//!
//!   zeta(s, a) = sum_{k=0..M-1} (k+a)^(-s)
//!              + (M+a)^(1-s)/(s-1) + (M+a)^(-s)/2
//!              + sum_{j=1..J} B_2j/(2j)! (s)_(2j-1) (M+a)^(-s-2j+1) + R
//!
//! with |R| bounded by the first omitted Bernoulli term: the summand
//! x -> (x+a)^(-s) is completely monotone, so the correction series
//! envelopes the remainder. L-values at s >= 2 decompose over a full period
//! P as L(s, chi) = P^(-s) sum_a chi(a) zeta(s, a/P).
//!
//! At s = 1 (odd characters only) the per-residue pieces diverge and only
//! the full character combination converges. Euler-Maclaurin applied to
//! g(m) = sum_a chi(a)/(mP+a) still works because sum_a chi(a) = 0 kills
//! every divergent piece: the integral term collapses to
//! -(1/P) sum_a chi(a) ln(1 + a/(MP)), computable by the ln(1+x) series.
//!
//! Direct summation is hopeless at these tolerances (10^10 terms for ten
//! digits of an s = 2 value); with M around a hundred terms plus Bernoulli
//! corrections the same digits cost microseconds.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{bernoulli, rising_factorial, KroneckerChar, Rational};

use super::bigfloat::BigFloat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LValueError {
    #[error("invalid character: {0}")]
    Character(#[from] crate::arith::ArithError),
    #[error("L(s, chi) at s = {s} is not covered: the defining series converges \
             only for s >= 2, or s = 1 when the character is odd")]
    Nonconvergent { s: u32 },
}

/// Internal guard bits on top of the requested precision.
const GUARD: u32 = 48;

/// log2 of the Euler-Maclaurin bound term |B_2n|/(2n)! (s)_(2n-1) z^(-s-2n+1)
/// at n = j+1, using |B_2n|/(2n)! ~ 2/(2 pi)^(2n).
fn em_bound_log2(s: u32, j: u32, z: f64) -> f64 {
    let n = (2 * (j + 1)) as f64;
    let mut rising_log2 = 0f64;
    for i in 0..(2 * j + 1) {
        rising_log2 += (s as f64 + i as f64).log2();
    }
    1.0 - n * (2.0 * std::f64::consts::PI).log2() + rising_log2
        - (s as f64 + n - 1.0) * z.log2()
}

/// Picks (M, J) so the first omitted correction term is below 2^-target_bits.
fn choose_parameters(s: u32, a_f64: f64, target_bits: u32) -> (u32, u32) {
    let target = -(target_bits as f64);
    let mut best: Option<(u32, u32, u64)> = None;
    for m in [8u32, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512] {
        let z = m as f64 + a_f64;
        for j in 1..=160u32 {
            let b = em_bound_log2(s, j, z);
            if b <= target {
                let cost = m as u64 + 3 * j as u64;
                if best.map(|(_, _, c)| cost < c).unwrap_or(true) {
                    best = Some((m, j, cost));
                }
                break;
            }
        }
    }
    let (m, j, _) = best.expect("parameter ladder always reaches the target");
    (m, j)
}

/// Hurwitz zeta zeta(s, a) for integer s >= 2 and rational a in (0, 1],
/// accurate to within a few units of 2^-bits.
pub fn hurwitz_zeta(s: u32, a: &Rational, bits: u32) -> BigFloat {
    assert!(s >= 2, "hurwitz_zeta requires s >= 2");
    assert!(
        a.is_positive() && *a <= Rational::from_integer(BigInt::from(1)),
        "hurwitz_zeta requires a in (0, 1]"
    );
    let work = bits + GUARD;
    let (m, j_max) = choose_parameters(s, a.to_f64().unwrap_or(0.5), bits + 8);

    let p = a.numer().clone();
    let q = a.denom().clone();
    let one = BigInt::from(1) << work;

    // Direct block: sum_{k<M} (q / (kq+p))^s.
    let q_pow_s = q.pow(s);
    let numer = &q_pow_s * &one;
    let mut acc = BigInt::zero();
    for k in 0..m {
        let base = &q * k + &p;
        acc += &numer / base.pow(s);
    }

    // z = M + a = (Mq + p)/q.
    let zq = &q * m + &p; // z = zq / q
    // z^(1-s) / (s-1)
    acc += &q.pow(s - 1) * &one / (zq.pow(s - 1) * (s - 1));
    // z^(-s) / 2
    acc += &q_pow_s * &one / (zq.pow(s) << 1u32);

    // Bernoulli corrections: B_2j/(2j)! (s)_(2j-1) z^(-s-2j+1), j = 1..J.
    // Maintain z^(-s-2j+1) incrementally via multiplication by z^(-2).
    let mut zpow = BigFloat::from_mantissa(&q.pow(s + 1) * &one / zq.pow(s + 1), work);
    let zinv2 = BigFloat::from_mantissa((&q * &q) * &one / (&zq * &zq), work);
    let mut corr = BigFloat::zero(work);
    for j in 1..=j_max {
        let coeff = bernoulli(2 * j as usize)
            * Rational::from_integer(rising_factorial(s as u64, 2 * j as u64 - 1))
            / Rational::from_integer(crate::arith::factorial(2 * j as u64));
        corr = corr.add(&zpow.mul_rational(&coeff));
        if j < j_max {
            zpow = zpow.mul(&zinv2);
        }
    }

    BigFloat::from_mantissa(acc, work).add(&corr).to_bits(bits)
}

/// Dirichlet L-value L(s, (top|.)) to within a few units of 2^-bits.
///
/// Requires s >= 2, or s = 1 with an odd character (negative top); even
/// characters at s = 1 are rejected since character cancellation alone does
/// not make the defining series converge there.
pub fn dirichlet_l(top: i64, s: u32, bits: u32) -> Result<BigFloat, LValueError> {
    let chi = KroneckerChar::new(top)?;
    if s >= 2 {
        let period = chi.modulus();
        let work = bits + GUARD;
        let mut acc = BigFloat::zero(work);
        for a in 1..=period {
            let c = chi.eval(a);
            if c == 0 {
                continue;
            }
            let z = hurwitz_zeta(s, &crate::arith::rat(a as i64, period as i64), work);
            acc = if c > 0 { acc.add(&z) } else { acc.sub(&z) };
        }
        // P^(-s) prefactor.
        let scale = Rational::new(BigInt::from(1), BigInt::from(period).pow(s));
        return Ok(acc.mul_rational(&scale).to_bits(bits));
    }
    if s == 1 && chi.is_odd() {
        return Ok(dirichlet_l_at_one(&chi, bits));
    }
    Err(LValueError::Nonconvergent { s })
}

/// ln(1 + num/den) in fixed point for 0 < num < den, by the alternating
/// series; the tail after a positive term is bounded by the next term.
fn ln_one_plus(num: &BigInt, den: &BigInt, work: u32) -> BigFloat {
    let x = BigFloat::from_mantissa((num << work) / den, work);
    let mut power = x.clone();
    let mut acc = BigFloat::zero(work);
    let mut i = 1i64;
    while !power.is_zero() {
        let term = power.div_int(i);
        acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        power = power.mul(&x);
        i += 1;
    }
    acc
}

/// L(1, chi) for an odd character by Euler-Maclaurin on the period-grouped
/// sum g(m) = sum_a chi(a)/(mP+a).
fn dirichlet_l_at_one(chi: &KroneckerChar, bits: u32) -> BigFloat {
    let work = bits + GUARD;
    let period = chi.modulus();
    let one = BigInt::from(1) << work;

    // Parameters: remainder after J corrections is at most
    // |B_(2J+2)| / ((2J+2) M^(2J+2)) (summed over the period).
    let target = (bits + 8) as f64;
    let mut chosen: Option<(u32, u32, u64)> = None;
    for m in [16u32, 24, 32, 48, 64, 96, 128, 192, 256] {
        for j in 1..=160u32 {
            let n = (2 * (j + 1)) as f64;
            // log2 |B_2n| ~ 1 + lg((2n)!) - 2n lg(2pi); lg((2n)!) by direct sum.
            let mut lg_fact = 0f64;
            for i in 2..=(2 * (j + 1)) {
                lg_fact += (i as f64).log2();
            }
            let bound = 1.0 + lg_fact
                - n * (2.0 * std::f64::consts::PI).log2()
                - ((2 * (j + 1)) as f64).log2()
                - n * (m as f64).log2();
            if bound <= -target {
                let cost = m as u64 * period + 3 * j as u64 * period;
                if chosen.map(|(_, _, c)| cost < c).unwrap_or(true) {
                    chosen = Some((m, j, cost));
                }
                break;
            }
        }
    }
    let (m, j_max, _) = chosen.expect("parameter ladder always reaches the target");

    let residues: Vec<(u64, i32)> = (1..=period)
        .map(|a| (a, chi.eval(a)))
        .filter(|&(_, c)| c != 0)
        .collect();

    // Direct block: sum_{m' < M} g(m').
    let mut acc = BigInt::zero();
    for mm in 0..m as u64 {
        for &(a, c) in &residues {
            let term = &one / BigInt::from(mm * period + a);
            if c > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    let mut total = BigFloat::from_mantissa(acc, work);

    let mp = BigInt::from(m as u64 * period);

    // Integral term: -(1/P) sum_a chi(a) ln(1 + a/(MP)); the ln(MP) pieces
    // cancel because the character sums to zero over a period.
    let mut integral = BigFloat::zero(work);
    for &(a, c) in &residues {
        let l = ln_one_plus(&BigInt::from(a), &mp, work);
        integral = if c > 0 { integral.sub(&l) } else { integral.add(&l) };
    }
    total = total.add(&integral.div_int(period as i64));

    // Half term: g(M)/2.
    let mut half = BigFloat::zero(work);
    for &(a, c) in &residues {
        let t = BigFloat::from_mantissa(&one / (&mp + a), work);
        half = if c > 0 { half.add(&t) } else { half.sub(&t) };
    }
    total = total.add(&half.div_int(2));

    // Corrections: sum_j B_2j/(2j) P^(2j-1) sum_a chi(a) (MP+a)^(-2j).
    // Per residue, maintain P^(2j-1)/(MP+a)^(2j) via the ratio (P/(MP+a))^2.
    let mut powers: Vec<BigFloat> = Vec::with_capacity(residues.len());
    let mut ratios: Vec<BigFloat> = Vec::with_capacity(residues.len());
    for &(a, _) in &residues {
        let base = &mp + a;
        powers.push(BigFloat::from_mantissa(
            BigInt::from(period) * &one / (&base * &base),
            work,
        ));
        ratios.push(BigFloat::from_mantissa(
            BigInt::from(period * period) * &one / (&base * &base),
            work,
        ));
    }
    for j in 1..=j_max {
        let coeff = bernoulli(2 * j as usize) / crate::arith::rat_int(2 * j as i64);
        let mut inner = BigFloat::zero(work);
        for (idx, &(_, c)) in residues.iter().enumerate() {
            inner = if c > 0 {
                inner.add(&powers[idx])
            } else {
                inner.sub(&powers[idx])
            };
            if j < j_max {
                powers[idx] = powers[idx].mul(&ratios[idx]);
            }
        }
        total = total.add(&inner.mul_rational(&coeff));
    }

    total.to_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::numerics::bigfloat::{pi, sqrt_u64};

    fn assert_close(a: &BigFloat, b: &BigFloat, neg_pow: u32) {
        let d = a.abs_diff(b);
        assert!(
            d.abs_below_pow2(neg_pow),
            "difference {} exceeds 2^-{neg_pow}",
            d.to_decimal(60)
        );
    }

    #[test]
    fn hurwitz_at_one_is_zeta() {
        let bits = 256;
        // zeta(2) = pi^2/6 to better than 1e-30 (~2^-100).
        let z = hurwitz_zeta(2, &rat(1, 1), bits);
        let target = pi(bits).powi(2).div_int(6);
        assert_close(&z, &target, 110);
        // zeta(4) = pi^4/90.
        let z = hurwitz_zeta(4, &rat(1, 1), bits);
        let target = pi(bits).powi(4).div_int(90);
        assert_close(&z, &target, 110);
    }

    #[test]
    fn hurwitz_at_half() {
        let bits = 256;
        // zeta(2, 1/2) = pi^2/2.
        let z = hurwitz_zeta(2, &rat(1, 2), bits);
        let target = pi(bits).powi(2).div_int(2);
        assert_close(&z, &target, 110);
    }

    #[test]
    fn hurwitz_matches_direct_summation() {
        // Low-precision cross-check against the defining series with an
        // integral tail estimate: sum_{k<=K} + integral bound brackets.
        let bits = 64;
        let a = rat(1, 3);
        let s = 3;
        let z = hurwitz_zeta(s, &a, bits).to_f64();
        let mut direct = 0f64;
        let k_max = 4000u32;
        for k in 0..k_max {
            direct += (k as f64 + 1.0 / 3.0).powi(-(s as i32));
        }
        // Tail between integral from k_max and integral from k_max - 1.
        let tail_low = (k_max as f64 + 1.0 / 3.0).powi(-(s as i32 - 1)) / (s as f64 - 1.0);
        assert!(z > direct && z < direct + 2.0 * tail_low, "z = {z}, direct = {direct}");
    }

    #[test]
    fn beta_three_matches_pi_cubed_over_32() {
        let bits = 256;
        let l = dirichlet_l(-4, 3, bits).unwrap();
        let target = pi(bits).powi(3).div_int(32);
        assert_close(&l, &target, 100);
        assert!(l.to_decimal(12).starts_with("0.96894614625"));
    }

    #[test]
    fn l_one_for_odd_characters() {
        let bits = 256;
        // L(1, (-4|.)) = pi/4 (Leibniz).
        let l = dirichlet_l(-4, 1, bits).unwrap();
        assert_close(&l, &pi(bits).div_int(4), 100);
        // L(1, (-3|.)) = pi/(3 sqrt(3)).
        let l = dirichlet_l(-3, 1, bits).unwrap();
        let target = pi(bits).div(&sqrt_u64(3, bits)).div_int(3);
        assert_close(&l, &target, 100);
    }

    #[test]
    fn l_rejects_nonconvergent_arguments() {
        assert!(matches!(
            dirichlet_l(5, 1, 64),
            Err(LValueError::Nonconvergent { s: 1 })
        ));
        assert!(matches!(
            dirichlet_l(8, 0, 64),
            Err(LValueError::Nonconvergent { s: 0 })
        ));
        assert!(dirichlet_l(0, 2, 64).is_err());
    }

    #[test]
    fn section3_constants_spot_checks() {
        let bits = 256;
        // L(3, (-3|.)) = 4 pi^3 / (81 sqrt(3))
        let l = dirichlet_l(-3, 3, bits).unwrap();
        let target = pi(bits)
            .powi(3)
            .mul_int(4)
            .div(&sqrt_u64(3, bits))
            .div_int(81);
        assert_close(&l, &target, 100);
        // L(2, (5|.)) = 4 pi^2 / (25 sqrt(5))
        let l = dirichlet_l(5, 2, bits).unwrap();
        let target = pi(bits)
            .powi(2)
            .mul_int(4)
            .div(&sqrt_u64(5, bits))
            .div_int(25);
        assert_close(&l, &target, 100);
    }
}
