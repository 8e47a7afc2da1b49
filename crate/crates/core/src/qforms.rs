//! Builders for the q-objects under verification: q-Pochhammer truncations
//! (q^c; q^b)_inf, eta quotients prod_d (q^d;q^d)_inf^{r_d}, character-twisted
//! Lambert series with square and cubic denominators, the general Lambert
//! shape, and twisted divisor-sum series.
//!
//! The Lambert builders expand 1/(1-q^n)^r through the binomial series and
//! accumulate integer contributions directly; no rational division is
//! involved, and the expansion step is independent of the divisor-sum route,
//! so the two sides of each identity are computed along genuinely different
//! paths.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{twisted_divisor_sum, KroneckerChar};
use crate::series::Series;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QformsError {
    #[error("invalid Lambert spec: {0}")]
    InvalidLambertSpec(String),
}

/// Truncation of (q^c; q^b)_inf = prod_{k>=0} (1 - q^{c+kb}) to the given
/// order; only factors with exponent below the order are multiplied.
pub fn pochhammer(c: usize, b: usize, order: usize) -> Series {
    assert!(c >= 1 && b >= 1, "pochhammer arguments must be positive");
    assert!(order >= 1);
    let mut coeffs = vec![BigInt::zero(); order];
    coeffs[0] = BigInt::from(1);
    let mut e = c;
    while e < order {
        // In-place multiply by (1 - q^e), descending so each source index
        // is still the pre-update value.
        for i in (e..order).rev() {
            let delta = coeffs[i - e].clone();
            if !delta.is_zero() {
                coeffs[i] -= delta;
            }
        }
        e += b;
    }
    Series::from_bigint_coeffs(coeffs, order)
}

/// A finite product prod_d (q^d; q^d)_inf^{r_d} described by its exponent
/// map; the empty map denotes the constant series 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EtaQuotient {
    exponents: BTreeMap<usize, i64>,
}

impl EtaQuotient {
    /// Builds from (period, exponent) pairs; zero exponents are dropped.
    /// Panics on a zero period; periods must be distinct.
    pub fn new<I: IntoIterator<Item = (usize, i64)>>(pairs: I) -> Self {
        let mut exponents = BTreeMap::new();
        for (d, r) in pairs {
            assert!(d >= 1, "eta-quotient period must be positive");
            if r != 0 {
                let prior = exponents.insert(d, r);
                assert!(prior.is_none(), "duplicate eta-quotient period {d}");
            }
        }
        Self { exponents }
    }

    pub fn exponents(&self) -> &BTreeMap<usize, i64> {
        &self.exponents
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// JSON object {period: exponent}, keys in ascending numeric order.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, i64> = self
            .exponents
            .iter()
            .map(|(&d, &r)| (d.to_string(), r))
            .collect();
        serde_json::to_string(&map).expect("integer map always serializes")
    }
}

impl std::fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(d, r)| format!("eta({d})^{r}"))
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Expands an eta quotient to its q-series. Positive exponents are
/// multiplied into a numerator, negative into a denominator, and a single
/// inversion finishes the job.
pub fn eta_quotient_series(eta: &EtaQuotient, order: usize) -> Series {
    assert!(order >= 1);
    let mut numer = Series::one(order);
    let mut denom = Series::one(order);
    for (&d, &r) in eta.exponents() {
        let base = pochhammer(d, d, order);
        if r > 0 {
            numer = numer.mul(&base.pow_int(r).expect("positive power"));
        } else {
            denom = denom.mul(&base.pow_int(-r).expect("positive power"));
        }
    }
    numer.mul(&denom.inverse().expect("pochhammer products are units"))
}

/// sum_{n>=1} chi(n) q^{n-1} (1+q^n) / (1-q^n)^3 via the expansion
/// (1+q^n)/(1-q^n)^3 = sum_{k>=0} (k+1)^2 q^{kn}.
pub fn lambert_cubic(chi: &KroneckerChar, order: usize) -> Series {
    assert!(order >= 1);
    let mut coeffs = vec![BigInt::zero(); order];
    for n in 1..=order {
        let c = chi.eval(n as u64);
        if c == 0 {
            continue;
        }
        let mut k = 0usize;
        loop {
            let idx = n - 1 + k * n;
            if idx >= order {
                break;
            }
            let w = BigInt::from(((k + 1) * (k + 1)) as u64);
            if c > 0 {
                coeffs[idx] += w;
            } else {
                coeffs[idx] -= w;
            }
            k += 1;
        }
    }
    Series::from_bigint_coeffs(coeffs, order)
}

/// sum_{n>=1} chi(n) q^{n-1} / (1-q^n)^2 via 1/(1-q^n)^2 = sum (k+1) q^{kn}.
pub fn lambert_square(chi: &KroneckerChar, order: usize) -> Series {
    assert!(order >= 1);
    let mut coeffs = vec![BigInt::zero(); order];
    for n in 1..=order {
        let c = chi.eval(n as u64);
        if c == 0 {
            continue;
        }
        let mut k = 0usize;
        loop {
            let idx = n - 1 + k * n;
            if idx >= order {
                break;
            }
            let w = BigInt::from((k + 1) as u64);
            if c > 0 {
                coeffs[idx] += w;
            } else {
                coeffs[idx] -= w;
            }
            k += 1;
        }
    }
    Series::from_bigint_coeffs(coeffs, order)
}

/// Series whose coefficient of q^{m-1} is the twisted divisor sum
/// sum_{d|m} chi(m/d) d^weight, computed by divisor enumeration. This is
/// the comparison route for the Lambert builders, kept algorithmically
/// independent of their binomial expansion.
pub fn divisor_series(chi: &KroneckerChar, weight: u32, order: usize) -> Series {
    assert!(order >= 1 && weight >= 1);
    let coeffs = (1..=order)
        .map(|m| twisted_divisor_sum(m as u64, chi, weight))
        .collect();
    Series::from_bigint_coeffs(coeffs, order)
}

/// Structured description of a general Lambert-type sum
///
/// sum_{k>=0} sign(k) * q^{e(k)} * P(x_k) / (1 - x_k)^r,  x_k = q^{mk+t},
///
/// with e(k) = (A k^2 + B k)/2 + C and sign(k) cyclic in k. This covers the
/// alternating (-1)^k shapes, the period-4 patterns arising from
/// (-1)^{k(k+1)/2} and (-1)^{k(k+3)/2}, and polynomial numerators such as
/// 1 + 4x + x^2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambertSpec {
    /// Cyclic sign pattern indexed by k mod len; entries are +1 or -1.
    pub signs: Vec<i32>,
    /// Quadratic coefficient A of 2*e(k) = A k^2 + B k + 2C.
    pub quad: i64,
    /// Linear coefficient B.
    pub lin: i64,
    /// Constant term C of e(k).
    pub offset: i64,
    /// Denominator base step m: x_k = q^{m k + t}.
    pub denom_step: usize,
    /// Denominator base offset t.
    pub denom_offset: usize,
    /// Denominator power r >= 1.
    pub denom_power: u32,
    /// Numerator polynomial P, lowest degree first; P(0) != 0.
    pub numerator: Vec<i64>,
}

impl LambertSpec {
    /// e(k) = (A k^2 + B k)/2 + C.
    pub fn exponent(&self, k: i64) -> i64 {
        (self.quad * k * k + self.lin * k) / 2 + self.offset
    }

    pub fn validate(&self) -> Result<(), QformsError> {
        let err = |msg: &str| Err(QformsError::InvalidLambertSpec(msg.to_string()));
        if self.signs.is_empty() || self.signs.iter().any(|&s| s != 1 && s != -1) {
            return err("sign pattern must be a nonempty list of +1/-1");
        }
        if self.denom_step < 1 || self.denom_offset < 1 || self.denom_power < 1 {
            return err("denominator parameters m, t, r must all be >= 1");
        }
        if self.numerator.is_empty() || self.numerator[0] == 0 {
            return err("numerator polynomial must be nonempty with P(0) != 0");
        }
        if self.quad < 0 {
            return err("exponent quadratic coefficient must be nonnegative");
        }
        if (self.quad + self.lin) % 2 != 0 {
            return err("A k^2 + B k must be even for every k (A + B must be even)");
        }
        if self.quad == 0 && self.lin <= 0 {
            // Each term contributes P(0) at exponent e(k); unless e(k) grows
            // without bound the truncated sum has unboundedly many
            // contributions at a fixed index.
            return err("exponent e(k) must grow: require A > 0, or A = 0 with B > 0");
        }
        // e(k) >= 0 for all k >= 0: check k = 0 and, for A > 0, the integer
        // points adjacent to the parabola vertex.
        let mut min = self.exponent(0);
        if self.quad > 0 {
            let vertex = -self.lin / (2 * self.quad);
            for k in [vertex - 1, vertex, vertex + 1] {
                if k >= 0 {
                    min = min.min(self.exponent(k));
                }
            }
        }
        if min < 0 {
            return err("exponent e(k) must be nonnegative for all k >= 0");
        }
        Ok(())
    }

    fn sign_at(&self, k: usize) -> i32 {
        self.signs[k % self.signs.len()]
    }
}

/// Expands a general Lambert-type sum to the given order. Terms whose
/// leading exponent e(k) is at or beyond the order contribute nothing, so
/// the loop over k is finite for every valid spec.
pub fn lambert_general(spec: &LambertSpec, order: usize) -> Result<Series, QformsError> {
    assert!(order >= 1);
    spec.validate()?;
    // W_l = sum_{i} P_i * C(l-i+r-1, r-1): the coefficient of x^l in
    // P(x)/(1-x)^r, precomputed once since it does not depend on k.
    let r = spec.denom_power as u64;
    let mut binom = Vec::with_capacity(order);
    let mut acc = BigInt::from(1); // C(r-1, r-1)
    for j in 0..order as u64 {
        binom.push(acc.clone());
        acc = acc * BigInt::from(j + r) / BigInt::from(j + 1);
    }
    let weights: Vec<BigInt> = (0..order)
        .map(|l| {
            let mut w = BigInt::zero();
            for (i, &p) in spec.numerator.iter().enumerate() {
                if p != 0 && i <= l {
                    w += p * &binom[l - i];
                }
            }
            w
        })
        .collect();

    let mut coeffs = vec![BigInt::zero(); order];
    let mut k = 0usize;
    loop {
        let e = spec.exponent(k as i64);
        debug_assert!(e >= 0);
        let e = e as usize;
        if e >= order {
            // e(k) is nondecreasing in k once the vertex is passed; with
            // e(0) already checked this terminates for all valid specs.
            if spec.quad == 0 || spec.exponent(k as i64 + 1) >= spec.exponent(k as i64) {
                break;
            }
            k += 1;
            continue;
        }
        let base = spec.denom_step * k + spec.denom_offset;
        let sign = spec.sign_at(k);
        let mut l = 0usize;
        loop {
            let idx = e + l * base;
            if idx >= order {
                break;
            }
            if !weights[l].is_zero() {
                if sign > 0 {
                    coeffs[idx] += &weights[l];
                } else {
                    coeffs[idx] -= &weights[l];
                }
            }
            l += 1;
        }
        k += 1;
    }
    Ok(Series::from_bigint_coeffs(coeffs, order))
}

/// Spec builders for the sign patterns that actually occur: (-1)^k,
/// (-1)^{k(k+1)/2} and (-1)^{k(k+3)/2} have periods 2 and 4.
pub fn alternating_signs() -> Vec<i32> {
    vec![1, -1]
}

pub fn signs_k_k_plus_1_half() -> Vec<i32> {
    vec![1, -1, -1, 1]
}

pub fn signs_k_k_plus_3_half() -> Vec<i32> {
    vec![1, 1, -1, -1]
}
