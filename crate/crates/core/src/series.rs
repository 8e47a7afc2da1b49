//! Truncated formal power series in q over exact rationals.
//!
//! A [`Series`] holds the coefficients of `q^0 .. q^(order-1)`; the order is
//! explicit data, never ambient state. Binary operations truncate to the
//! minimum of the operand orders, so precision loss is always visible in the
//! result's order. Multiplication is the plain O(N^2) Cauchy product; with
//! exact big-integer coefficients and N in the low thousands that is both
//! fast enough and obviously correct.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("constant term is zero: series is not invertible")]
    NonUnitConstant,
    #[error("negative power of a series with zero constant term")]
    NegativePowerOfNonUnit,
    #[error("coefficient index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },
}

/// Formal power series truncated at an explicit exclusive order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    /// The zero series at the given order.
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "series order must be positive");
        Self {
            coeffs: vec![Rational::zero(); order],
        }
    }

    /// The constant series 1 at the given order.
    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// A constant series.
    pub fn constant(value: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    /// Builds a series from the given coefficients; the order is their count.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series order must be positive");
        Self { coeffs }
    }

    /// Convenience constructor from small integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| crate::arith::rat_int(c)).collect())
    }

    /// Builds a series of the given order from integer coefficients,
    /// zero-padding or truncating as needed.
    pub fn from_bigint_coeffs(mut ints: Vec<BigInt>, order: usize) -> Self {
        assert!(order >= 1);
        ints.resize(order, BigInt::zero());
        Self {
            coeffs: ints.into_iter().map(Rational::from_integer).collect(),
        }
    }

    /// The exclusive truncation order (number of known coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The coefficient of q^index; indexes at or beyond the order are a
    /// contract violation, never silently zero.
    pub fn coefficient(&self, index: usize) -> Result<&Rational, SeriesError> {
        self.coeffs.get(index).ok_or(SeriesError::IndexOutOfRange {
            index,
            order: self.order(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when every coefficient has denominator 1.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Coefficientwise equality up to the common (minimum) order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// First index below the common order where the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..n).find(|&i| self.coeffs[i] != other.coeffs[i])
    }

    /// Truncates (or zero-extends is forbidden: new order must not exceed
    /// the current one) to the given order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order >= 1 && order <= self.order());
        Self {
            coeffs: self.coeffs[..order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect();
        Self { coeffs }
    }

    pub fn negate(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scalar_mul(&self, scalar: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * scalar).collect(),
        }
    }

    /// Cauchy product truncated to the minimum operand order.
    ///
    /// When both operands are integral the convolution runs on plain big
    /// integers; the result is observationally identical to the rational
    /// path, just faster.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        if self.is_integral() && other.is_integral() {
            let a: Vec<BigInt> = self.coeffs[..n].iter().map(|c| c.numer().clone()).collect();
            let b: Vec<BigInt> = other.coeffs[..n].iter().map(|c| c.numer().clone()).collect();
            let mut out = vec![BigInt::zero(); n];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate().take(n - i) {
                    if !bj.is_zero() {
                        out[i + j] += ai * bj;
                    }
                }
            }
            return Self::from_bigint_coeffs(out, n);
        }
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if !other.coeffs[j].is_zero() {
                    out[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        Self { coeffs: out }
    }

    /// Multiplicative inverse via the standard recurrence
    /// b_0 = 1/a_0, b_n = -(sum_{k=1..n} a_k b_{n-k}) / a_0.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NonUnitConstant);
        }
        let n = self.order();
        // Integer fast path: a_0 = +-1 with integer coefficients keeps the
        // whole recurrence in BigInt.
        if self.is_integral() && a0.numer().is_one() {
            let sign_flip = a0.numer().is_negative();
            let a: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            let mut b = vec![BigInt::zero(); n];
            b[0] = a[0].clone();
            for m in 1..n {
                let mut acc = BigInt::zero();
                for k in 1..=m {
                    if !a[k].is_zero() {
                        acc += &a[k] * &b[m - k];
                    }
                }
                b[m] = if sign_flip { acc } else { -acc };
            }
            return Ok(Self::from_bigint_coeffs(b, n));
        }
        let mut b = vec![Rational::zero(); n];
        b[0] = a0.recip();
        for m in 1..n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &b[m - k];
                }
            }
            b[m] = -(acc / a0);
        }
        Ok(Self { coeffs: b })
    }

    /// Integer power by repeated squaring; negative exponents invert the
    /// positive power and require a unit constant term.
    pub fn pow_int(&self, exponent: i64) -> Result<Self, SeriesError> {
        if exponent == 0 {
            return Ok(Self::one(self.order()));
        }
        if exponent < 0 {
            if self.coeffs[0].is_zero() {
                return Err(SeriesError::NegativePowerOfNonUnit);
            }
            return self.pow_int(-exponent)?.inverse();
        }
        let mut e = exponent as u64;
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.unwrap())
    }

    /// The substitution q -> q^j, truncated to this series' order.
    pub fn substitute_power(&self, j: usize) -> Self {
        assert!(j >= 1, "substitution exponent must be positive");
        let n = self.order();
        let mut out = vec![Rational::zero(); n];
        let mut idx = 0usize;
        let mut m = 0usize;
        while idx < n {
            out[idx] = self.coeffs[m].clone();
            m += 1;
            idx += j;
            if j > 1 && m >= n {
                break;
            }
        }
        Self { coeffs: out }
    }

    /// q * d/dq: coefficient n*c_n at q^n. Exact at every held index.
    pub fn q_derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * crate::arith::rat_int(i as i64))
            .collect();
        Self { coeffs }
    }

    /// Coefficients as decimal strings: plain integers render bit-exactly,
    /// non-integers as "numerator/denominator".
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs
            .iter()
            .map(|c| {
                if c.denom().is_one() {
                    c.numer().to_string()
                } else {
                    format!("{}/{}", c.numer(), c.denom())
                }
            })
            .collect()
    }

    /// JSON export: array of decimal strings.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.coeff_strings()).expect("string array always serializes")
    }

    /// CSV export with header: index, numerator, denominator.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,numerator,denominator\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i, c.numer(), c.denom()));
        }
        out
    }
}
