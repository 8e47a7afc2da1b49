//! Fixed-point arbitrary-precision reals: value = mantissa / 2^bits.
//!
//! Every quantity this crate evaluates numerically is of moderate magnitude
//! (partial sums, pi powers, scaled products), so a dyadic fixed-point
//! representation with an explicit bit count covers the job without exponent
//! bookkeeping. Individual operations truncate toward zero and are accurate
//! to one unit in the last place; callers work at a guard margin of 32-64
//! bits above the precision they certify.

use std::collections::BTreeMap;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    bits: u32,
}

impl BigFloat {
    pub fn zero(bits: u32) -> Self {
        Self {
            mant: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        Self::from_int(1, bits)
    }

    pub fn from_int(n: i64, bits: u32) -> Self {
        Self {
            mant: BigInt::from(n) << bits,
            bits,
        }
    }

    /// Nearest fixed-point value to the given rational (round half away
    /// from zero).
    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        let scaled_num = r.numer() << bits;
        let den = r.denom();
        let twice = (&scaled_num << 1u32) + den * scaled_num.sign_i64();
        Self {
            mant: twice / (den << 1u32),
            bits,
        }
    }

    /// Raw constructor: value = mant / 2^bits.
    pub fn from_mantissa(mant: BigInt, bits: u32) -> Self {
        Self { mant, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.bits, other.bits,
            "mixed-precision arithmetic is a bug: {} vs {}",
            self.bits, other.bits
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self {
            mant: &self.mant + &other.mant,
            bits: self.bits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self {
            mant: &self.mant - &other.mant,
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -&self.mant,
            bits: self.bits,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self {
            mant: (&self.mant * &other.mant) >> self.bits,
            bits: self.bits,
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.check(other);
        assert!(!other.mant.is_zero(), "division by zero");
        Self {
            mant: (&self.mant << self.bits) / &other.mant,
            bits: self.bits,
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Self {
            mant: &self.mant * n,
            bits: self.bits,
        }
    }

    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0);
        Self {
            mant: &self.mant / n,
            bits: self.bits,
        }
    }

    /// Multiplies by an exact rational.
    pub fn mul_rational(&self, r: &Rational) -> Self {
        Self {
            mant: (&self.mant * r.numer()) / r.denom(),
            bits: self.bits,
        }
    }

    pub fn powi(&self, e: u32) -> Self {
        if e == 0 {
            return Self::one(self.bits);
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
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
        acc.unwrap()
    }

    pub fn recip(&self) -> Self {
        Self::one(self.bits).div(self)
    }

    /// Floor square root in fixed point; requires a nonnegative value.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of a negative value");
        Self {
            mant: (&self.mant << self.bits).sqrt(),
            bits: self.bits,
        }
    }

    /// Integer floor of the value.
    pub fn floor_int(&self) -> BigInt {
        // Arithmetic shift of a negative mantissa already floors.
        &self.mant >> self.bits
    }

    /// Fractional part in [0, 1).
    pub fn fract(&self) -> Self {
        let f = &self.mant - (self.floor_int() << self.bits);
        Self {
            mant: f,
            bits: self.bits,
        }
    }

    /// Rounds to a lower precision (round half away from zero).
    pub fn to_bits(&self, bits: u32) -> Self {
        if bits == self.bits {
            return self.clone();
        }
        if bits > self.bits {
            return Self {
                mant: &self.mant << (bits - self.bits),
                bits,
            };
        }
        let shift = self.bits - bits;
        let half = BigInt::from(1) << (shift - 1);
        let adjusted = &self.mant + &half * self.mant.sign_i64();
        Self {
            mant: adjusted >> shift,
            bits,
        }
    }

    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        self.check(other);
        self.mant.cmp(&other.mant)
    }

    /// |self - other| expressed at this precision.
    pub fn abs_diff(&self, other: &Self) -> Self {
        self.sub(other).abs()
    }

    /// True when |self| < 2^-neg_pow.
    pub fn abs_below_pow2(&self, neg_pow: u32) -> bool {
        assert!(neg_pow <= self.bits);
        self.mant.abs() < (BigInt::from(1) << (self.bits - neg_pow))
    }

    /// True when |self| < tol for an exact rational tolerance.
    pub fn abs_below_rational(&self, tol: &Rational) -> bool {
        // |mant| / 2^bits < num/den  <=>  |mant| * den < num << bits
        self.mant.abs() * tol.denom() < (tol.numer() << self.bits)
    }

    /// Approximate f64 value; for diagnostics and parameter selection only.
    pub fn to_f64(&self) -> f64 {
        let neg = self.mant.is_negative();
        let abs = self.mant.abs();
        let bits_len = abs.bits();
        // Keep the top 64 bits and track the exponent to stay in f64 range.
        let (top, exp) = if bits_len > 64 {
            let shift = bits_len - 64;
            ((&abs >> shift).to_u64().unwrap(), shift as i64)
        } else {
            (abs.to_u64().unwrap_or(0), 0i64)
        };
        let v = top as f64 * 2f64.powi((exp - self.bits as i64) as i32);
        if neg {
            -v
        } else {
            v
        }
    }

    /// Decimal rendering with the given number of fractional digits,
    /// rounded half away from zero. Deterministic, sign-aware.
    pub fn to_decimal(&self, digits: u32) -> String {
        let pow10 = BigInt::from(10u32).pow(digits);
        let scaled_twice = (&self.mant * &pow10) >> (self.bits - 1);
        let rounded: BigInt = (&scaled_twice + self.mant.sign_i64()) / 2;
        let neg = rounded.is_negative();
        let abs = rounded.abs();
        let s = abs.to_string();
        let (int_part, frac_part) = if s.len() > digits as usize {
            let split = s.len() - digits as usize;
            (s[..split].to_string(), s[split..].to_string())
        } else {
            (
                "0".to_string(),
                format!("{:0>width$}", s, width = digits as usize),
            )
        };
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Suggested digit count for full-precision decimal rendering.
    pub fn full_digits(bits: u32) -> u32 {
        (bits as f64 * std::f64::consts::LN_2 / std::f64::consts::LN_10).floor() as u32
    }
}

trait SignI64 {
    fn sign_i64(&self) -> i64;
}

impl SignI64 for BigInt {
    fn sign_i64(&self) -> i64 {
        match self.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }
}

impl BigFloat {
    /// Natural logarithm of a positive value. Normalizes to [1, 2) and sums
    /// the atanh series (3+ bits per term).
    pub fn ln(&self) -> Self {
        assert!(
            !self.is_negative() && !self.is_zero(),
            "ln of a non-positive value"
        );
        let bits = self.bits;
        let shift = self.mant.bits() as i64 - 1 - bits as i64;
        // u = self * 2^-shift in [1, 2).
        let u = Self {
            mant: if shift >= 0 {
                &self.mant >> shift as u32
            } else {
                &self.mant << (-shift) as u32
            },
            bits,
        };
        // ln u = 2 atanh t with t = (u-1)/(u+1) in [0, 1/3).
        let one = Self::one(bits);
        let t = u.sub(&one).div(&u.add(&one));
        let t_sq = t.mul(&t);
        let mut power = t.clone();
        let mut acc = Self::zero(bits);
        let mut i = 1i64;
        while !power.is_zero() {
            acc = acc.add(&power.div_int(i));
            power = power.mul(&t_sq);
            i += 2;
        }
        acc = acc.mul_int(2);
        acc.add(&ln2(bits).mul_int(shift))
    }

    /// Exponential, by range reduction exp(x) = 2^k exp(r) with
    /// r = x - k ln 2 in [0, ln 2).
    pub fn exp(&self) -> Self {
        let bits = self.bits;
        let l2 = ln2(bits);
        let k_int = self.div(&l2).floor_int();
        let k = i64::try_from(&k_int).expect("exp argument in representable range");
        let r = self.sub(&l2.mul_int(k));
        let mut term = Self::one(bits);
        let mut acc = Self::one(bits);
        let mut i = 1i64;
        while !term.is_zero() {
            term = term.mul(&r).div_int(i);
            acc = acc.add(&term);
            i += 1;
        }
        if k >= 0 {
            Self {
                mant: acc.mant << k as u32,
                bits,
            }
        } else {
            Self {
                mant: acc.mant >> (-k) as u32,
                bits,
            }
        }
    }
}

static LN2_CACHE: LazyLock<Mutex<BTreeMap<u32, BigInt>>> =
    LazyLock::new(|| Mutex::new(BTreeMap::new()));

/// ln 2 at the requested precision via sum_{j>=1} 1/(j 2^j). Cached.
pub fn ln2(bits: u32) -> BigFloat {
    if let Some(m) = LN2_CACHE.lock().unwrap().get(&bits) {
        return BigFloat::from_mantissa(m.clone(), bits);
    }
    let work = bits + 32;
    let mut acc = BigInt::zero();
    for j in 1..=(work as u64) {
        acc += (BigInt::from(1) << (work as u64 - j)) / j;
    }
    let value = BigFloat::from_mantissa(acc, work).to_bits(bits);
    LN2_CACHE
        .lock()
        .unwrap()
        .insert(bits, value.mantissa().clone());
    value
}

static PI_CACHE: LazyLock<Mutex<BTreeMap<u32, BigInt>>> =
    LazyLock::new(|| Mutex::new(BTreeMap::new()));

/// pi at the requested precision, by Machin's formula
/// pi = 16 atan(1/5) - 4 atan(1/239) evaluated in fixed point with 64 guard
/// bits. Cached per precision.
pub fn pi(bits: u32) -> BigFloat {
    if let Some(m) = PI_CACHE.lock().unwrap().get(&bits) {
        return BigFloat::from_mantissa(m.clone(), bits);
    }
    let work = bits + 64;
    // atan(1/x) * 2^work for integer x: alternating series
    // sum_j (-1)^j / ((2j+1) x^(2j+1)).
    let atan_inv = |x: u64| -> BigInt {
        let xsq = BigInt::from(x) * x;
        let mut power = (BigInt::from(1) << work) / x;
        let mut acc = BigInt::zero();
        let mut j = 0u64;
        while !power.is_zero() {
            let term = &power / (2 * j + 1);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            power = power / &xsq;
            j += 1;
        }
        acc
    };
    let raw = atan_inv(5) * 16 - atan_inv(239) * 4;
    let value = BigFloat::from_mantissa(raw, work).to_bits(bits);
    PI_CACHE
        .lock()
        .unwrap()
        .insert(bits, value.mantissa().clone());
    value
}

/// sqrt(d) at the requested precision for a positive integer d.
pub fn sqrt_u64(d: u64, bits: u32) -> BigFloat {
    assert!(d >= 1);
    let mant = (BigInt::from(d) << (2 * bits)).sqrt();
    BigFloat::from_mantissa(mant, bits)
}
