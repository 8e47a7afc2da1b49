//! Exact integer and rational arithmetic plus the number-theoretic
//! primitives the rest of the crate is built on: Kronecker symbols,
//! twisted divisor sums, Bernoulli numbers, Euler numbers, and the
//! partition function.
//!
//! Everything here is a pure function of its inputs. The Bernoulli, Euler
//! and partition sequences are memoized behind mutexes, so concurrent use
//! is safe and results are independent of scheduling.

use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator (0 is canonically 0/1). `num_rational::BigRational`
/// maintains exactly those invariants.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for n/d as a [`Rational`]. Panics on d = 0.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("Kronecker symbol is undefined for top argument 0")]
    ZeroKroneckerTop,
}

/// Jacobi symbol (a/n) for odd n >= 1. `a` may be any integer; the symbol
/// only depends on a mod n.
fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1 && n >= 1);
    if n == 1 {
        return 1;
    }
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut sign = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol (d/n) for nonzero top `d` and nonnegative bottom `n`.
///
/// Completely multiplicative in `n`, with (d/1) = 1, (d/2) given by the
/// mod-8 rule, and (d/0) nonzero only for d = +-1.
pub fn kronecker(d: i64, n: u64) -> Result<i32, ArithError> {
    if d == 0 {
        return Err(ArithError::ZeroKroneckerTop);
    }
    if n == 0 {
        return Ok(if d == 1 || d == -1 { 1 } else { 0 });
    }
    // Split n = 2^e * m with m odd; (d/n) = (d/2)^e * jacobi(d, m).
    let mut m = n;
    let mut e = 0u32;
    while m % 2 == 0 {
        m /= 2;
        e += 1;
    }
    let mut sign = 1i32;
    if e > 0 {
        let two_part = match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return Ok(0), // d even, shared factor 2
        };
        if e % 2 == 1 {
            sign = two_part;
        }
    }
    Ok(sign * jacobi(d, m))
}

/// A real Dirichlet character n -> (d/n) given by its fixed top argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KroneckerChar {
    top: i64,
}

impl KroneckerChar {
    pub fn new(top: i64) -> Result<Self, ArithError> {
        if top == 0 {
            return Err(ArithError::ZeroKroneckerTop);
        }
        Ok(Self { top })
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    /// The modulus used when decomposing L-values over a full period.
    /// For the tops used here (-3, -4, 5, 8, -8, 12) this is the conductor.
    pub fn modulus(&self) -> u64 {
        self.top.unsigned_abs()
    }

    /// True for odd characters, i.e. chi(-1) = -1; for a Kronecker symbol
    /// that is exactly the sign of the top argument.
    pub fn is_odd(&self) -> bool {
        self.top < 0
    }

    pub fn eval(&self, n: u64) -> i32 {
        kronecker(self.top, n).expect("top validated nonzero at construction")
    }
}

impl std::fmt::Display for KroneckerChar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}|.)", self.top)
    }
}

/// All divisors of m >= 1 in ascending order, by trial division up to
/// sqrt(m). Fine for the truncation orders used here (m <= ~10^4).
pub fn divisors(m: u64) -> Vec<u64> {
    assert!(m >= 1, "divisors: argument must be positive");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Twisted divisor sum: sum over d | m of chi(m/d) * d^weight.
pub fn twisted_divisor_sum(m: u64, chi: &KroneckerChar, weight: u32) -> BigInt {
    assert!(m >= 1, "twisted_divisor_sum: m must be positive");
    let mut acc = BigInt::zero();
    for d in divisors(m) {
        let c = chi.eval(m / d);
        if c != 0 {
            acc += c * BigInt::from(d).pow(weight);
        }
    }
    acc
}

/// Binomial coefficient C(n, k) as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

static BERNOULLI: LazyLock<Mutex<Vec<Rational>>> =
    LazyLock::new(|| Mutex::new(vec![Rational::one()]));

/// Bernoulli number B_n from the recurrence
/// sum_{k=0}^{n} C(n+1, k) B_k = 0 (n >= 1) with B_0 = 1. Memoized.
pub fn bernoulli(n: usize) -> Rational {
    let mut table = BERNOULLI.lock().unwrap();
    while table.len() <= n {
        let m = table.len(); // computing B_m
        let mut acc = Rational::zero();
        for (k, bk) in table.iter().enumerate() {
            acc += Rational::from_integer(binomial(m as u64 + 1, k as u64)) * bk;
        }
        let bm = -acc / rat_int(m as i64 + 1);
        table.push(bm);
    }
    table[n].clone()
}

static EULER: LazyLock<Mutex<Vec<BigInt>>> = LazyLock::new(|| Mutex::new(vec![BigInt::one()]));

/// Euler number E_n from the recurrence
/// sum over even k in 0..=n of C(n, k) E_{n-k} = 0 (n >= 1) with E_0 = 1.
/// Memoized.
pub fn euler_number(n: usize) -> BigInt {
    let mut table = EULER.lock().unwrap();
    while table.len() <= n {
        let m = table.len(); // computing E_m (the k = 0 term of the sum)
        let mut acc = BigInt::zero();
        let mut k = 2usize;
        while k <= m {
            acc += binomial(m as u64, k as u64) * &table[m - k];
            k += 2;
        }
        table.push(-acc);
    }
    table[n].clone()
}

static PARTITION: LazyLock<Mutex<Vec<BigInt>>> = LazyLock::new(|| Mutex::new(vec![BigInt::one()]));

/// Partition number p(n) via the pentagonal-number recurrence
/// p(n) = sum_{k>=1} (-1)^(k+1) [p(n - k(3k-1)/2) + p(n - k(3k+1)/2)].
/// Memoized.
pub fn partition(n: usize) -> BigInt {
    let mut table = PARTITION.lock().unwrap();
    while table.len() <= n {
        let m = table.len() as i64;
        let mut acc = BigInt::zero();
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let sign_plus = k % 2 == 1;
            if sign_plus {
                acc += &table[(m - g1) as usize];
            } else {
                acc -= &table[(m - g1) as usize];
            }
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                if sign_plus {
                    acc += &table[(m - g2) as usize];
                } else {
                    acc -= &table[(m - g2) as usize];
                }
            }
            k += 1;
        }
        table.push(acc);
    }
    table[n].clone()
}

/// Rising factorial s(s+1)...(s+len-1) as a big integer.
pub fn rising_factorial(s: u64, len: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..len {
        acc *= BigInt::from(s + i);
    }
    acc
}

/// Factorial n! as a big integer.
pub fn factorial(n: u64) -> BigInt {
    rising_factorial(1, n)
}
