//! The identity catalog and the coefficientwise verifier.
//!
//! Each catalog entry stores two independent expression trees - typically a
//! Lambert-type sum on one side and an eta-quotient product on the other -
//! and the verifier expands both with exact arithmetic and compares every
//! coefficient up to the requested order. Entries are never pre-simplified,
//! so a verification run exercises both construction routes.

mod builtin;
mod userfile;

pub use builtin::builtin_registry;
pub use userfile::{load_user_registry, UserRegistryError};

use num_traits::One;
use thiserror::Error;

use crate::arith::{KroneckerChar, Rational};
use crate::qforms::{
    divisor_series, lambert_cubic, lambert_general, lambert_square, pochhammer, LambertSpec,
    QformsError,
};
use crate::series::{Series, SeriesError};

/// Expression tree over the q-form builders. Leaves construct series
/// directly; `Mul`, `Div`, `PowInt` and `Sub` combine them. `Sub` exists for
/// sums written as an explicit difference of two Lambert shapes and is not
/// part of the text DSL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// (q^c; q^b)_inf
    Poch { c: usize, b: usize },
    /// (q^d; q^d)_inf, shorthand for Poch { c: d, b: d }
    Eta { d: usize },
    /// Twisted divisor-sum series for the character (top|.) at this weight.
    DivSer { top: i64, weight: u32 },
    /// Character-twisted Lambert series with cubic denominator.
    LambertCubic { top: i64 },
    /// Character-twisted Lambert series with square denominator.
    LambertSquare { top: i64 },
    /// General Lambert-type sum.
    LambertGen(LambertSpec),
    /// Constant integer series.
    IntConst(i64),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, i64),
    Sub(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
    #[error("q-form error: {0}")]
    Qforms(#[from] QformsError),
    #[error("invalid Kronecker top in expression: {0}")]
    Arith(#[from] crate::arith::ArithError),
}

/// Evaluation strategy for [`Expr::eval_with`]. The two strategies must
/// agree on every verdict; the naive one inverts at each `Div`, the factored
/// one collects net exponents across the product structure and inverts once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    Factored,
}

impl Expr {
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, e: i64) -> Expr {
        Expr::PowInt(Box::new(a), e)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    /// Evaluates with the default (naive) strategy.
    pub fn eval(&self, order: usize) -> Result<Series, EvalError> {
        self.eval_with(order, Strategy::Naive)
    }

    pub fn eval_with(&self, order: usize, strategy: Strategy) -> Result<Series, EvalError> {
        match strategy {
            Strategy::Naive => self.eval_naive(order),
            Strategy::Factored => self.eval_factored(order),
        }
    }

    fn eval_leaf(&self, order: usize) -> Result<Series, EvalError> {
        Ok(match self {
            Expr::Poch { c, b } => pochhammer(*c, *b, order),
            Expr::Eta { d } => pochhammer(*d, *d, order),
            Expr::DivSer { top, weight } => {
                divisor_series(&KroneckerChar::new(*top)?, *weight, order)
            }
            Expr::LambertCubic { top } => lambert_cubic(&KroneckerChar::new(*top)?, order),
            Expr::LambertSquare { top } => lambert_square(&KroneckerChar::new(*top)?, order),
            Expr::LambertGen(spec) => lambert_general(spec, order)?,
            Expr::IntConst(n) => Series::constant(crate::arith::rat_int(*n), order),
            _ => unreachable!("eval_leaf called on a non-leaf node"),
        })
    }

    fn eval_naive(&self, order: usize) -> Result<Series, EvalError> {
        match self {
            Expr::Mul(a, b) => Ok(a.eval_naive(order)?.mul(&b.eval_naive(order)?)),
            Expr::Div(a, b) => {
                let denom = b.eval_naive(order)?.inverse()?;
                Ok(a.eval_naive(order)?.mul(&denom))
            }
            Expr::PowInt(a, e) => Ok(a.eval_naive(order)?.pow_int(*e)?),
            Expr::Sub(a, b) => Ok(a.eval_naive(order)?.sub(&b.eval_naive(order)?)),
            leaf => leaf.eval_leaf(order),
        }
    }

    /// Exponent-bookkeeping evaluation: flattens Mul/Div/PowInt into a list
    /// of (factor, net exponent) pairs, multiplies all positive powers into
    /// a numerator and all negative powers into a denominator, and performs
    /// a single inversion.
    fn eval_factored(&self, order: usize) -> Result<Series, EvalError> {
        let mut factors: Vec<(&Expr, i64)> = Vec::new();
        fn collect<'a>(e: &'a Expr, exp: i64, out: &mut Vec<(&'a Expr, i64)>) {
            match e {
                Expr::Mul(a, b) => {
                    collect(a, exp, out);
                    collect(b, exp, out);
                }
                Expr::Div(a, b) => {
                    collect(a, exp, out);
                    collect(b, -exp, out);
                }
                Expr::PowInt(a, k) => collect(a, exp * k, out),
                other => out.push((other, exp)),
            }
        }
        collect(self, 1, &mut factors);
        let mut numer = Series::one(order);
        let mut denom = Series::one(order);
        for (factor, exp) in factors {
            if exp == 0 {
                continue;
            }
            // Sub nodes nested inside a product are evaluated recursively
            // with the same strategy below them.
            let base = match factor {
                Expr::Sub(a, b) => a.eval_factored(order)?.sub(&b.eval_factored(order)?),
                leaf => leaf.eval_leaf(order)?,
            };
            if exp > 0 {
                numer = numer.mul(&base.pow_int(exp)?);
            } else {
                denom = denom.mul(&base.pow_int(-exp)?);
            }
        }
        Ok(numer.mul(&denom.inverse()?))
    }
}

/// A closed-form constant of the shape (coefficient) * pi^power / sqrt(d),
/// exact data evaluated numerically by the numerics module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiExpr {
    pub coefficient: Rational,
    pub pi_power: u32,
    /// d in the 1/sqrt(d) factor; 1 when absent.
    pub sqrt_divisor: u64,
}

impl PiExpr {
    pub fn new(num: i64, den: i64, pi_power: u32, sqrt_divisor: u64) -> Self {
        Self {
            coefficient: crate::arith::rat(num, den),
            pi_power,
            sqrt_divisor,
        }
    }
}

impl std::fmt::Display for PiExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.coefficient)?;
        if self.pi_power == 1 {
            write!(f, "*pi")?;
        } else if self.pi_power > 1 {
            write!(f, "*pi^{}", self.pi_power)?;
        }
        if self.sqrt_divisor != 1 {
            write!(f, "/sqrt({})", self.sqrt_divisor)?;
        }
        Ok(())
    }
}

/// q -> 1 limit metadata: (1-q)^weight times the identity's value tends to
/// the given constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitMeta {
    pub weight: u32,
    pub constant: PiExpr,
}

/// A named identity: two expression trees asserted equal as q-series, plus
/// the source attribution and optional limit metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityEntry {
    pub id: String,
    pub lhs: Expr,
    pub rhs: Expr,
    pub citation: String,
    pub limit_meta: Option<LimitMeta>,
}

/// Outcome of a coefficientwise comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Verified,
    Mismatch {
        index: usize,
        lhs: Rational,
        rhs: Rational,
    },
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified)
    }
}

/// Expands both sides of the entry at the given order with exact arithmetic
/// and compares all coefficients; the first differing index is reported with
/// both values. Also asserts the project-wide invariant that registry series
/// are integral with unit constant term.
pub fn verify(entry: &IdentityEntry, order: usize) -> Result<Verification, EvalError> {
    verify_with(entry, order, Strategy::Naive)
}

pub fn verify_with(
    entry: &IdentityEntry,
    order: usize,
    strategy: Strategy,
) -> Result<Verification, EvalError> {
    assert!(order >= 1);
    let lhs = entry.lhs.eval_with(order, strategy)?;
    let rhs = entry.rhs.eval_with(order, strategy)?;
    debug_assert!(
        lhs.is_integral() && rhs.is_integral(),
        "registry series must have integer coefficients"
    );
    debug_assert!(
        lhs.coefficient(0).unwrap().is_one() && rhs.coefficient(0).unwrap().is_one(),
        "registry series must have unit constant term"
    );
    match lhs.first_mismatch(&rhs) {
        None => Ok(Verification::Verified),
        Some(index) => Ok(Verification::Mismatch {
            index,
            lhs: lhs.coefficient(index).unwrap().clone(),
            rhs: rhs.coefficient(index).unwrap().clone(),
        }),
    }
}

/// Outcome of a partition-congruence scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CongruenceCheck {
    Verified,
    Counterexample { n: usize, value: num_bigint::BigInt },
}

impl CongruenceCheck {
    pub fn is_verified(&self) -> bool {
        matches!(self, CongruenceCheck::Verified)
    }
}

/// Checks p(modulus * n + residue) = 0 (mod modulus) for n = 0 .. count-1.
pub fn check_partition_congruence(modulus: u64, residue: u64, count: usize) -> CongruenceCheck {
    assert!(modulus >= 2, "congruence modulus must be at least 2");
    assert!(residue < modulus, "residue must lie below the modulus");
    assert!(count >= 1);
    use num_traits::Zero;
    for n in 0..count {
        let p = crate::arith::partition(modulus as usize * n + residue as usize);
        if !(&p % num_bigint::BigInt::from(modulus)).is_zero() {
            return CongruenceCheck::Counterexample { n, value: p };
        }
    }
    CongruenceCheck::Verified
}

/// Convenience: looks up an entry by id in a slice.
pub fn lookup<'a>(entries: &'a [IdentityEntry], id: &str) -> Option<&'a IdentityEntry> {
    entries.iter().find(|e| e.id == id)
}

/// Expression + limit metadata pairs that are limit checks in their own
/// right without being series identities; the even/odd Pochhammer quotient
/// whose scaled q -> 1 limit is pi/2 (the Wallis product in q-form) lives
/// here under the id "eq11".
pub fn auxiliary_limits() -> Vec<(String, Expr, LimitMeta)> {
    vec![(
        "eq11".to_string(),
        Expr::div(
            Expr::pow(Expr::Poch { c: 2, b: 2 }, 2),
            Expr::pow(Expr::Poch { c: 1, b: 2 }, 2),
        ),
        LimitMeta {
            weight: 1,
            constant: PiExpr::new(1, 2, 1, 1),
        },
    )]
}
