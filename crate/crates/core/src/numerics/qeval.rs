//! Numeric evaluation of registry expressions at a rational q in (0, 1).
//!
//! Each leaf is summed or multiplied until a certified tail bound drops
//! below 2^-tail_pow:
//!
//! - Pochhammer products: the log of the neglected factors is bounded by
//!   the geometric sum of the remaining exponents.
//! - Twisted divisor-sum series: |coefficient(m)| <= m^(w+1), so the tail
//!   is eventually dominated by a geometric series.
//! - Lambert sums: every term is bounded by C q^(e(k)) with e(k) increasing,
//!   again giving a geometric tail.
//!
//! Stop decisions compare f64 estimates of log2 bounds with a safety margin
//! of a few bits; the accumulation itself stays in fixed point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{twisted_divisor_sum, KroneckerChar, Rational};
use crate::qforms::LambertSpec;
use crate::registry::Expr;

use super::bigfloat::BigFloat;

#[derive(Debug, Error)]
pub enum QEvalError {
    #[error("numeric evaluation requires q strictly inside (0, 1)")]
    QOutOfRange,
    #[error("invalid character: {0}")]
    Character(#[from] crate::arith::ArithError),
    #[error("invalid Lambert spec: {0}")]
    Qforms(#[from] crate::qforms::QformsError),
    #[error("division by a numerically zero value")]
    DivisionByZero,
    #[error("scaled-limit evaluation requires a pure product of Pochhammer factors")]
    NotAProduct,
}

/// Safety margin, in bits, applied to every f64 log2 stop decision.
const DECISION_MARGIN: f64 = 6.0;

pub struct QContext {
    /// Fixed-point image of q at `work` bits.
    q: BigFloat,
    /// log2(q), negative.
    log2_q: f64,
    work: u32,
    /// Leaf truncation tails are kept below 2^-tail_pow in absolute value.
    tail_pow: u32,
}

impl QContext {
    /// `bits` is the precision the caller wants certified; evaluation runs
    /// at bits + 48 internally and leaf tails are cut at 2^-(bits + 8).
    pub fn new(q: &Rational, bits: u32) -> Result<Self, QEvalError> {
        if !q.is_positive() || *q >= Rational::from_integer(BigInt::one()) {
            return Err(QEvalError::QOutOfRange);
        }
        let work = bits + 48;
        let qf = BigFloat::from_rational(q, work);
        let num = q.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
        let den = q.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
        Ok(Self {
            q: qf,
            log2_q: (num.log2() - den.log2()).min(-f64::EPSILON),
            work,
            tail_pow: bits + 8,
        })
    }

    pub fn work_bits(&self) -> u32 {
        self.work
    }

    fn q_pow(&self, e: u64) -> BigFloat {
        // Repeated squaring on the u64 exponent.
        let mut acc: Option<BigFloat> = None;
        let mut base = self.q.clone();
        let mut e = e;
        if e == 0 {
            return BigFloat::one(self.work);
        }
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

    /// Upper estimate of log2 |v|.
    fn log2_of(&self, v: &BigFloat) -> f64 {
        if v.is_zero() {
            return f64::NEG_INFINITY;
        }
        v.mantissa().bits() as f64 - self.work as f64
    }

    /// Numeric (q^c; q^b)_inf: multiply factors until the neglected ones
    /// change the product by less than 2^-tail_pow relatively (the product
    /// itself lies in (0, 1], so absolutely as well).
    pub fn poch(&self, c: usize, b: usize) -> BigFloat {
        let mut value = BigFloat::one(self.work);
        let q_b = self.q_pow(b as u64);
        let mut q_e = self.q_pow(c as u64);
        let mut e = c as f64;
        // Tail: -log2(remaining product) <= 2 * q^e / (1 - q^b) once the
        // factors are below 1/2; cut when q^e / (1 - q^b) is small enough.
        let log2_gap = {
            // log2(1 - q^b) from f64; q^b < 1 always.
            let qb = (b as f64 * self.log2_q).exp2();
            (1.0 - qb).log2()
        };
        loop {
            if e * self.log2_q - log2_gap + 1.0 + DECISION_MARGIN < -(self.tail_pow as f64) {
                break;
            }
            value = value.mul(&BigFloat::one(self.work).sub(&q_e));
            q_e = q_e.mul(&q_b);
            e += b as f64;
        }
        value
    }

    /// Numeric twisted divisor-sum series: sum_m tds(m) q^(m-1) with the
    /// exact integer coefficients.
    pub fn divisor_series(&self, chi: &KroneckerChar, weight: u32) -> BigFloat {
        let mut acc = BigFloat::zero(self.work);
        let mut q_pow = BigFloat::one(self.work); // q^(m-1)
        let mut m = 1u64;
        loop {
            let c = twisted_divisor_sum(m, chi, weight);
            if !c.is_zero() {
                acc = acc.add(&q_pow.mul(&BigFloat::from_mantissa(
                    c << self.work,
                    self.work,
                )));
            }
            // Tail from m+1: coefficients bounded by k^(w+1); ratio
            // ((k+1)/k)^(w+1) q is below 1 once k is moderate.
            let k = (m + 1) as f64;
            let ratio_log2 = (weight as f64 + 1.0) * ((k + 1.0) / k).log2() + self.log2_q;
            if ratio_log2 < -0.01 {
                let bound_log2 = (weight as f64 + 1.0) * k.log2()
                    + (k - 1.0) * self.log2_q
                    - (1.0 - ratio_log2.exp2()).log2();
                if bound_log2 + DECISION_MARGIN < -(self.tail_pow as f64) {
                    break;
                }
            }
            q_pow = q_pow.mul(&self.q);
            m += 1;
        }
        acc
    }

    /// Numeric character-twisted Lambert sum
    /// sum_n chi(n) q^(n-1) numer(q^n) / (1-q^n)^r with numer(x) = 1 + x for
    /// the cubic (r = 3) shape and numer(x) = 1 for the square (r = 2).
    pub fn lambert_chi(&self, chi: &KroneckerChar, r: u32) -> BigFloat {
        let with_one_plus = r == 3;
        let one = BigFloat::one(self.work);
        let mut acc = BigFloat::zero(self.work);
        let mut q_nm1 = BigFloat::one(self.work); // q^(n-1)
        let mut n = 1u64;
        // |term| <= 2 q^(n-1) / (1-q)^r; geometric tail with ratio q.
        let log2_1mq = {
            let q = self.log2_q.exp2();
            (1.0 - q).log2()
        };
        loop {
            let bound_log2 =
                (n as f64 - 1.0) * self.log2_q + 1.0 - (r as f64) * log2_1mq - log2_1mq;
            if bound_log2 + DECISION_MARGIN < -(self.tail_pow as f64) {
                break;
            }
            let c = chi.eval(n);
            if c != 0 {
                let q_n = q_nm1.mul(&self.q);
                let numer = if with_one_plus {
                    q_nm1.mul(&one.add(&q_n))
                } else {
                    q_nm1.clone()
                };
                let denom = one.sub(&q_n).powi(r);
                let term = numer.div(&denom);
                acc = if c > 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            q_nm1 = q_nm1.mul(&self.q);
            n += 1;
        }
        acc
    }

    /// Numeric general Lambert sum per its spec, with incremental powers
    /// q^(e(k)) and x_k = q^(mk+t).
    pub fn lambert_spec(&self, spec: &LambertSpec) -> Result<BigFloat, QEvalError> {
        spec.validate()?;
        let one = BigFloat::one(self.work);
        let m = spec.denom_step as u64;
        let t = spec.denom_offset as u64;
        let r = spec.denom_power;
        // C = sum |P_i| / (1 - q^t)^r bounds every term's non-q^e(k) part.
        let p_abs: i64 = spec.numerator.iter().map(|p| p.abs()).sum();
        let log2_c = {
            let qt = (t as f64 * self.log2_q).exp2();
            (p_abs as f64).log2() - (r as f64) * (1.0 - qt).log2()
        };

        let mut acc = BigFloat::zero(self.work);
        // Incremental q^(e(k)): e(k+1) - e(k) = A k + (A+B)/2.
        let mut q_e = self.q_pow(spec.exponent(0) as u64);
        let step_const = self.q_pow(((spec.quad + spec.lin) / 2) as u64);
        let q_a = self.q_pow(spec.quad as u64);
        let mut q_ak = BigFloat::one(self.work); // q^(A k)
        let mut x = self.q_pow(t); // q^(m k + t)
        let q_m = self.q_pow(m);
        let mut k = 0usize;
        loop {
            // Tail bound from this k on: C q^(e(k)) / (1 - q^(delta_k)),
            // delta_k = e(k+1) - e(k) >= B/2 >= 1 for valid specs.
            let delta = (spec.quad * k as i64 + (spec.quad + spec.lin) / 2).max(1) as f64;
            let log2_tail = self.log2_of(&q_e) + log2_c
                - (1.0 - (delta * self.log2_q).exp2()).log2();
            if log2_tail + DECISION_MARGIN < -(self.tail_pow as f64) {
                break;
            }
            // P(x) by Horner.
            let mut poly = BigFloat::zero(self.work);
            for &p in spec.numerator.iter().rev() {
                poly = poly.mul(&x).add(&BigFloat::from_int(p, self.work));
            }
            let denom = one.sub(&x).powi(r);
            let term = q_e.mul(&poly).div(&denom);
            let sign = spec.signs[k % spec.signs.len()];
            acc = if sign > 0 { acc.add(&term) } else { acc.sub(&term) };

            q_e = q_e.mul(&q_ak).mul(&step_const);
            q_ak = q_ak.mul(&q_a);
            x = x.mul(&q_m);
            k += 1;
        }
        Ok(acc)
    }

    /// ln (q^c; q^b)_inf by the rearrangement
    /// ln prod (1 - q^(c+kb)) = -sum_{j>=1} q^(jc) / (j (1 - q^(jb))).
    ///
    /// Near q = 1 the product itself underflows any fixed-point format
    /// (it is exponentially small in 1/(1-q)) while its logarithm stays
    /// moderate, so scaled-limit evaluation works in log space.
    pub fn poch_ln(&self, c: usize, b: usize) -> BigFloat {
        let one = BigFloat::one(self.work);
        let q_c = self.q_pow(c as u64);
        let q_b = self.q_pow(b as u64);
        let mut q_jc = q_c.clone();
        let mut q_jb = q_b.clone();
        let mut acc = BigFloat::zero(self.work);
        // Tail after j terms is at most q^((j+1)c) / ((j+1)(1-q^b)(1-q^c)).
        let log2_gap = {
            let qb = (b as f64 * self.log2_q).exp2();
            let qc = (c as f64 * self.log2_q).exp2();
            (1.0 - qb).log2() + (1.0 - qc).log2()
        };
        let mut j = 1i64;
        loop {
            let term = if q_jb.is_zero() {
                q_jc.div_int(j)
            } else {
                q_jc.div(&one.sub(&q_jb)).div_int(j)
            };
            acc = acc.sub(&term);
            let tail_log2 = (j + 1) as f64 * (c as f64) * self.log2_q - log2_gap;
            if tail_log2 + DECISION_MARGIN < -(self.tail_pow as f64) {
                break;
            }
            q_jc = q_jc.mul(&q_c);
            if !q_jb.is_zero() {
                q_jb = q_jb.mul(&q_b);
            }
            j += 1;
        }
        acc
    }

    /// ln of a pure product expression (Mul/Div/PowInt over Pochhammer and
    /// positive integer leaves). This is the evaluation route for scaled
    /// q -> 1 limits; non-product leaves are rejected.
    pub fn eval_product_ln(&self, expr: &Expr) -> Result<BigFloat, QEvalError> {
        let mut factors: Vec<(&Expr, i64)> = Vec::new();
        fn collect<'a>(
            e: &'a Expr,
            exp: i64,
            out: &mut Vec<(&'a Expr, i64)>,
        ) -> Result<(), QEvalError> {
            match e {
                Expr::Mul(a, b) => {
                    collect(a, exp, out)?;
                    collect(b, exp, out)?;
                }
                Expr::Div(a, b) => {
                    collect(a, exp, out)?;
                    collect(b, -exp, out)?;
                }
                Expr::PowInt(a, k) => collect(a, exp * k, out)?,
                leaf @ (Expr::Poch { .. } | Expr::Eta { .. } | Expr::IntConst(_)) => {
                    out.push((leaf, exp))
                }
                _ => return Err(QEvalError::NotAProduct),
            }
            Ok(())
        }
        collect(expr, 1, &mut factors)?;
        let mut acc = BigFloat::zero(self.work);
        for (leaf, exp) in factors {
            if exp == 0 {
                continue;
            }
            let ln_leaf = match leaf {
                Expr::Poch { c, b } => self.poch_ln(*c, *b),
                Expr::Eta { d } => self.poch_ln(*d, *d),
                Expr::IntConst(n) if *n > 0 => BigFloat::from_int(*n, self.work).ln(),
                _ => return Err(QEvalError::NotAProduct),
            };
            acc = acc.add(&ln_leaf.mul_int(exp));
        }
        Ok(acc)
    }

    /// Recursive numeric evaluation of an expression tree.
    pub fn eval(&self, expr: &Expr) -> Result<BigFloat, QEvalError> {
        Ok(match expr {
            Expr::Poch { c, b } => self.poch(*c, *b),
            Expr::Eta { d } => self.poch(*d, *d),
            Expr::DivSer { top, weight } => {
                self.divisor_series(&KroneckerChar::new(*top)?, *weight)
            }
            Expr::LambertCubic { top } => self.lambert_chi(&KroneckerChar::new(*top)?, 3),
            Expr::LambertSquare { top } => self.lambert_chi(&KroneckerChar::new(*top)?, 2),
            Expr::LambertGen(spec) => self.lambert_spec(spec)?,
            Expr::IntConst(n) => BigFloat::from_int(*n, self.work),
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            Expr::Div(a, b) => {
                let den = self.eval(b)?;
                if den.is_zero() {
                    return Err(QEvalError::DivisionByZero);
                }
                self.eval(a)?.div(&den)
            }
            Expr::PowInt(a, e) => {
                let base = self.eval(a)?;
                if *e >= 0 {
                    base.powi(*e as u32)
                } else {
                    if base.is_zero() {
                        return Err(QEvalError::DivisionByZero);
                    }
                    base.powi((-e) as u32).recip()
                }
            }
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?),
        })
    }
}

/// One row of a q -> 1 limit table: the scaled value (1-q)^w * expr(q)
/// against the target constant.
#[derive(Debug, Clone)]
pub struct LimitRow {
    pub q: Rational,
    pub scaled: BigFloat,
    pub target: BigFloat,
    pub abs_err: BigFloat,
}

/// Evaluates (1-q)^weight * expr(q) for each q and tabulates proximity to
/// the target constant. The table reports the trend; it asserts nothing.
///
/// The product and the scale factor are combined in log space: near q = 1
/// the unscaled product is exponentially large while every Pochhammer
/// factor is exponentially small, and only their combination is moderate.
pub fn limit_table(
    expr: &Expr,
    weight: u32,
    target: &crate::registry::PiExpr,
    q_list: &[Rational],
    bits: u32,
) -> Result<Vec<LimitRow>, QEvalError> {
    let target_value = super::pi_expr_value(target, bits);
    let mut rows = Vec::with_capacity(q_list.len());
    for q in q_list {
        let ctx = QContext::new(q, bits)?;
        let ln_value = ctx.eval_product_ln(expr)?;
        let one_minus_q = Rational::from_integer(BigInt::one()) - q;
        let ln_scale = BigFloat::from_rational(&one_minus_q, ctx.work_bits())
            .ln()
            .mul_int(weight as i64);
        let scaled = ln_value.add(&ln_scale).exp().to_bits(bits);
        rows.push(LimitRow {
            q: q.clone(),
            scaled: scaled.clone(),
            target: target_value.clone(),
            abs_err: scaled.abs_diff(&target_value),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::registry::{builtin_registry, lookup};

    #[test]
    fn rejects_q_out_of_range() {
        assert!(QContext::new(&rat(1, 1), 64).is_err());
        assert!(QContext::new(&rat(0, 1), 64).is_err());
        assert!(QContext::new(&rat(-1, 2), 64).is_err());
        assert!(QContext::new(&rat(3, 2), 64).is_err());
    }

    #[test]
    fn poch_matches_truncated_series_evaluation() {
        // At q = 1/2 the series expansion evaluated at q agrees with the
        // numeric product.
        let q = rat(1, 2);
        let bits = 128;
        let ctx = QContext::new(&q, bits).unwrap();
        let numeric = ctx.poch(1, 2);
        let series = crate::qforms::pochhammer(1, 2, 200);
        let mut horner = BigFloat::zero(ctx.work_bits());
        let qf = BigFloat::from_rational(&q, ctx.work_bits());
        for c in series.coeffs().iter().rev() {
            horner = horner.mul(&qf).add(&BigFloat::from_rational(c, ctx.work_bits()));
        }
        assert!(numeric.abs_diff(&horner).abs_below_pow2(bits - 10));
    }

    #[test]
    fn q_to_zero_limit_of_lambert_is_one() {
        let ctx = QContext::new(&rat(1, 1000), 96).unwrap();
        let entries = builtin_registry();
        let beta3 = lookup(&entries, "beta3_q").unwrap();
        let v = ctx.eval(&beta3.lhs).unwrap();
        // Leading term 1, next correction O(q).
        let one = BigFloat::one(ctx.work_bits());
        assert!(v.abs_diff(&one).abs_below_rational(&rat(1, 200)));
    }

    #[test]
    fn log_route_matches_direct_route_at_moderate_q() {
        let ctx = QContext::new(&rat(2, 5), 128).unwrap();
        let entries = builtin_registry();
        let rhs = &lookup(&entries, "beta3_q").unwrap().rhs;
        let direct = ctx.eval(rhs).unwrap();
        let via_log = ctx.eval_product_ln(rhs).unwrap().exp();
        assert!(direct.abs_diff(&via_log).abs_below_pow2(100));
        // Non-product trees are rejected by the log route.
        let lhs = &lookup(&entries, "beta3_q").unwrap().lhs;
        assert!(matches!(
            ctx.eval_product_ln(lhs),
            Err(QEvalError::NotAProduct)
        ));
    }

    #[test]
    fn identity_sides_agree_numerically_at_half() {
        let ctx = QContext::new(&rat(1, 2), 128).unwrap();
        let entries = builtin_registry();
        for id in ["beta3_q", "ramanujan_beta1_q", "chi12_difference_form"] {
            let e = lookup(&entries, id).unwrap();
            let lhs = ctx.eval(&e.lhs).unwrap();
            let rhs = ctx.eval(&e.rhs).unwrap();
            // 1e-25 < 2^-83
            assert!(lhs.abs_diff(&rhs).abs_below_pow2(83), "{id}");
        }
    }
}
