//! Recovers eta-quotient exponents for a target series.
//!
//! Taking the logarithmic derivative turns an eta quotient into a linear
//! combination of the log-derivatives of its Pochhammer factors, so the
//! exponents satisfy an exact linear system on the coefficients of q^1..q^T.
//! The system is solved by fraction-free (Bareiss) elimination over the
//! integers after clearing denominators; a unique integral solution is then
//! confirmed by expanding the full product against the target to the entire
//! order, which is the gate against accidental fits on the sampled rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::Rational;
use crate::qforms::{eta_quotient_series, pochhammer, EtaQuotient};
use crate::series::{Series, SeriesError};

/// Rows sampled beyond the number of candidates; extra rows catch fits that
/// only hold on a square system by accident.
pub const SLACK_ROWS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EtasolveError {
    #[error("log derivative requires constant term exactly 1")]
    NonUnitConstant,
    #[error("candidate periods must be ascending, distinct and positive")]
    BadCandidates,
    #[error(
        "target order {order} too small: need at least {needed} \
         (candidates + {SLACK_ROWS} slack rows + 1)"
    )]
    InsufficientOrder { order: usize, needed: usize },
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
}

/// Why a fit failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infeasible {
    /// The linear system is inconsistent, or consistent only with a
    /// non-integral solution (attached for diagnostics).
    NoSolution { rational_solution: Option<Vec<Rational>> },
    /// The candidate columns are linearly dependent on the sampled rows.
    Underdetermined,
    /// The unique integral solution fails full-product verification at the
    /// given index.
    VerificationFailed { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitResult {
    Fitted(EtaQuotient),
    Infeasible(Infeasible),
}

impl FitResult {
    pub fn exponents(&self) -> Option<&EtaQuotient> {
        match self {
            FitResult::Fitted(e) => Some(e),
            FitResult::Infeasible(_) => None,
        }
    }

    /// JSON report: either the exponent mapping with its verified order, or
    /// the infeasibility reason.
    pub fn to_json(&self, order: usize) -> String {
        match self {
            FitResult::Fitted(eta) => format!(
                r#"{{"feasible":true,"exponents":{},"verified_order":{}}}"#,
                eta.to_json(),
                order
            ),
            FitResult::Infeasible(reason) => {
                let (name, detail) = match reason {
                    Infeasible::NoSolution { rational_solution } => (
                        "no-solution",
                        rational_solution.as_ref().map(|v| {
                            let parts: Vec<String> =
                                v.iter().map(|r| format!("\"{r}\"")).collect();
                            format!(r#","rational_solution":[{}]"#, parts.join(","))
                        }),
                    ),
                    Infeasible::Underdetermined => ("underdetermined", None),
                    Infeasible::VerificationFailed { index } => (
                        "verification-failed",
                        Some(format!(r#","first_mismatch_index":{index}"#)),
                    ),
                };
                format!(
                    r#"{{"feasible":false,"reason":"{}"{}}}"#,
                    name,
                    detail.unwrap_or_default()
                )
            }
        }
    }
}

/// q a'(q) / a(q) for a series with constant term 1, exact at every index
/// it returns (the coefficient of q^0 is 0).
pub fn log_derivative(a: &Series) -> Result<Series, EtasolveError> {
    if !a.coefficient(0).map(|c| c.is_one()).unwrap_or(false) {
        return Err(EtasolveError::NonUnitConstant);
    }
    Ok(a.q_derivative().mul(&a.inverse()?))
}

/// Solves the exact linear system A r = b formed from log-derivative
/// coefficients and confirms the solution by full product expansion.
///
/// Column d holds the coefficients q^1..q^T of the log derivative of
/// (q^d; q^d)_inf; b holds the same rows of the target's log derivative;
/// T = |candidates| + SLACK_ROWS.
pub fn fit_eta_quotient(
    target: &Series,
    candidate_periods: &[usize],
) -> Result<FitResult, EtasolveError> {
    let k = candidate_periods.len();
    if k == 0
        || candidate_periods[0] < 1
        || candidate_periods.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(EtasolveError::BadCandidates);
    }
    let order = target.order();
    let rows = k + SLACK_ROWS;
    if order < rows + 1 {
        return Err(EtasolveError::InsufficientOrder {
            order,
            needed: rows + 1,
        });
    }
    let b = log_derivative(target)?;
    let columns: Vec<Series> = candidate_periods
        .iter()
        .map(|&d| log_derivative(&pochhammer(d, d, order)).expect("poch has unit constant"))
        .collect();

    // Augmented integer matrix: clear each row's denominators.
    let mut matrix: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for i in 1..=rows {
        let mut row: Vec<Rational> = columns
            .iter()
            .map(|c| c.coefficient(i).unwrap().clone())
            .collect();
        row.push(b.coefficient(i).unwrap().clone());
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        matrix.push(
            row.into_iter()
                .map(|r| r.numer() * (&lcm / r.denom()))
                .collect(),
        );
    }

    match solve_exact(matrix, k) {
        Solve::Inconsistent => Ok(FitResult::Infeasible(Infeasible::NoSolution {
            rational_solution: None,
        })),
        Solve::RankDeficient => Ok(FitResult::Infeasible(Infeasible::Underdetermined)),
        Solve::Unique(solution) => {
            if solution.iter().any(|r| !r.denom().is_one()) {
                return Ok(FitResult::Infeasible(Infeasible::NoSolution {
                    rational_solution: Some(solution),
                }));
            }
            let exponents: Vec<(usize, i64)> = candidate_periods
                .iter()
                .zip(&solution)
                .map(|(&d, r)| {
                    let n = r.numer();
                    let exp = i64::try_from(n).expect("eta exponents fit in i64");
                    (d, exp)
                })
                .collect();
            let eta = EtaQuotient::new(exponents);
            // Mandatory anti-false-positive gate: the sampled rows only pin
            // finitely many coefficients.
            let expansion = eta_quotient_series(&eta, order);
            match expansion.first_mismatch(target) {
                None => Ok(FitResult::Fitted(eta)),
                Some(index) => Ok(FitResult::Infeasible(Infeasible::VerificationFailed {
                    index,
                })),
            }
        }
    }
}

enum Solve {
    Unique(Vec<Rational>),
    Inconsistent,
    RankDeficient,
}

/// Fraction-free Gaussian elimination (Bareiss) on an integer matrix with
/// `unknowns` coefficient columns plus one augmented column. Every
/// intermediate division in the Bareiss update is exact.
fn solve_exact(mut m: Vec<Vec<BigInt>>, unknowns: usize) -> Solve {
    let rows = m.len();
    let cols = unknowns + 1;
    let mut prev_pivot = BigInt::one();
    let mut rank = 0usize;
    for col in 0..unknowns {
        // Pivot: smallest nonzero entry by magnitude keeps growth down.
        let pivot_row = (rank..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].magnitude().clone());
        let Some(pivot_row) = pivot_row else {
            continue; // structurally dependent column
        };
        m.swap(rank, pivot_row);
        for r in rank + 1..rows {
            for c in 0..cols {
                if c == col {
                    continue;
                }
                let value = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev_pivot;
                m[r][c] = value;
            }
            m[r][col] = BigInt::zero();
        }
        prev_pivot = m[rank][col].clone();
        rank += 1;
    }
    // Inconsistency: a zero coefficient row with nonzero augmented entry.
    for row in m.iter() {
        if row[..unknowns].iter().all(|v| v.is_zero()) && !row[unknowns].is_zero() {
            return Solve::Inconsistent;
        }
    }
    if rank < unknowns {
        return Solve::RankDeficient;
    }
    // Back substitution on the upper-triangular top block, in rationals.
    let mut solution = vec![Rational::zero(); unknowns];
    for i in (0..unknowns).rev() {
        // Find this row's leading column (pivot columns are increasing but
        // may skip when a column was dependent; with rank == unknowns each
        // row i pivots on column i).
        let mut acc = Rational::from_integer(m[i][unknowns].clone());
        for j in i + 1..unknowns {
            acc -= Rational::from_integer(m[i][j].clone()) * &solution[j];
        }
        solution[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Solve::Unique(solution)
}
