//! Exact verification engine for q-series identities.
//!
//! The crate verifies, to an explicit truncation order, identities that equate
//! character-twisted Lambert series with eta-quotient products, and
//! cross-checks the limiting constants (Dirichlet L-values such as
//! beta(3) = pi^3/32) in high-precision arithmetic.
//!
//! Module map:
//!
//! - [`arith`] - big rationals, Kronecker symbols, twisted divisor sums,
//!   Bernoulli/Euler/partition numbers
//! - [`series`] - truncated formal power series over exact rationals
//! - [`qforms`] - q-Pochhammer products, eta quotients, Lambert-type sums
//! - [`registry`] - the identity catalog and the coefficientwise verifier
//! - [`etasolve`] - recovers eta-quotient exponents from a target series
//! - [`numerics`] - fixed-point big-float evaluation: L-values via
//!   Euler-Maclaurin, closed forms, q->1 limit tables
//! - [`dsl`] - the small expression language used by the CLI and registry files
//!
//! All series equalities are checked for the coefficients of `q^0..q^(N-1)`
//! only; a passing check is evidence to order `N`, never a proof.

pub mod arith;
pub mod dsl;
pub mod etasolve;
pub mod numerics;
pub mod qforms;
pub mod registry;
pub mod series;

pub use arith::{KroneckerChar, Rational};
pub use qforms::{EtaQuotient, LambertSpec};
pub use registry::{Expr, IdentityEntry};
pub use series::Series;
