//! Frobenius-method analysis of the radial eigenvalue equation
//!
//! ```text
//! F''(ρ) + [W + (1/4 − γ²)/ρ² − ρ² − a/ρ − bρ] F(ρ) = 0
//! ```
//!
//! * [`exact`]: closed-form spectrum of the pure oscillator `a = b = 0`.
//! * [`conditional`]: polynomial solutions that exist only on the algebraic
//!   curves `c_{n+1}(a, b) = 0`.
//! * [`oracle`]: independent finite-volume eigensolver and Hellmann-Feynman checks.
//! * [`models`]: physical models reducing to the canonical form, and
//!   checks of closed-form energy claims made for them.
//!
//! Recurrences are generic over [`Scalar`] so they run in `f64`, `f32` or
//! exact [`Rational`] arithmetic.

pub mod conditional;
pub mod error;
pub mod exact;
pub mod models;
pub mod oracle;
pub mod poly;
pub mod radial;
pub mod scalar;
pub mod tridiag;

pub use error::{Error, Result};
pub use radial::{count_nodes, exponent, ode_residual, GridFunction, PolynomialSolution, RadialProblem};
pub use scalar::{parse_rational, Rational, Scalar};

/// Double-precision problem.
pub type Problem = RadialProblem<f64>;
/// Problem with exact rational parameters.
pub type ExactProblem = RadialProblem<Rational>;
/// Double-precision candidate solution.
pub type Solution = PolynomialSolution<f64>;
/// Candidate solution with exact rational coefficients.
pub type ExactSolution = PolynomialSolution<Rational>;
/// `c_{n+1}(a)` with exact rational coefficients.
pub type ExactCoefficientPolynomial = conditional::CoefficientPolynomial<Rational>;
