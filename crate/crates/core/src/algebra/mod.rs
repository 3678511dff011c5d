//! Exact scalars, sparse polynomials, exact and modular linear algebra, PIT.

pub mod matrix;
pub mod modular;
pub mod monomial;
pub mod pit;
pub mod poly;
pub mod scalar;

pub use matrix::{DependencyInfo, ExactMatrix, Label};
pub use monomial::{monomials_grlex, ExponentVector, Monomial};
pub use pit::{zero_test_circuit, zero_test_poly, Verdict};
pub use poly::{PolyRing, SparsePoly};
pub use scalar::{fmt_rational, parse_rational, rat, BigScalar, Fp, PrimeField, Rationals, Ring, DEFAULT_PRIME};
