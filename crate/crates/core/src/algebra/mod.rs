//! Exact monomial and polynomial arithmetic over the rationals under the
//! graded reverse lexicographic order.

mod exponent;
mod polynomial;

pub use exponent::{variable_names, Exponent};
pub use polynomial::{poly_add_scaled, poly_normalize, Binomial, Polynomial, Term};

/// Arbitrary-precision rational coefficient, always in lowest terms.
pub type Rational = num_rational::BigRational;

use std::cmp::Ordering;

use crate::error::Result;

pub fn grevlex_compare(a: &Exponent, b: &Exponent) -> Result<Ordering> {
    a.grevlex_cmp(b)
}

pub fn monomial_divides(a: &Exponent, b: &Exponent) -> Result<bool> {
    a.divides(b)
}

pub fn monomial_lcm(a: &Exponent, b: &Exponent) -> Result<Exponent> {
    a.lcm(b)
}

#[cfg(test)]
pub(crate) use polynomial::tests as test_util;
