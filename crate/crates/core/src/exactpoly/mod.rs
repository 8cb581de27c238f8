//! Exact rational arithmetic and canonical-form polynomials.
//!
//! [`UniPoly`] is dense in one variable, [`BiPoly`] is sparse in two. Both
//! keep a canonical representation (no trailing or stored zeros), so derived
//! `PartialEq` is polynomial equality. Coefficients are [`Rational`] and no
//! floating point is used anywhere in this module.

mod bi;
mod uni;

use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use bi::BiPoly;
pub use uni::UniPoly;

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// `num / den` as a reduced [`Rational`]. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a [`Rational`].
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Binomial coefficient `C(n, k)` as an exact rational; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Rational::from_integer(acc)
}

/// `m!` as an exact rational.
pub fn factorial(m: u32) -> Rational {
    let mut acc = BigInt::one();
    for j in 2..=m {
        acc *= BigInt::from(j);
    }
    Rational::from_integer(acc)
}

/// The product `(lo + 1)(lo + 2)···(lo + count)`; empty product is 1.
pub fn rising_product(lo: u32, count: u32) -> Rational {
    let mut acc = BigInt::one();
    for j in 1..=count {
        acc *= BigInt::from(lo + j);
    }
    Rational::from_integer(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// `pow` called with a negative exponent.
    NegativeExponent(i64),
    /// Operation undefined for the zero polynomial.
    ZeroPolynomial,
    /// Root-count interval with `lo >= hi`.
    EmptyInterval,
    /// Exact division by the zero polynomial.
    DivisionByZero,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::NegativeExponent(e) => write!(f, "negative exponent {e} in pow"),
            PolyError::ZeroPolynomial => f.write_str("operation undefined for the zero polynomial"),
            PolyError::EmptyInterval => f.write_str("interval lower bound must be below upper bound"),
            PolyError::DivisionByZero => f.write_str("polynomial division by zero"),
        }
    }
}

impl core::error::Error for PolyError {}

/// Exact value of the `order`-th derivative of `p` at `at`.
///
/// Orders beyond the degree give zero.
pub fn poly_derivative_eval(p: &UniPoly, order: u32, at: &Rational) -> Rational {
    p.nth_derivative(order).eval(at)
}

/// Number of distinct real roots of `p` in `(lo, hi)`, or `(lo, hi]` when
/// `include_hi` is set.
pub fn sturm_root_count(
    p: &UniPoly,
    lo: &Rational,
    hi: &Rational,
    include_hi: bool,
) -> Result<usize, PolyError> {
    p.sturm_root_count(lo, hi, include_hi)
}
