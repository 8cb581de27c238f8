use alloc::collections::BTreeMap;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{PolyError, Rational, UniPoly};

/// Sparse polynomial in two commuting variables `x`, `y`.
///
/// Keys are exponent pairs `(i, j)` for `x^i y^j`. Zero coefficients are
/// never stored, so two polynomials are equal iff their term maps are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `c x^i y^j`.
    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((i, j), c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    /// Embeds a univariate polynomial in `x`.
    pub fn from_uni_x(p: &UniPoly) -> Self {
        let mut out = Self::zero();
        for (i, c) in p.coeffs().iter().enumerate() {
            out.add_term((i as u32, 0), c.clone());
        }
        out
    }

    fn add_term(&mut self, key: (u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero();
        for (&k, c) in &self.terms {
            out.add_term(k, c * s);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn try_pow(&self, e: i64) -> Result<Self, PolyError> {
        let e = u32::try_from(e).map_err(|_| PolyError::NegativeExponent(e))?;
        Ok(self.pow(e))
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (&(i, j), c)| {
            acc + c * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize)
        })
    }

    /// Coefficient of `y^j` as a polynomial in `x`.
    pub fn coeff_of_y(&self, j: u32) -> UniPoly {
        let deg = self.terms.keys().filter(|k| k.1 == j).map(|k| k.0).max();
        match deg {
            None => UniPoly::zero(),
            Some(d) => UniPoly::new((0..=d).map(|i| self.coeff(i, j)).collect()),
        }
    }

    /// Largest exponent of `y` present.
    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// First term (in key order) where `self` and `other` differ, with both
    /// coefficients.
    pub fn first_difference(&self, other: &BiPoly) -> Option<((u32, u32), Rational, Rational)> {
        let diff = self - other;
        diff.terms.keys().next().map(|&k| (k, self.coeff(k.0, k.1), other.coeff(k.0, k.1)))
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            if i > 0 {
                write!(f, "x^{i}")?;
            }
            if j > 0 {
                write!(f, "y^{j}")?;
            }
        }
        Ok(())
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, -c.clone());
        }
        out
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), a * b);
            }
        }
        out
    }
}

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Add for BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: BiPoly) -> BiPoly {
        &self + &rhs
    }
}

impl Sub for BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: BiPoly) -> BiPoly {
        &self - &rhs
    }
}

impl Mul for BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: BiPoly) -> BiPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::super::int;
    use super::*;

    #[test]
    fn zero_annihilates() {
        let p = &BiPoly::x() + &BiPoly::y();
        assert!((&p * &BiPoly::zero()).is_zero());
    }

    #[test]
    fn cancellation_leaves_no_stored_zero() {
        let p = &BiPoly::x() - &BiPoly::x();
        assert!(p.is_zero());
        assert_eq!(p, BiPoly::zero());
    }

    #[test]
    fn binomial_square() {
        let s = (&BiPoly::x() + &BiPoly::y()).pow(2);
        assert_eq!(s.coeff(1, 1), int(2));
        assert_eq!(s.len(), 3);
        assert_eq!(s.eval(&int(2), &int(3)), int(25));
    }

    #[test]
    fn coefficient_extraction() {
        // (1 + x) y^2 + 3
        let p = &(&BiPoly::one() + &BiPoly::x()) * &BiPoly::y().pow(2) + BiPoly::constant(int(3));
        assert_eq!(p.coeff_of_y(2), UniPoly::from_ints(&[1, 1]));
        assert_eq!(p.coeff_of_y(0), UniPoly::from_ints(&[3]));
        assert_eq!(p.degree_y(), Some(2));
    }
}
