use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{PolyError, Rational};

/// Dense univariate polynomial over the rationals.
///
/// `coeffs[i]` is the coefficient of `x^i`; the leading coefficient is
/// nonzero, and the zero polynomial has no coefficients at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `x - root`.
    pub fn linear_root(root: &Rational) -> Self {
        Self::new(vec![-root.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, at: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * at + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: u32) -> Self {
        let mut p = self.clone();
        for _ in 0..order {
            if p.is_zero() {
                break;
            }
            p = p.derivative();
        }
        p
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::constant(Rational::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `pow` with a signed exponent; negative exponents are rejected.
    pub fn try_pow(&self, e: i64) -> Result<Self, PolyError> {
        let e = u32::try_from(e).map_err(|_| PolyError::NegativeExponent(e))?;
        Ok(self.pow(e))
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &UniPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(UniPoly::zero(), |acc, c| &(&acc * inner) + &UniPoly::constant(c.clone()))
    }

    /// Euclidean division, `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly), PolyError> {
        let dl = d.leading().ok_or(PolyError::DivisionByZero)?.clone();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let f = r[r.len() - 1].clone() / &dl;
            for (j, c) in d.coeffs.iter().enumerate() {
                r[shift + j] -= &f * c;
            }
            q[shift] = f;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Ok((UniPoly::new(q), UniPoly::new(r)))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn square_free(&self) -> Result<UniPoly, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        Ok(self.div_rem(&g)?.0)
    }

    /// Sign of `p(at)`: -1, 0 or 1.
    pub fn sign_at(&self, at: &Rational) -> i32 {
        let v = self.eval(at);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Standard Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<UniPoly> {
        let mut chain = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]).expect("nonzero chain member");
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        chain
    }

    /// Sign changes of the Sturm chain at `at`, zeros skipped.
    fn sign_variations(chain: &[UniPoly], at: &Rational) -> usize {
        let mut last = 0;
        let mut changes = 0;
        for p in chain {
            let s = p.sign_at(at);
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Distinct real roots in `(lo, hi)`, plus `hi` itself when `include_hi`.
    ///
    /// The count runs on the square-free part with any endpoint roots divided
    /// out, so the open-interval Sturm theorem applies directly.
    pub fn sturm_root_count(
        &self,
        lo: &Rational,
        hi: &Rational,
        include_hi: bool,
    ) -> Result<usize, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if lo >= hi {
            return Err(PolyError::EmptyInterval);
        }
        let mut p = self.square_free()?;
        let mut hi_root = false;
        for (end, is_hi) in [(lo, false), (hi, true)] {
            if p.eval(end).is_zero() {
                p = p.div_rem(&UniPoly::linear_root(end))?.0;
                hi_root |= is_hi;
            }
        }
        let chain = p.sturm_chain();
        let open = Self::sign_variations(&chain, lo) - Self::sign_variations(&chain, hi);
        Ok(open + usize::from(include_hi && hi_root))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: UniPoly) -> UniPoly {
        &self + &rhs
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: UniPoly) -> UniPoly {
        &self - &rhs
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, poly_derivative_eval, rat};
    use super::*;

    #[test]
    fn square_of_one_minus_x() {
        let p = UniPoly::from_ints(&[1, -1]).pow(2);
        assert_eq!(p, UniPoly::from_ints(&[1, -2, 1]));
    }

    #[test]
    fn cube_of_one_minus_x_linear_coefficient() {
        let p = UniPoly::from_ints(&[1, -1]).pow(3);
        assert_eq!(p.coeff(1), int(-3));
    }

    #[test]
    fn negative_exponent_rejected() {
        let p = UniPoly::x();
        assert_eq!(p.try_pow(-1), Err(PolyError::NegativeExponent(-1)));
        assert_eq!(p.try_pow(3).unwrap(), UniPoly::from_ints(&[0, 0, 0, 1]));
    }

    #[test]
    fn derivative_eval_examples() {
        let p = UniPoly::from_ints(&[3, 2, 1]);
        assert_eq!(poly_derivative_eval(&p, 1, &int(-1)), int(0));
        assert_eq!(poly_derivative_eval(&p, 0, &int(-1)), int(2));
        assert_eq!(poly_derivative_eval(&p, 3, &rat(7, 3)), int(0));
    }

    #[test]
    fn compose_matches_substitution() {
        let p = UniPoly::from_ints(&[1, 0, 2]);
        let q = UniPoly::from_ints(&[-1, 3]);
        let c = p.compose(&q);
        for t in [-2, 0, 5] {
            assert_eq!(c.eval(&int(t)), p.eval(&q.eval(&int(t))));
        }
    }

    #[test]
    fn gcd_and_square_free() {
        // (x - 1)^2 (x + 2)
        let p = &UniPoly::from_ints(&[-1, 1]).pow(2) * &UniPoly::from_ints(&[2, 1]);
        let sf = p.square_free().unwrap().monic();
        assert_eq!(sf, UniPoly::from_ints(&[-2, 1, 1]));
        assert_eq!(UniPoly::zero().square_free(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn sturm_examples() {
        let half = rat(1, 2);
        let one = int(1);
        let p = UniPoly::from_ints(&[-1, 0, 1]);
        assert_eq!(p.sturm_root_count(&half, &one, true).unwrap(), 1);
        assert_eq!(p.sturm_root_count(&half, &one, false).unwrap(), 0);
        let q = UniPoly::from_ints(&[1, 0, 1]);
        assert_eq!(q.sturm_root_count(&half, &one, true).unwrap(), 0);
        let lin = UniPoly::from_ints(&[1584, -744]);
        assert_eq!(lin.sturm_root_count(&half, &one, true).unwrap(), 0);
        assert!(lin.eval(&half) > Rational::zero());
    }

    #[test]
    fn sturm_rejects_bad_input() {
        assert_eq!(
            UniPoly::zero().sturm_root_count(&int(0), &int(1), false),
            Err(PolyError::ZeroPolynomial)
        );
        assert_eq!(
            UniPoly::x().sturm_root_count(&int(1), &int(1), false),
            Err(PolyError::EmptyInterval)
        );
    }

    #[test]
    fn sturm_with_repeated_roots_and_lo_root() {
        // (x - 1/2)^3 (x - 3/4)^2 (x - 1): roots 1/2 (excluded lo), 3/4, 1.
        let p = &(&UniPoly::linear_root(&rat(1, 2)).pow(3) * &UniPoly::linear_root(&rat(3, 4)).pow(2))
            * &UniPoly::linear_root(&int(1));
        assert_eq!(p.sturm_root_count(&rat(1, 2), &int(1), true).unwrap(), 2);
        assert_eq!(p.sturm_root_count(&rat(1, 2), &int(1), false).unwrap(), 1);
        assert_eq!(p.sturm_root_count(&int(0), &int(2), false).unwrap(), 3);
    }
}
