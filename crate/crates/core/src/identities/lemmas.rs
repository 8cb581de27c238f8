use num_traits::One;

use super::{IdentityError, IdentityName};
use crate::exactpoly::{binomial, int, BiPoly, Rational};

/// Outcome of one symbolic identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: IdentityName,
    pub k: u32,
    pub pass: bool,
    pub lhs: BiPoly,
    pub rhs: BiPoly,
    /// First monomial `(i, j)` where the sides differ, with the left and
    /// right coefficients.
    pub counterexample: Option<((u32, u32), Rational, Rational)>,
}

fn signed_binomial(k: u32, i: u32) -> Rational {
    let b = binomial(k + 1, i + 1);
    if i % 2 == 0 {
        b
    } else {
        -b
    }
}

fn a1_sides(k: u32) -> (BiPoly, BiPoly) {
    let one_minus_x = &BiPoly::one() - &BiPoly::x();
    let one_minus_y = &BiPoly::one() - &BiPoly::y();
    let pow_x: alloc::vec::Vec<BiPoly> = (0..=k).map(|p| one_minus_x.pow(p)).collect();
    let pow_y: alloc::vec::Vec<BiPoly> = (0..=k).map(|p| one_minus_y.pow(p)).collect();
    let mut lhs = BiPoly::zero();
    for i in 0..=k {
        let mut inner = BiPoly::zero();
        for p in 0..=i {
            inner = &inner + &(&pow_x[p as usize] * &pow_y[(i - p) as usize]);
        }
        lhs = &lhs + &inner.scale(&signed_binomial(k, i));
    }
    let mut rhs = BiPoly::zero();
    for i in 0..=k {
        rhs = &rhs + &BiPoly::monomial(Rational::one(), k - i, i);
    }
    (lhs, rhs)
}

fn a2_sides(k: u32) -> (BiPoly, BiPoly) {
    let one_plus_x = &BiPoly::one() + &BiPoly::x();
    let mut lhs = BiPoly::zero();
    let mut partial = BiPoly::zero();
    for i in 0..=k {
        partial = &partial + &one_plus_x.pow(i);
        lhs = &lhs + &partial.scale(&signed_binomial(k, i));
    }
    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
    (lhs, BiPoly::monomial(sign, k, 0))
}

fn blemma_sides(k: u32) -> (BiPoly, BiPoly) {
    // n is the second variable.
    let n = BiPoly::y();
    let one_minus_x = &BiPoly::one() - &BiPoly::x();
    let mut lhs = BiPoly::zero();
    for i in 0..=k {
        let n_minus_i = &n - &BiPoly::constant(int(i64::from(i)));
        let b_i = -(&n_minus_i * &(&BiPoly::one() - &one_minus_x.pow(i + 1)));
        lhs = &lhs + &b_i.scale(&signed_binomial(k, i));
    }
    let n_minus_k = &n - &BiPoly::constant(int(i64::from(k)));
    let rhs = -(&n_minus_k * &BiPoly::x().pow(k + 1))
        - BiPoly::monomial(int(i64::from(k) + 1), k, 0);
    (lhs, rhs)
}

fn x1_sides(k: u32) -> (BiPoly, BiPoly) {
    let r_minus_w = &BiPoly::x() - &BiPoly::y();
    let mut lhs = BiPoly::zero();
    for i in 0..k {
        let term = &r_minus_w.pow(k - i - 1) * &BiPoly::y().pow(i);
        lhs = &lhs + &term.scale(&binomial(k + 1, i));
    }
    let mut rhs = BiPoly::zero();
    for i in 1..=k {
        rhs = &rhs + &BiPoly::monomial(int(i64::from(i)), k - i, i - 1);
    }
    (lhs, rhs)
}

/// Both sides of the identity at order `k`, in canonical form.
pub fn identity_sides(name: IdentityName, k: u32) -> Result<(BiPoly, BiPoly), IdentityError> {
    if k == 0 {
        return Err(IdentityError::OrderOutOfRange { name: name.tag(), k, min: 1 });
    }
    Ok(match name {
        IdentityName::A1 => a1_sides(k),
        IdentityName::A2 => a2_sides(k),
        IdentityName::BLemma => blemma_sides(k),
        IdentityName::X1 => x1_sides(k),
    })
}

/// Builds both sides symbolically and compares canonical forms.
pub fn verify_identity(name: IdentityName, k: u32) -> Result<IdentityCheck, IdentityError> {
    let (lhs, rhs) = identity_sides(name, k)?;
    let counterexample = lhs.first_difference(&rhs);
    Ok(IdentityCheck { name, k, pass: counterexample.is_none(), lhs, rhs, counterexample })
}
