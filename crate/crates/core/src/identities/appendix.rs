//! Positivity of the derivatives of `P(x) = x^m + 2x^(m-1) + ... + (m+1)` at
//! `x = -2/m`, the auxiliary claims used to prove it, and the coefficients
//! `a_i` of the Ricci lower-bound expansion.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::IdentityError;
use crate::exactpoly::{binomial, int, rat, BiPoly, Rational, UniPoly};

/// The polynomial `sum_{j=0}^m (m+1-j) x^j`.
pub fn lemma_polynomial(m: u32) -> UniPoly {
    UniPoly::new((0..=m).map(|j| int(i64::from(m + 1 - j))).collect())
}

/// A pair `(i, p)` where the strict inequality `A_p(-2/m) > 0` fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim1Exception {
    pub i: u32,
    pub p: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendixReport {
    pub m: u32,
    /// `P^(i)(-2/m)` for `i = 0..=m`.
    pub values: Vec<Rational>,
    pub all_nonneg: bool,
    pub penultimate_zero: bool,
    pub claim1_pass: bool,
    pub claim1_pairs: usize,
    pub claim1_exceptions: Vec<Claim1Exception>,
    /// `None` when `m < 5`, where the claim does not apply.
    pub claim5_pass: Option<bool>,
}

/// `P^(i)(-2/m)` for every order, in exact arithmetic.
///
/// Uses `P^(i)(x) = sum_p (m+1-i-p) (i+p)!/p! x^p` and clears the
/// denominator `m^(m-i)` so the sum is a single big integer.
pub fn derivative_values(m: u32) -> Vec<Rational> {
    let mm = BigInt::from(m);
    let mut pow_m = vec![BigInt::one(); m as usize + 1];
    for e in 1..=m as usize {
        pow_m[e] = &pow_m[e - 1] * &mm;
    }
    (0..=m)
        .map(|i| {
            let top = m - i;
            let mut fall = factorial_int(i); // (i+p)!/p! at p = 0
            let mut two = BigInt::one(); // (-2)^p
            let mut sum = BigInt::zero();
            for p in 0..=top {
                let c = BigInt::from(m + 1 - i - p);
                sum += c * &fall * &two * &pow_m[(top - p) as usize];
                fall = fall * BigInt::from(i + p + 1) / BigInt::from(p + 1);
                two *= -2;
            }
            Rational::new(sum, pow_m[top as usize].clone())
        })
        .collect()
}

fn factorial_int(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `A_p(x) / i!` evaluated exactly, with
/// `A_p(x) = (m-i+1-2p) a(2p,i) x^(2p) + (m-i-2p) a(2p+1,i) x^(2p+1)` and
/// `a(q, i) / i! = C(i+q, q)`.
pub fn a_term_over_factorial(m: u32, i: u32, p: u32, x: &Rational) -> Rational {
    let (m, i, p) = (i64::from(m), i64::from(i), i64::from(p));
    let c0 = int(m - i + 1 - 2 * p) * binomial((i + 2 * p) as u32, (2 * p) as u32);
    let c1 = int(m - i - 2 * p) * binomial((i + 2 * p + 1) as u32, (2 * p + 1) as u32);
    let x2p = num_traits::pow(x.clone(), (2 * p) as usize);
    &c0 * &x2p + &c1 * &x2p * x
}

/// Sign test for `A_p(-2/m) > 0` after dividing by the positive factor
/// `a(2p,i) (2/m)^(2p) / ((2p+1) m)`.
fn claim1_holds(m: u32, i: u32, p: u32) -> bool {
    let (m, i, p) = (i128::from(m), i128::from(i), i128::from(p));
    (m - i + 1 - 2 * p) * (2 * p + 1) * m - 2 * (m - i - 2 * p) * (i + 2 * p + 1) > 0
}

fn claim5_holds(m: u32, values: &[Rational]) -> bool {
    let mu = m as usize;
    let nonneg = values[mu - 4..=mu - 2].iter().all(|v| !v.is_negative());
    // Lower-bound chain for i = m - 4, scaled by 6/i!.
    let i = m - 4;
    let scaled = &values[i as usize] * int(6) / crate::exactpoly::factorial(i);
    let mr = int(i64::from(m));
    let m1 = &mr - int(1);
    let m2 = &mr - int(2);
    let m3 = &mr - int(3);
    let base = int(30) - int(48) * &m3 / &mr;
    let bound1 = &base + int(36) * &m2 * &m3 / (&mr * &mr)
        - int(16) * &m1 * &m2 * &m3 / (&mr * &mr * &mr);
    let bound2 = &base + int(20) * &m2 * &m3 / (&mr * &mr);
    let closed = (int(2) * &mr * &mr + int(44) * &mr + int(120)) / (&mr * &mr);
    nonneg && scaled >= bound1 && bound1 >= bound2 && bound2 == closed && closed.is_positive()
}

/// Exact derivative values of the lemma polynomial at `-2/m` together with
/// the claims used in its proof.
pub fn appendix_report(m: u32) -> AppendixReport {
    assert!(m >= 1, "appendix_report requires m >= 1");
    let values = derivative_values(m);
    let all_nonneg = values.iter().all(|v| !v.is_negative());
    let penultimate_zero = values[m as usize - 1].is_zero();
    let mut claim1_exceptions = Vec::new();
    let mut claim1_pairs = 0;
    for i in 0..m.saturating_sub(1) {
        for p in 1..=(m - i - 1) / 2 {
            claim1_pairs += 1;
            if !claim1_holds(m, i, p) {
                claim1_exceptions.push(Claim1Exception { i, p });
            }
        }
    }
    let claim5_pass = (m >= 5).then(|| claim5_holds(m, &values));
    AppendixReport {
        m,
        values,
        all_nonneg,
        penultimate_zero,
        claim1_pass: claim1_exceptions.is_empty(),
        claim1_pairs,
        claim1_exceptions,
        claim5_pass,
    }
}

/// Nonnegativity certificate for one `ε`-coefficient on `(1/2, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientCertificate {
    pub eps_power: u32,
    pub poly: UniPoly,
    pub roots_in_open_interval: usize,
    pub at_half: Rational,
    pub at_one: Rational,
    pub nonneg: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim3Certificate {
    pub expansion_matches: bool,
    pub coefficients: Vec<CoefficientCertificate>,
    /// Number of `(m, i)` pairs where the scaled six-term sum was checked
    /// against `8m` times the `(y, ε)` polynomial.
    pub spot_checks: usize,
    pub spot_checks_pass: bool,
    pub pass: bool,
}

/// `y` is stored as the first `BiPoly` variable and `ε` as the second.
fn claim3_product_form() -> BiPoly {
    let y = BiPoly::x();
    let e = BiPoly::y();
    let one = BiPoly::one();
    let c = |v: i64| BiPoly::constant(int(v));
    let one_minus_y_plus = |k: i64| &(&one - &y) + &(&c(k) * &e);
    let y_minus = |k: i64| &y - &(&c(k) * &e);
    let t1 = &(&(&(&one_minus_y_plus(2) * &y_minus(1)) * &y_minus(2)) * &y_minus(3)) * &y_minus(4);
    let t2 = &(&(&one_minus_y_plus(3) * &y_minus(2)) * &y_minus(3)) * &y_minus(4);
    let t3 = &(&one_minus_y_plus(4) * &y_minus(3)) * &y_minus(4);
    let t4 = &one_minus_y_plus(5) * &y_minus(4);
    let t5 = one_minus_y_plus(6);
    &(&(&(&(&c(6) * &t1) - &(&c(20) * &t2)) + &(&c(30) * &t3)) - &(&c(30) * &t4)) + &(&c(15) * &t5)
}

/// The displayed `ε`-polynomial, coefficient lists in `y` by power of `ε`.
const DISPLAYED: [&[i64]; 6] = [
    &[15, -45, 60, -50, 26, -6],
    &[210, -480, 510, -300, 72],
    &[960, -1720, 1270, -330],
    &[1920, -2340, 720],
    &[1584, -744],
    &[288],
];

fn claim3_displayed() -> BiPoly {
    let mut out = BiPoly::zero();
    for (j, coeffs) in DISPLAYED.iter().enumerate() {
        for (i, &c) in coeffs.iter().enumerate() {
            out = &out + &BiPoly::monomial(int(c), i as u32, j as u32);
        }
    }
    out
}

/// `(120/i!)(A_0 + A_1 + A_2)(-2/m)` written as the six-term sum, and the
/// reduced quantity `A` obtained by dropping the smaller leading term.
fn six_term_and_reduced(m: u32, i: u32) -> (Rational, Rational) {
    let mr = int(i64::from(m));
    let ir = int(i64::from(i));
    let prod = |lo: i64, hi: i64| (lo..=hi).fold(int(1), |acc, t| acc * (&ir + int(t)));
    let mp = |e: u32| num_traits::pow(mr.clone(), e as usize);
    let d = |k: i64| &mr - &ir - int(k);
    let t5 = int(32) * d(4) * prod(1, 5) / mp(5);
    let t4 = int(80) * d(3) * prod(1, 4) / mp(4);
    let t3 = int(160) * d(2) * prod(1, 3) / mp(3);
    let t2 = int(240) * d(1) * prod(1, 2) / mp(2);
    let t1 = int(240) * d(0) * prod(1, 1) / mp(1);
    let t0 = int(120) * d(-1);
    let six = -&t5 + &t4 - &t3 + &t2 - &t1 + &t0;
    let reduced = int(48) * d(3) * prod(1, 4) / mp(4) - &t3 + &t2 - &t1 + &t0;
    (six, reduced)
}

/// Symbolic re-expansion of the `(y, ε)` form and interval positivity of
/// each `ε`-coefficient on `(1/2, 1]`.
pub fn claim3_verify() -> Claim3Certificate {
    let product = claim3_product_form();
    let displayed = claim3_displayed();
    let expansion_matches = product == displayed;

    let half = rat(1, 2);
    let one = int(1);
    let mid = rat(3, 4);
    let coefficients: Vec<CoefficientCertificate> = (0..=5)
        .map(|j| {
            let poly = displayed.coeff_of_y(j);
            let roots = poly.sturm_root_count(&half, &one, false).unwrap_or(usize::MAX);
            let at_half = poly.eval(&half);
            let at_one = poly.eval(&one);
            let nonneg = roots == 0
                && !at_half.is_negative()
                && !at_one.is_negative()
                && poly.eval(&mid).is_positive();
            CoefficientCertificate { eps_power: j, poly, roots_in_open_interval: roots, at_half, at_one, nonneg }
        })
        .collect();

    // Tie the (y, ε) polynomial back to the (m, i) quantities it encodes.
    let mut spot_checks = 0;
    let mut spot_checks_pass = true;
    for m in 11..=40u32 {
        for i in (m / 2 + 1)..=(m - 5) {
            spot_checks += 1;
            let x = rat(-2, i64::from(m));
            let direct = (0..=2).fold(Rational::zero(), |acc, p| acc + a_term_over_factorial(m, i, p, &x))
                * int(120);
            let (six, reduced) = six_term_and_reduced(m, i);
            let y = rat(i64::from(i) + 5, i64::from(m));
            let eps = rat(1, i64::from(m));
            let poly_side = int(8) * int(i64::from(m)) * displayed.eval(&y, &eps);
            spot_checks_pass &= direct == six && six > reduced && reduced == poly_side && reduced.is_positive();
        }
    }

    let pass = expansion_matches && spot_checks_pass && coefficients.iter().all(|c| c.nonneg);
    Claim3Certificate { expansion_matches, coefficients, spot_checks, spot_checks_pass, pass }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem2Coefficients {
    pub k: u32,
    /// `a_2, ..., a_k`.
    pub coeffs: Vec<Rational>,
    pub all_nonneg: bool,
    /// Exact re-expansion around `-2/(k-1)` reproduces `sum i x^(k-i)`.
    pub reconstruction_ok: bool,
}

/// Taylor coefficients `a_i = P^(k-i)(-2/(k-1)) / (k-i)!` of
/// `P(x) = sum_{i=1}^k i x^(k-i)`.
pub fn theorem2_coefficients(k: u32) -> Result<Theorem2Coefficients, IdentityError> {
    if k < 2 {
        return Err(IdentityError::OrderOutOfRange { name: "theorem2", k, min: 2 });
    }
    let p = lemma_polynomial(k - 1);
    let center = rat(-2, i64::from(k) - 1);
    let coeffs: Vec<Rational> = (2..=k)
        .map(|i| {
            crate::exactpoly::poly_derivative_eval(&p, k - i, &center)
                / crate::exactpoly::factorial(k - i)
        })
        .collect();
    let shift = UniPoly::new(vec![-center.clone(), int(1)]); // x + 2/(k-1)
    let mut rebuilt = shift.pow(k - 1);
    for (idx, a) in coeffs.iter().enumerate() {
        let i = idx as u32 + 2;
        rebuilt = &rebuilt + &shift.pow(k - i).scale(a);
    }
    Ok(Theorem2Coefficients {
        k,
        all_nonneg: coeffs.iter().all(|a| !a.is_negative()),
        reconstruction_ok: rebuilt == p,
        coeffs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemarkValues {
    /// `lim (6/i!)(A_0 + A_1)(-2/m) / m` along `i = 9m/10`.
    pub exact_limit: Rational,
    /// `(m, (6/i!)(A_0 + A_1)(-2/m) / m)` for `m = 10, 100, 1000`.
    pub finite_m_values: Vec<(u32, Rational)>,
    /// The finite values agree with the displayed four-term expression.
    pub displayed_form_agrees: bool,
}

pub fn remark_asymptotic() -> RemarkValues {
    let y = rat(9, 10);
    let g = UniPoly::from_ints(&[6, -12, 12, -8]);
    let exact_limit = (int(1) - &y) * g.eval(&y);
    let mut displayed_form_agrees = true;
    let finite_m_values = [10u32, 100, 1000]
        .into_iter()
        .map(|m| {
            let i = 9 * m / 10;
            let x = rat(-2, i64::from(m));
            let v = (a_term_over_factorial(m, i, 0, &x) + a_term_over_factorial(m, i, 1, &x)) * int(6);
            let (mr, ir) = (int(i64::from(m)), int(i64::from(i)));
            let d = |k: i64| &mr - &ir - int(k);
            let prod = |hi: i64| (1..=hi).fold(int(1), |acc, t| acc * (&ir + int(t)));
            let displayed = -(d(2) * prod(3) * int(8) / (&mr * &mr * &mr))
                + d(1) * prod(2) * int(12) / (&mr * &mr)
                - d(0) * prod(1) * int(12) / &mr
                + int(6) * d(-1);
            displayed_form_agrees &= displayed == v;
            (m, v / int(i64::from(m)))
        })
        .collect();
    RemarkValues { exact_limit, finite_m_values, displayed_form_agrees }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::poly_derivative_eval;

    #[test]
    fn m_two_values() {
        let r = appendix_report(2);
        assert_eq!(r.values, vec![int(2), int(0), int(2)]);
        assert!(r.all_nonneg && r.penultimate_zero);
        assert_eq!(r.claim5_pass, None);
    }

    #[test]
    fn m_one_values() {
        let r = appendix_report(1);
        assert_eq!(r.values, vec![int(0), int(1)]);
        assert!(r.all_nonneg && r.penultimate_zero);
    }

    #[test]
    fn fast_values_match_generic_derivative_route() {
        for m in 1u32..=25 {
            let p = lemma_polynomial(m);
            let at = rat(-2, i64::from(m));
            let slow: Vec<Rational> = (0..=m).map(|i| poly_derivative_eval(&p, i, &at)).collect();
            assert_eq!(derivative_values(m), slow, "m={m}");
        }
    }

    #[test]
    fn claim1_sign_reduction_matches_full_evaluation() {
        for m in 1u32..=30 {
            let x = rat(-2, i64::from(m));
            for i in 0..m.saturating_sub(1) {
                for p in 1..=(m - i - 1) / 2 {
                    let full = a_term_over_factorial(m, i, p, &x).is_positive();
                    assert_eq!(full, claim1_holds(m, i, p), "m={m} i={i} p={p}");
                }
            }
        }
    }

    #[test]
    fn a_term_sum_is_the_derivative() {
        // For even m - i, P^(i) = a(m-i,i) x^(m-i) + sum A_p; for odd, sum A_p.
        for m in 3..=20 {
            let x = rat(-2, i64::from(m));
            let vals = derivative_values(m);
            for i in 0..=m {
                let top = m - i;
                let half = if top % 2 == 0 { top / 2 } else { (top + 1) / 2 };
                let mut s = (0..half).fold(Rational::zero(), |acc, p| acc + a_term_over_factorial(m, i, p, &x));
                if top % 2 == 0 {
                    s += binomial(m, top) * num_traits::pow(x.clone(), top as usize);
                }
                assert_eq!(s * crate::exactpoly::factorial(i), vals[i as usize], "m={m} i={i}");
            }
        }
    }

    #[test]
    fn claim3_values() {
        let c = claim3_verify();
        assert!(c.expansion_matches);
        assert_eq!(c.coefficients[0].at_one, int(0));
        assert_eq!(c.coefficients[4].at_one, int(840));
        assert!(c.spot_checks > 100 && c.spot_checks_pass);
        assert!(c.pass);
    }

    #[test]
    fn theorem2_small_orders() {
        assert_eq!(theorem2_coefficients(2).unwrap().coeffs, vec![int(0)]);
        let t3 = theorem2_coefficients(3).unwrap();
        assert_eq!(t3.coeffs, vec![int(0), int(2)]);
        assert!(t3.reconstruction_ok);
        let t11 = theorem2_coefficients(11).unwrap();
        assert!(t11.all_nonneg && t11.reconstruction_ok);
        assert!(theorem2_coefficients(1).is_err());
    }

    #[test]
    fn remark_limit_and_finite_values() {
        let r = remark_asymptotic();
        assert_eq!(r.exact_limit, rat(-57, 625));
        assert!(r.displayed_form_agrees);
        assert_eq!(r.finite_m_values[0], (10, rat(132, 125)));
        assert_eq!(r.finite_m_values[1], (100, rat(-40821, 1_562_500)));
        assert_eq!(r.finite_m_values[2], (1000, rat(-2_658_250_947, 31_250_000_000)));
    }
}
