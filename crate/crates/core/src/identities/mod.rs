//! Exact checks of the combinatorial identities behind the energy-functional
//! formulas, and of the positivity lemma used for the Ricci lower bound.
//!
//! Everything here is rational arithmetic on [`BiPoly`]/[`UniPoly`]; a check
//! passes exactly when two canonical forms coincide or a sign is certified.

mod appendix;
mod lemmas;

use core::fmt;

pub use appendix::{
    appendix_report, claim3_verify, remark_asymptotic, theorem2_coefficients, AppendixReport,
    Claim1Exception, Claim3Certificate, CoefficientCertificate, RemarkValues, Theorem2Coefficients,
};
pub use lemmas::{identity_sides, verify_identity, IdentityCheck};

/// The four polynomial identities checked symbolically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityName {
    /// Alternating binomial sum of `(1-x)^p (1-y)^(i-p)` equals `sum x^(k-i) y^i`.
    A1,
    /// Alternating binomial sum of `(1+x)^p` equals `(-x)^k`.
    A2,
    /// `sum (-1)^i C(k+1,i+1) B_i = -(n-k)x^(k+1) - (k+1)x^k` with
    /// `B_i = -(n-i)(1-(1-x)^(i+1))`, `n` symbolic (stored as `y`).
    BLemma,
    /// `sum_{i<k} C(k+1,i)(r-w)^(k-i-1) w^i = sum_{i=1}^k i r^(k-i) w^(i-1)`,
    /// `r` stored as `x`, `w` as `y`.
    X1,
}

impl IdentityName {
    pub const ALL: [IdentityName; 4] =
        [IdentityName::A1, IdentityName::A2, IdentityName::BLemma, IdentityName::X1];

    pub fn tag(self) -> &'static str {
        match self {
            IdentityName::A1 => "a1",
            IdentityName::A2 => "a2",
            IdentityName::BLemma => "b-lemma",
            IdentityName::X1 => "x1",
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityError {
    /// Order outside the identity's stated range.
    OrderOutOfRange { name: &'static str, k: u32, min: u32 },
}

impl fmt::Display for IdentityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentityError::OrderOutOfRange { name, k, min } => {
                write!(f, "{name}: order k={k} is below the minimum {min}")
            }
        }
    }
}

impl core::error::Error for IdentityError {}
