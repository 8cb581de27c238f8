#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod exactpoly;
pub mod functionals;
pub mod expr;
pub mod identities;
pub mod invariants;
pub mod jet;
pub mod linalg;
pub mod quad;
pub mod geometry;
