//! Scenario files, reports and the command-line driver for the checks in
//! `ekverify-core`.

pub mod cli;
pub mod formula;
pub mod report;
pub mod scenario;
pub mod suite;
