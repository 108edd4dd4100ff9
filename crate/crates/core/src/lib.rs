//! Tests of "no treatment effect" hypotheses for two-treatment comparative
//! experiments, framed with potential outcomes.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`experiment`]: potential-outcome tables, samples, assignments and the
//!   observed-data view, plus the hypothesis lattice.
//! - [`designs`]: assignment and selection distributions, support
//!   enumeration, seeded sampling.
//! - [`stats`]: the weighted difference statistic, ranks, standard errors
//!   and the special functions behind asymptotic p-values.
//! - [`procedures`]: process-, randomization- and selection-based tests with
//!   exact, Monte Carlo and asymptotic p-value engines.
//! - [`simulation`]: the size/power harness over census populations.
//!
//! File formats, the CLI and thread-parallel simulation live in the
//! `randcompare` crate.

#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod datasets;
pub mod designs;
mod error;
pub mod experiment;
pub mod procedures;
pub mod simulation;
pub mod stats;

pub use error::{Error, Result};
