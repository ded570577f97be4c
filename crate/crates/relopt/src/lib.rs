//! Optimal impulse-release planning for seasonal bistable population
//! replacement.
//!
//! The library models the proportion p(t) of an introduced type whose
//! uncontrolled dynamics p' = f(t, p) is time-periodic and bistable, with
//! releases acting through a weight g(p) / K(t). It computes the periodic
//! solutions that separate the basins of 0 and 1, the release-cost
//! potential G (antiderivative of 1/g), the minimal-cost curve
//! K(t) G(p_M(t)) and its minimizer, finite-release-rate thresholds and
//! their convergence to the impulse limit, and restricted bounded-rate
//! pulse plans. A two-compartment competition model instantiates the
//! scalar equation and validates the reduction numerically.
//!
//! Start with the runnable programs under `examples/`; each one exercises
//! a single capability end to end. A thin batch CLI (`relopt`) drives the
//! same computations from a config file and writes CSV/SVG/JSON artifacts.

pub mod dynamics;
pub mod cli;
pub mod error;
pub mod export;
pub mod integrate;
pub mod numerics;
mod solver;

pub mod optimize;
pub mod periodic;
pub mod release;

pub use error::{Error, Result};
