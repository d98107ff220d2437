//! Simulation and numerical verification of windings of planar isotropic
//! stable processes.
//!
//! The crate is organised bottom-up:
//!
//! * [`samplers`] – reproducible random streams and exact samplers for the
//!   one-sided and symmetric stable laws.
//! * [`quadrature`] – adaptive Gauss–Kronrod integration.
//! * [`stats`] – special functions, Kolmogorov–Smirnov statistics and
//!   bootstrap moment estimates.
//! * [`stable_process`] – planar stable (and Brownian) paths started at `1`,
//!   their winding series, the clock `H`, its inverse `A` and cone exit times.
//! * [`levy_angular`] – the Lévy measure of the planar process, the Lévy
//!   density of the time-changed angle `ρ`, the constants that drive the
//!   limit theorems and a direct simulator for `ρ`.
//! * [`experiments`] – config-driven Monte Carlo suites producing
//!   pass/fail reports.
//! * [`cli`] – the `windings` command line front end.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod levy_angular;
pub mod quadrature;
pub mod samplers;
pub mod stable_process;
pub mod stats;

pub use error::{Error, Result};
