//! Weighted Chebyshev polynomials on a union of real intervals.

pub mod asymptotics;
pub mod cli;
pub mod domain;
pub mod error;
pub mod inversion;
pub mod json;
pub mod l2_bridge;
pub mod ortho;
pub mod poly;
pub mod potential;
pub mod quad;
pub mod remez;
pub mod szego;

pub use domain::IntervalSystem;
pub use error::{Error, Result};
