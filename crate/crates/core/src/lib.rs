//! Simulation, blow-up certificates and lower bounds for damped
//! piezoelectric beams with magnetic effects and nonlinear sources.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certificates;
pub mod cli;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod model;
pub mod series;
pub mod verification;

pub use error::{Error, Result};
