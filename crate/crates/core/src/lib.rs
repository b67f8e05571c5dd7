//! Poisson, Poincaré and normal approximation bounds for random variables
//! whose size-biased versions satisfy relaxed monotone couplings, together
//! with exact and Monte Carlo oracles for checking them.

pub mod bounds;
pub mod cli;
pub mod coupling;
pub mod dist;
pub mod error;
pub mod models;
pub mod normal_approx;
pub mod poincare;
pub mod report;
pub mod stein;

pub use error::{Error, Result};
