//! Invalidation dynamics of discursive networks.
//!
//! [`model`] holds the closed-form equilibria, convergence rates, agent-count
//! planning and information measures. [`sim`] is a seeded Monte Carlo
//! simulator of the same single- and dual-network processes, used to check
//! the closed forms and to regenerate ensemble curves.

pub mod error;
pub mod model;
pub mod sim;

pub use error::{ModelError, Result};
