//! Long strange segments and ruin probabilities for infinite moving
//! averages `X_n = Σ_i φ_i Z_{n−i}` with short or long memory.
//!
//! The crate simulates truncated moving-average paths, measures the
//! length of long strange segments and ruin probabilities by Monte Carlo
//! (plain and exponentially tilted), and evaluates the large-deviation
//! rate functions and limiting constants the simulations are compared to.

pub mod error;
pub mod limits;
pub mod model;
pub mod numeric;
pub mod ratefn;
pub mod ruin;
pub mod segments;
pub mod simulate;

pub use error::{Error, Result};
