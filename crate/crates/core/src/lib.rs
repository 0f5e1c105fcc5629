//! Exact computations for the Ising model with competing ternary (J) and
//! binary (J₁) interactions on the order-2 Cayley tree: boundary-field
//! recursion fixed points, the (θ, θ₁) phase diagram, exact finite-volume
//! Gibbs measures with Kolmogorov consistency checks, zero-temperature
//! scans, and the commensurability arithmetic that determines the von
//! Neumann factor types (III_δ / III₁ / II₁) of the translation-invariant
//! states.
//!
//! Everything here is closed-form or exact enumeration; iterative solvers
//! appear only as independent cross-check oracles.

pub mod error;
pub mod factor;
pub mod gibbs;
pub mod model;
pub mod recursion;
pub mod tree;

mod util;

pub use error::{Error, Result};
