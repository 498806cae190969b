//! Legendre expansions of functions with algebraic singularities.
//!
//! The crate computes Legendre coefficients of singular functions through exact
//! fractional-integral identities, evaluates a-priori error bounds for the
//! truncated expansions, and measures the actual errors to check them.

// `!(x > a)` guards are written that way so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod fraccalc;
pub mod harness;
pub mod legexp;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};

/// Version of this crate, recorded in machine-readable outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
