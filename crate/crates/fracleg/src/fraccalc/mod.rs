//! Riemann–Liouville integrals, Caputo derivatives, the fractional Taylor
//! formula, boundary limits and total variation.

mod bv;
mod caputo;
mod function;
mod rl;

pub use bv::{boundary_limit, rs_integral, total_variation, BVSamples, BoundaryLimit, Jump, StieltjesMeasure};
pub(crate) use caputo::finite_difference;
pub use caputo::{
    caputo_derivative, caputo_derivative_with, caputo_limit, caputo_total_variation, endpoint_caputo_series,
    fractional_taylor_expand, EndpointSeries, TaylorParts, MAX_SERIES_TERMS,
};
pub use function::{falling, BlackBox, Evaluator, Location, Modulator, RegularityProfile, Side, SingularFunction};
pub use rl::{rl_integral, rl_integral_with, rl_power_closed};
