//! Legendre expansions: fractional integrals of P_n, coefficient engines,
//! series evaluation and the H¹ projection.

mod coeff;
mod fracint;
mod series;

pub use coeff::{
    coeff_absx, coeff_closed_model, coeff_quadrature, coefficient, expand, Strategy, ENDPOINT_BOUNDARY_TERMS,
    EXPAND_TOL,
};
pub use fracint::{
    frac_int_legendre, frac_int_legendre_bound, frac_int_legendre_integer, frac_int_legendre_minus1,
    FracIntLegendreQuery, IntegralSide,
};
pub use series::{h1_projection_coeffs, partial_sum_eval, LegendreSeries, Provenance};
