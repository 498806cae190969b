use crate::error::{domain, Result};
use crate::quad::{integrate, Estimate, QuadOptions, Singularity};
use crate::specfun::gamma::{gamma_unchecked, lgamma};

use super::Side;

/// Riemann–Liouville integral of order `rho` of `f` at `x`, anchored at `a`
/// (left side) or `b` (right side). `rho = 0` is the identity.
pub fn rl_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rho: f64, x: f64, side: Side) -> Result<f64> {
    Ok(rl_integral_with(f, a, b, rho, x, side, &[], &QuadOptions::default())?.value)
}

/// As [`rl_integral`], with the algebraic singularities of `f` and quadrature
/// options spelled out.
pub fn rl_integral_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rho: f64,
    x: f64,
    side: Side,
    singularities: &[Singularity],
    opts: &QuadOptions,
) -> Result<Estimate> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(domain(format!("fractional order must be >= 0, got {rho}")));
    }
    if !(a < b) {
        return Err(domain(format!("interval [{a}, {b}] is empty")));
    }
    let inside = match side {
        Side::Left => x > a && x <= b,
        Side::Right => x >= a && x < b,
    };
    if !inside {
        return Err(domain(format!("x = {x} outside the admissible range for [{a}, {b}]")));
    }
    if rho == 0.0 {
        return Ok(Estimate { value: f(x), error: 0.0 });
    }
    let (lo, hi, kernel) = match side {
        Side::Left => (a, x, Singularity::new(x, rho - 1.0, 0.0)),
        Side::Right => (x, b, Singularity::new(x, 0.0, rho - 1.0)),
    };
    let mut sing: Vec<Singularity> = singularities.to_vec();
    sing.push(kernel);
    let est = integrate(|y| f(y) * (x - y).abs().powf(rho - 1.0), lo, hi, &sing, opts)?;
    let g = gamma_unchecked(rho);
    Ok(Estimate { value: est.value / g, error: est.error / g })
}

/// Closed form of the Riemann–Liouville integral of a power of the distance to
/// the anchor: Γ(η+1)/Γ(η+ρ+1) d^{η+ρ}.
pub fn rl_power_closed(anchor: f64, eta: f64, rho: f64, x: f64, side: Side) -> Result<f64> {
    if !(eta > -1.0) {
        return Err(domain(format!("power exponent must exceed -1, got {eta}")));
    }
    if !(rho >= 0.0) {
        return Err(domain(format!("fractional order must be >= 0, got {rho}")));
    }
    let d = match side {
        Side::Left => x - anchor,
        Side::Right => anchor - x,
    };
    if d < 0.0 {
        return Err(domain(format!("x = {x} lies on the wrong side of the anchor {anchor}")));
    }
    if rho == 0.0 {
        return Ok(d.powf(eta));
    }
    Ok((lgamma(eta + 1.0) - lgamma(eta + rho + 1.0)).exp() * d.powf(eta + rho))
}
