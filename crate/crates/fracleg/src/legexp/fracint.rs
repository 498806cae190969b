use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::gamma::{lgamma, sin_pi};
use crate::specfun::poly::{jacobi_recurrence_big, jacobi_recurrence_dd};
use crate::specfun::{jacobi_general_eval, JacobiParams};

/// Which Riemann–Liouville integral of P_n: anchored at x = 1 (I_{1-}) or at
/// x = -1 (I_{-1+}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralSide {
    FromRight,
    FromLeft,
}

/// Query for the integral of order μ+1 of P_n at x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracIntLegendreQuery {
    pub n: usize,
    pub mu: f64,
    pub x: f64,
    pub side: IntegralSide,
}

fn check(mu: f64, x: f64) -> Result<()> {
    if !(mu > -1.0) || !mu.is_finite() {
        return Err(domain(format!("order parameter mu must exceed -1, got {mu}")));
    }
    if x.is_nan() || x.abs() > 1.0 {
        return Err(domain(format!("abscissa {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Bits the f64 recurrence loses at x: near -1 the wanted solution is smaller
/// than the dominant one by about min(n², 2/(1+x))^{μ+1}.
fn lost_bits(n: usize, mu: f64, x: f64) -> f64 {
    let nf = n as f64 + 1.0;
    let reach = (nf * nf).min(2.0 / (1.0 + x).max(f64::MIN_POSITIVE));
    (mu + 1.0).max(0.0) * reach.log2()
}

/// I_{1-}^{μ+1} P_n at x = (1-x)^{μ+1} n!/Γ(n+μ+2) P_n^{(μ+1,-μ-1)}(x).
fn from_right(n: usize, mu: f64, x: f64) -> Result<f64> {
    if x == 1.0 {
        return Ok(0.0);
    }
    let p = JacobiParams { n, alpha: mu + 1.0, beta: -mu - 1.0, x };
    let lost = lost_bits(n, mu, x);
    let extended = if lost <= 8.0 {
        None
    } else if lost <= 50.0 {
        jacobi_recurrence_dd(p)
    } else {
        jacobi_recurrence_big(p, 64 + lost.ceil() as usize)
    };
    let j = match extended {
        Some(v) => v,
        None => jacobi_general_eval(p)?,
    };
    let scale = ((mu + 1.0) * (1.0 - x).ln() + lgamma(n as f64 + 1.0) - lgamma(n as f64 + mu + 2.0)).exp();
    Ok(scale * j)
}

/// Closed form of the fractional integral of order μ+1 of P_n.
pub fn frac_int_legendre(q: FracIntLegendreQuery) -> Result<f64> {
    check(q.mu, q.x)?;
    match q.side {
        IntegralSide::FromRight => from_right(q.n, q.mu, q.x),
        IntegralSide::FromLeft => {
            // P_n(-x) = (-1)^n P_n(x) carries over to the mirrored integral
            let v = from_right(q.n, q.mu, -q.x)?;
            Ok(if q.n % 2 == 1 { -v } else { v })
        }
    }
}

/// Integer order k+1 through the classical Jacobi form
/// (n-k-1)!/(2^{k+1} n!) (1-x²)^{k+1} P_{n-k-1}^{(k+1,k+1)}(x), valid for n ≥ k+1.
pub fn frac_int_legendre_integer(n: usize, k: usize, x: f64) -> Result<f64> {
    check(k as f64, x)?;
    if n < k + 1 {
        return Err(domain(format!("classical form needs n >= k+1, got n={n}, k={k}")));
    }
    let kp = (k + 1) as f64;
    let d = n - k - 1;
    let j = jacobi_general_eval(JacobiParams { n: d, alpha: kp, beta: kp, x })?;
    let ln_c = lgamma(d as f64 + 1.0) - lgamma(n as f64 + 1.0) - kp * LN_2;
    Ok(ln_c.exp() * (1.0 - x * x).powi(k as i32 + 1) * j)
}

/// (I_{1-}^{μ+1} P_n)(-1) for n ≥ μ+1 > 0.
pub fn frac_int_legendre_minus1(n: usize, mu: f64) -> Result<f64> {
    if !(mu > -1.0) || !((n as f64) >= mu + 1.0) {
        return Err(domain(format!("endpoint value needs n >= mu+1 > 0, got n={n}, mu={mu}")));
    }
    let s = sin_pi(mu + 1.0);
    if s == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let ln_mag = (mu + 1.0) * LN_2 + lgamma(mu + 1.0) + lgamma(nf - mu) - lgamma(nf + mu + 2.0);
    let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sign * s / PI * ln_mag.exp())
}

/// Upper bound 2^{-(μ+1)} π^{-1/2} Γ((n-μ)/2)/Γ((n+μ+3)/2) on both fractional
/// integrals over [-1, 1], for μ > -1/2 and n ≥ μ+1.
pub fn frac_int_legendre_bound(n: usize, mu: f64) -> Result<f64> {
    if !(mu > -0.5) || !((n as f64) >= mu + 1.0) {
        return Err(domain(format!("bound needs mu > -1/2 and n >= mu+1, got n={n}, mu={mu}")));
    }
    let nf = n as f64;
    let ln = -(mu + 1.0) * LN_2 - 0.5 * PI.ln() + lgamma(0.5 * (nf - mu)) - lgamma(0.5 * (nf + mu + 3.0));
    Ok(ln.exp())
}
