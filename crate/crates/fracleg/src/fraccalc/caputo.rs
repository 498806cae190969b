use serde::{Deserialize, Serialize};

use super::bv::{rs_integral, BVSamples, Jump, StieltjesMeasure};
use super::function::{falling, is_integer, BlackBox, Modulator, SingularFunction};
use super::rl::rl_integral_with;
use super::Side;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadOptions, Singularity};
use crate::specfun::gamma::{gamma_unchecked, lgamma};

const EXPONENT_MATCH: f64 = 1e-12;
const BLACK_BOX_TOL: f64 = 1e-7;

fn order(mu: f64) -> Result<usize> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(domain(format!("Caputo order must be positive, got {mu}")));
    }
    Ok(mu.ceil() as usize)
}

/// Central finite difference of order k with step h.
pub(crate) fn finite_difference(f: &dyn Fn(f64) -> f64, k: usize, x: f64, h: f64) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * f(x + (0.5 * k as f64 - i as f64) * h);
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    acc / h.powi(k as i32)
}

fn black_box_derivative(b: &BlackBox, k: usize, x: f64) -> f64 {
    let h = f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * x.abs().max(1.0);
    let f = |t: f64| (b.eval)(t);
    finite_difference(&f, k, x, h)
}

/// Caputo derivative of order `mu` of `u`, anchored at `point`, evaluated at `x`.
///
/// The left-sided derivative needs `x > point`, the right-sided one `x < point`.
pub fn caputo_derivative(u: &SingularFunction, point: f64, mu: f64, side: Side, x: f64) -> Result<f64> {
    caputo_derivative_with(u, point, mu, side, x, &QuadOptions::default())
}

pub fn caputo_derivative_with(
    u: &SingularFunction,
    point: f64,
    mu: f64,
    side: Side,
    x: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    let k = order(mu)?;
    let ok = match side {
        Side::Left => x > point,
        Side::Right => x < point,
    };
    if !ok {
        return Err(domain(format!("x = {x} is not on the {side:?} side of {point}")));
    }
    let sign = if side == Side::Right && k % 2 == 1 { -1.0 } else { 1.0 };
    if let SingularFunction::BlackBox(b) = u {
        if b.hint.is_none() {
            return Err(Error::InsufficientRegularity("black-box Caputo derivative needs a regularity hint".into()));
        }
        if is_integer(mu) {
            return Ok(sign * black_box_derivative(b, k, x));
        }
        let nu = k as f64 - mu;
        let sing: Vec<Singularity> = b.singularity.map(Singularity::breakpoint).into_iter().collect();
        let (a, bb) = interval(point, x, side);
        let loose = opts.with_rel_tol(opts.rel_tol.max(BLACK_BOX_TOL));
        let est = rl_integral_with(|y| black_box_derivative(b, k, y), a, bb, nu, x, side, &sing, &loose)?;
        return Ok(sign * est.value);
    }
    if is_integer(mu) {
        return Ok(sign * u.derivative(k, x)?);
    }
    if u.vanishes_beyond(point, side) {
        return Ok(0.0);
    }
    let nu = k as f64 - mu;
    let (a, b) = interval(point, x, side);
    let sing = integrable_singularities(u, k, a, b)?;
    let est = rl_integral_with(|y| u.derivative(k, y).unwrap_or(f64::NAN), a, b, nu, x, side, &sing, opts)?;
    Ok(sign * est.value)
}

fn interval(point: f64, x: f64, side: Side) -> (f64, f64) {
    match side {
        Side::Left => (point, x),
        Side::Right => (x, point),
    }
}

/// Singularities of u^{(k)} touching [a, b], refusing non-integrable ones.
fn integrable_singularities(u: &SingularFunction, k: usize, a: f64, b: f64) -> Result<Vec<Singularity>> {
    let mut out = Vec::new();
    for s in u.derivative_singularities(k) {
        if s.at < a || s.at > b {
            continue;
        }
        let left_bad = s.at > a && s.left <= -1.0;
        let right_bad = s.at < b && s.right <= -1.0;
        if left_bad || right_bad {
            return Err(Error::HypothesisViolated(format!(
                "derivative of order {k} of {} is not integrable near {}",
                u.label(),
                s.at
            )));
        }
        out.push(s);
    }
    Ok(out)
}

/// Leading coefficient c in u ~ c |x - at|^λ on the side seen by the operator.
fn leading_coefficient(u: &SingularFunction) -> f64 {
    match u {
        SingularFunction::EndpointPower { modulator, .. } => modulator.eval(-1.0),
        _ => 1.0,
    }
}

/// One-sided limit of the Caputo derivative at its own anchor: v(θ+) for the
/// left-sided and v(θ-) for the right-sided derivative.
pub fn caputo_limit(u: &SingularFunction, theta: f64, mu: f64, side: Side) -> Result<f64> {
    let k = order(mu)?;
    if let SingularFunction::BlackBox(b) = u {
        return match (b.caputo_limits, b.singularity) {
            (Some((minus, plus)), Some(s)) if s == theta => Ok(if side == Side::Left { plus } else { minus }),
            (_, s) if s != Some(theta) && b.hint.is_some() => {
                if is_integer(mu) {
                    let sign = if side == Side::Right && k % 2 == 1 { -1.0 } else { 1.0 };
                    Ok(sign * black_box_derivative(b, k, theta))
                } else {
                    Ok(0.0)
                }
            }
            _ => Err(Error::InsufficientRegularity(format!(
                "black box needs declared one-sided Caputo limits at {theta}"
            ))),
        };
    }
    if u.vanishes_beyond(theta, side) {
        return Ok(0.0);
    }
    let sign = if side == Side::Right && k % 2 == 1 { -1.0 } else { 1.0 };
    match u.local_exponent(theta, side) {
        Some(lambda) if (lambda - mu).abs() <= EXPONENT_MATCH => {
            // D^μ |x-θ|^μ = Γ(μ+1) on either side
            Ok(leading_coefficient(u) * gamma_unchecked(mu + 1.0))
        }
        Some(lambda) if lambda > mu => Ok(0.0),
        Some(lambda) => Err(Error::HypothesisViolated(format!(
            "Caputo derivative of order {mu} of {} is unbounded at {theta} (local exponent {lambda})",
            u.label()
        ))),
        None => {
            if is_integer(mu) {
                Ok(sign * u.derivative(k, theta)?)
            } else {
                Ok(0.0)
            }
        }
    }
}

/// Caputo derivative v_μ = D^μ_{-1+}[(1+x)^μ g] as the power series
/// Σ_j Γ(μ+j+1)/(j!)² g^{(j)}(-1) (1+x)^j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointSeries {
    pub mu: f64,
    /// Coefficients of (1+x)^j.
    pub coefficients: Vec<f64>,
    /// Bound on the omitted tail over [-1, 1].
    pub tail_bound: f64,
}

pub const MAX_SERIES_TERMS: usize = 200;

pub fn endpoint_caputo_series(mu: f64, g: &Modulator) -> Result<EndpointSeries> {
    if !(mu > -1.0) {
        return Err(domain(format!("endpoint exponent must exceed -1, got {mu}")));
    }
    let exact_len = g.degree().map(|d| d + 1);
    let bound = g.derivative_bound();
    let mut coefficients = Vec::new();
    let mut scale: f64 = 0.0;
    for j in 0..MAX_SERIES_TERMS {
        if Some(j) == exact_len {
            return Ok(EndpointSeries { mu, coefficients, tail_bound: 0.0 });
        }
        let ln_w = lgamma(mu + j as f64 + 1.0) - 2.0 * lgamma(j as f64 + 1.0);
        let w = ln_w.exp();
        let c = w * g.derivative(j, -1.0);
        coefficients.push(c);
        scale = scale.max((c * 2f64.powi(j as i32)).abs());
        // the terms shrink superexponentially; bound the rest by a geometric tail
        let next =
            (ln_w + (mu + j as f64 + 1.0).ln() - 2.0 * (j as f64 + 1.0).ln()).exp() * 2f64.powi(j as i32 + 1) * bound;
        let ratio = 2.0 * (mu + j as f64 + 2.0) / ((j as f64 + 2.0) * (j as f64 + 2.0));
        if j >= 3 && ratio < 0.5 {
            let tail = next / (1.0 - ratio);
            if tail <= 1e-17 * scale.max(1e-300) {
                return Ok(EndpointSeries { mu, coefficients, tail_bound: tail });
            }
        }
    }
    Err(Error::NonConvergent(format!(
        "endpoint Caputo series for mu={mu}, g={} within {MAX_SERIES_TERMS} terms",
        g.name()
    )))
}

impl EndpointSeries {
    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// l-th derivative of the series at x.
    pub fn derivative(&self, l: usize, x: f64) -> f64 {
        let t = 1.0 + x;
        let mut acc = 0.0;
        for j in (l..self.coefficients.len()).rev() {
            acc = acc * t + self.coefficients[j] * falling(j as f64, l);
        }
        acc
    }

    /// v^{(l)}(-1+) = Γ(μ+l+1)/l! g^{(l)}(-1).
    pub fn derivative_at_minus1(&self, l: usize) -> f64 {
        self.coefficients.get(l).map_or(0.0, |c| c * falling(l as f64, l))
    }

    /// Total variation of v^{(m)} on [-1, 1] as ∫|v^{(m+1)}|, split at sign changes.
    pub fn total_variation(&self, m: usize) -> Result<f64> {
        let n = 512;
        let xs: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
        let mut cuts = vec![-1.0];
        for w in xs.windows(2) {
            let (fa, fb) = (self.derivative(m + 1, w[0]), self.derivative(m + 1, w[1]));
            if fa * fb < 0.0 {
                cuts.push(bisect(|x| self.derivative(m + 1, x), w[0], w[1]));
            }
        }
        cuts.push(1.0);
        let mut tv = 0.0;
        for w in cuts.windows(2) {
            tv += (self.derivative(m, w[1]) - self.derivative(m, w[0])).abs();
        }
        Ok(tv)
    }

    /// Sampled total variation on a uniform grid, for cross-checking.
    pub fn sampled_total_variation(&self, m: usize, points: usize) -> Result<f64> {
        let grid: Vec<f64> = (0..points).map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64).collect();
        let s = BVSamples::from_fn(grid, |x| self.derivative(m, x), vec![])?;
        super::bv::total_variation(&s, -1.0, 1.0)
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// The three addends of the fractional Taylor formula at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorParts {
    pub polynomial: f64,
    pub fractional: f64,
    pub remainder: f64,
}

impl TaylorParts {
    pub fn sum(&self) -> f64 {
        self.polynomial + self.fractional + self.remainder
    }
}

/// Polynomial part of degree k-1, the (x-θ)^μ term weighted by the one-sided
/// Caputo limit, and the Stieltjes remainder against d{D^μ f}.
pub fn fractional_taylor_expand(
    f: &SingularFunction,
    theta: f64,
    mu: f64,
    k: usize,
    side: Side,
    x: f64,
) -> Result<TaylorParts> {
    if k == 0 || !(mu > k as f64 - 1.0 && mu <= k as f64) {
        return Err(domain(format!("Taylor expansion needs k-1 < mu <= k, got k={k}, mu={mu}")));
    }
    let ok = match side {
        Side::Left => x >= theta,
        Side::Right => x <= theta,
    };
    if !ok {
        return Err(domain(format!("x = {x} is not on the {side:?} side of {theta}")));
    }
    if f.is_black_box() {
        return Err(Error::InsufficientRegularity("the Taylor remainder needs analytic derivatives".into()));
    }
    let dx = x - theta;
    let mut polynomial = 0.0;
    let mut fact = 1.0;
    for j in 0..k {
        if j > 0 {
            fact *= j as f64;
        }
        let dj = if j == 0 { f.eval(theta) } else { f.derivative(j, theta)? };
        if dj != 0.0 {
            polynomial += dj / fact * dx.powi(j as i32);
        }
    }
    if x == theta {
        return Ok(TaylorParts { polynomial, fractional: 0.0, remainder: 0.0 });
    }
    let limit = caputo_limit(f, theta, mu, side)?;
    let fractional = limit / gamma_unchecked(mu + 1.0) * dx.abs().powf(mu);
    let remainder = taylor_remainder(f, theta, mu, k, side, x)?;
    Ok(TaylorParts { polynomial, fractional, remainder })
}

fn taylor_remainder(f: &SingularFunction, theta: f64, mu: f64, k: usize, side: Side, x: f64) -> Result<f64> {
    let opts = QuadOptions::default().with_rel_tol(1e-12);
    let (a, b) = interval(theta, x, side);
    let kernel = match side {
        Side::Left => Singularity::new(x, mu, 0.0),
        Side::Right => Singularity::new(x, 0.0, mu),
    };
    let weight = |t: f64| (x - t).abs().powf(mu);
    let orient = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };

    if is_integer(mu) {
        // v = ±f^{(k)}; its a.e. derivative is ±f^{(k+1)} plus declared jumps
        let s = if side == Side::Right && k % 2 == 1 { -1.0 } else { 1.0 };
        let mut sing = integrable_singularities(f, k + 1, a, b)?;
        sing.push(kernel);
        let density = |t: f64| s * f.derivative(k + 1, t).unwrap_or(f64::NAN);
        let jumps = f.derivative_jumps(k).into_iter().map(|(at, h)| Jump { at, left: 0.0, right: s * h }).collect();
        let measure = StieltjesMeasure { density: &density, singularities: sing, jumps };
        let v = rs_integral(weight, &measure, a, b, &opts)?;
        return Ok(orient * v / gamma_unchecked(mu + 1.0));
    }

    if u_matches(f, theta, mu, side) {
        return match f {
            SingularFunction::EndpointPower { modulator, .. } => {
                let series = endpoint_caputo_series(mu, modulator)?;
                let density = |t: f64| series.derivative(1, t);
                let measure = StieltjesMeasure { density: &density, singularities: vec![kernel], jumps: vec![] };
                let v = rs_integral(weight, &measure, a, b, &opts)?;
                Ok(orient * v / gamma_unchecked(mu + 1.0))
            }
            // the Caputo derivative is the constant Γ(μ+1): no variation at all
            _ => Ok(0.0),
        };
    }

    // v'(t) = ±[f^{(k)}(θ) |t-θ|^{k-μ-1}/Γ(k-μ) + I^{k-μ} f^{(k+1)}(t)] for the
    // respective side; the first piece integrates in closed form.
    let nu = k as f64 - mu;
    let dk = f.derivative(k, theta)?;
    if !dk.is_finite() {
        return Err(Error::HypothesisViolated(format!(
            "derivative of order {k} of {} is unbounded at {theta}",
            f.label()
        )));
    }
    let inner_sing = integrable_singularities(f, k + 1, a, b)?;
    let inner = |t: f64| -> f64 {
        if t == theta {
            return 0.0;
        }
        let (lo, hi) = interval(theta, t, side);
        let sing: Vec<Singularity> = inner_sing.iter().copied().filter(|s| s.at >= lo && s.at <= hi).collect();
        rl_integral_with(|y| f.derivative(k + 1, y).unwrap_or(f64::NAN), lo, hi, nu, t, side, &sing, &opts)
            .map(|e| e.value)
            .unwrap_or(f64::NAN)
    };
    let mut sing: Vec<Singularity> = inner_sing.iter().map(|s| Singularity::breakpoint(s.at)).collect();
    sing.push(kernel);
    sing.push(match side {
        Side::Left => Singularity::new(theta, 0.0, nu),
        Side::Right => Singularity::new(theta, nu, 0.0),
    });
    let smooth = integrate(|t| weight(t) * inner(t), a, b, &sing, &opts)?.value;
    let kf = gamma_unchecked(k as f64 + 1.0);
    let closed = dk * (x - theta).powi(k as i32) / kf;
    let rest = smooth / gamma_unchecked(mu + 1.0);
    Ok(match side {
        Side::Left => closed + rest,
        Side::Right => closed - if k % 2 == 1 { -rest } else { rest },
    })
}

fn u_matches(f: &SingularFunction, theta: f64, mu: f64, side: Side) -> bool {
    matches!(f.local_exponent(theta, side), Some(l) if (l - mu).abs() <= EXPONENT_MATCH)
}

/// Total variation of a numerically computed Caputo derivative on the given
/// side interval, sampled on a grid graded towards the anchor. Refuses when a
/// grid of half the size disagrees by more than 1%.
pub fn caputo_total_variation(u: &SingularFunction, theta: f64, mu: f64, side: Side, points: usize) -> Result<f64> {
    let far = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let len = (far - theta).abs();
    if len == 0.0 {
        return Ok(0.0);
    }
    let sample = |n: usize| -> Result<f64> {
        let mut vals = Vec::with_capacity(n);
        let mut grid = Vec::with_capacity(n);
        for i in 1..=n {
            let s = i as f64 / n as f64;
            let t = theta + (far - theta) * s * s;
            let v = caputo_derivative(u, theta, mu, side, t)?;
            grid.push(t);
            vals.push(v);
        }
        if side == Side::Right {
            grid.reverse();
            vals.reverse();
        }
        let s = BVSamples::new(grid, vals, vec![])?;
        let (c, d) = (s.grid()[0], s.grid()[s.grid().len() - 1]);
        super::bv::total_variation(&s, c, d)
    };
    let fine = sample(points)?;
    let coarse = sample(points / 2)?;
    let scale = fine.abs().max(coarse.abs());
    if scale > 1e-8 && (fine - coarse).abs() > 0.01 * scale {
        return Err(Error::InsufficientRegularity(format!(
            "sampled variation of the Caputo derivative is not settled ({coarse:e} vs {fine:e})"
        )));
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::function::Modulator;

    #[test]
    fn plus_power_fundamental_formula() {
        let u = SingularFunction::interior_plus_power(0.1, 1.4).unwrap();
        for &x in &[0.2, 0.5, 0.95] {
            let v = caputo_derivative(&u, 0.1, 1.4, Side::Left, x).unwrap();
            assert!((v - gamma_unchecked(2.4)).abs() < 1e-10, "{v}");
        }
        assert_eq!(caputo_derivative(&u, 0.1, 1.4, Side::Right, -0.3).unwrap(), 0.0);
    }

    #[test]
    fn integer_order_is_classical() {
        let u = SingularFunction::smooth(Modulator::Sin);
        let v = caputo_derivative(&u, 0.0, 2.0, Side::Left, 0.4).unwrap();
        assert_eq!(v, -(0.4f64.sin()));
    }

    #[test]
    fn endpoint_series_agrees_with_quadrature() {
        let u = SingularFunction::endpoint_power(1.2, Modulator::Sin).unwrap();
        let q = caputo_derivative(&u, -1.0, 1.2, Side::Left, 0.0).unwrap();
        let s = endpoint_caputo_series(1.2, &Modulator::Sin).unwrap();
        assert!((q - s.value(0.0)).abs() < 1e-9, "{q} vs {}", s.value(0.0));
    }

    #[test]
    fn endpoint_series_constant_for_pure_power() {
        let s = endpoint_caputo_series(0.7, &Modulator::One).unwrap();
        assert_eq!(s.coefficients.len(), 1);
        assert!((s.value(0.3) - gamma_unchecked(1.7)).abs() < 1e-15);
        assert_eq!(s.total_variation(0).unwrap(), 0.0);
    }

    #[test]
    fn black_box_needs_hint() {
        let u = SingularFunction::black_box(|x: f64| x.abs().powf(1.5), Some(0.0));
        assert!(matches!(caputo_derivative(&u, 0.0, 1.5, Side::Left, 0.5), Err(Error::InsufficientRegularity(_))));
    }

    #[test]
    fn taylor_exact_for_model_power() {
        let u = SingularFunction::interior_plus_power(-0.2, 1.3).unwrap();
        let p = fractional_taylor_expand(&u, -0.2, 1.3, 2, Side::Left, 0.6).unwrap();
        assert_eq!(p.remainder, 0.0);
        assert!((p.sum() - u.eval(0.6)).abs() < 1e-14);
    }

    #[test]
    fn taylor_sin() {
        let u = SingularFunction::smooth(Modulator::Sin);
        let p = fractional_taylor_expand(&u, 0.0, 1.5, 2, Side::Left, 0.5).unwrap();
        assert!((p.sum() - 0.5f64.sin()).abs() < 1e-9, "{p:?}");
        let p = fractional_taylor_expand(&u, 0.3, 0.4, 1, Side::Right, -0.6).unwrap();
        assert!((p.sum() - (-0.6f64).sin()).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn taylor_integer_order_with_jump() {
        let p = fractional_taylor_expand(&SingularFunction::AbsX, -0.5, 1.0, 1, Side::Left, 0.5).unwrap();
        assert!((p.polynomial - 0.5).abs() < 1e-15);
        assert!((p.fractional + 1.0).abs() < 1e-15);
        assert!((p.remainder - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_difference_orders() {
        let f = |x: f64| x.exp();
        for k in 1..=3 {
            let h = f64::EPSILON.powf(1.0 / (k as f64 + 2.0));
            assert!((finite_difference(&f, k, 0.3, h) - 0.3f64.exp()).abs() < 1e-5);
        }
    }
}
