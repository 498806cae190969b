use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    coeff_decay_bound, endpoint_bounds, interior_bounds, seminorm_endpoint, seminorm_interior, BoundCurve, BoundKind,
    EndpointNorm, InteriorNorm,
};
use crate::error::{Error, Result};
use crate::fraccalc::{
    boundary_limit, caputo_derivative, finite_difference, fractional_taylor_expand, rl_integral_with, rl_power_closed,
    BoundaryLimit, Location, Modulator, RegularityProfile, Side, SingularFunction,
};
use crate::legexp::{
    coeff_closed_model, coeff_quadrature, coefficient, expand, frac_int_legendre, frac_int_legendre_bound,
    frac_int_legendre_integer, frac_int_legendre_minus1, FracIntLegendreQuery, IntegralSide, Strategy,
};
use crate::quad::{integrate, QuadOptions, Singularity};
use crate::specfun::{
    gamma, gamma_ratio, jacobi_general_eval, kershaw_envelope, legendre_eval, legendre_upto, GammaRatioQuery,
    JacobiParams,
};

use super::measure::{reference_series, ErrorReport};
use super::tables::{error_reports, tightness_profile};

/// Degrees of the convergence tables the dominance checks run over.
pub const TABLE_DEGREES: [usize; 6] = [8, 16, 32, 64, 128, 256];
/// Degrees of the pointwise |x| checks.
pub const ABSX_DEGREES: [usize; 6] = [4, 8, 16, 32, 64, 128];
/// Relative rounding allowance when a bound is attained exactly.
pub const DOMINANCE_ROUNDING: f64 = 1e-12;
/// Seed of the random triples in the fractional-integral cross-check.
pub const RANDOM_SEED: u64 = 0x5eed_1e6e;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

type Outcome = Result<(bool, String)>;
type Check = fn() -> Outcome;

/// Every check of the suite, in reporting order.
pub const CHECKS: &[(&str, Check)] = &[
    ("kershaw_envelope", kershaw_contains_ratio),
    ("gamma_ratio_monotone", gamma_ratio_monotone),
    ("reflection_identity", reflection_identity),
    ("duplication_identity", duplication_identity),
    ("bernstein_inequality", bernstein_inequality),
    ("jacobi_parity", jacobi_parity),
    ("fractional_integration_by_parts", integration_by_parts),
    ("rl_semigroup", rl_semigroup),
    ("taylor_reconstruction", taylor_reconstruction),
    ("taylor_remainder_vanishes", taylor_remainder_vanishes),
    ("caputo_integer_order", caputo_integer_order),
    ("boundary_limit_trichotomy", boundary_limit_trichotomy),
    ("fractional_integral_bound", fractional_integral_bound),
    ("endpoint_vanishing", endpoint_vanishing),
    ("fracint_vs_rl_quadrature", fracint_vs_rl_quadrature),
    ("closed_vs_quadrature", closed_vs_quadrature),
    ("parseval_exp", parseval_exp),
    ("integer_order_consistency", integer_order_consistency),
    ("endpoint_value_limit", endpoint_value_limit),
    ("bound_dominance", bound_dominance),
    ("half_order_gap", half_order_gap),
    ("bound_curves_decrease", bound_curves_decrease),
    ("bound_asymptotic_constants", bound_asymptotic_constants),
    ("parseval_vs_direct_l2", parseval_vs_direct_l2),
    ("weighted_below_linf", weighted_below_linf),
    ("absx_pointwise", absx_pointwise),
];

fn run_one(name: &str, f: Check) -> CheckResult {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { name: name.to_string(), passed, detail, seconds: t.elapsed().as_secs_f64() }
}

/// Runs the whole suite.
pub fn run_verify() -> VerifyReport {
    run_selected(&[])
}

/// Runs the named checks, or all of them when `names` is empty.
pub fn run_selected(names: &[&str]) -> VerifyReport {
    let t = Instant::now();
    let checks =
        CHECKS.iter().filter(|(n, _)| names.is_empty() || names.contains(n)).map(|(n, f)| run_one(n, *f)).collect();
    VerifyReport { checks, seconds: t.elapsed().as_secs_f64() }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn verdict(worst: f64, tol: f64, what: &str) -> (bool, String) {
    (worst <= tol, format!("max {what} {worst:.3e} (tol {tol:.0e})"))
}

fn first_of(bad: &[String]) -> String {
    bad.first().map_or_else(String::new, |b| format!(", first: {b}"))
}

fn kershaw_contains_ratio() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for b in [0.1, 0.25, 0.5, 0.75, 0.9] {
        for z in [1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1e3, 1e5] {
            let (lo, hi) = kershaw_envelope(0.0, b, z)?;
            let r = gamma_ratio(GammaRatioQuery { a: 0.0, b, z })?;
            cases += 1;
            if !(lo <= r * (1.0 + 1e-14) && r <= hi * (1.0 + 1e-14)) {
                bad.push(format!("b={b} z={z}: {lo} <= {r} <= {hi}"));
            }
        }
    }
    Ok((bad.is_empty(), format!("{cases} cases, {} outside{}", bad.len(), first_of(&bad))))
}

fn gamma_ratio_monotone() -> Outcome {
    let mut worst = 0.0f64;
    for (a, b) in [(0.0, 0.5), (0.0, 2.5), (0.3, 1.7), (1.0, 1.2), (0.0, 0.0)] {
        let mut prev = f64::INFINITY;
        for i in 0..400 {
            let z = 0.5 + 0.125 * i as f64;
            let r = gamma_ratio(GammaRatioQuery { a, b, z })?;
            worst = worst.max((r - prev) / prev);
            prev = r;
        }
    }
    Ok((worst <= 1e-15, format!("largest relative increase {worst:.2e}")))
}

fn reflection_identity() -> Outcome {
    let mut worst = 0.0f64;
    for i in 1..200 {
        let a = i as f64 / 200.0 + 1.0 / 997.0;
        let v = gamma(1.0 - a)? * gamma(a)? * (PI * a).sin() / PI;
        worst = worst.max((v - 1.0).abs());
    }
    Ok(verdict(worst, 1e-12, "deviation"))
}

fn duplication_identity() -> Outcome {
    let mut worst = 0.0f64;
    for i in 1..=320 {
        let z = 0.25 * i as f64 - 0.1;
        let want = gamma(z)? * gamma(z + 0.5)? * 2f64.powf(2.0 * z - 1.0) / PI.sqrt();
        worst = worst.max(rel(gamma(2.0 * z)?, want));
    }
    Ok(verdict(worst, 1e-12, "relative error"))
}

fn bernstein_inequality() -> Outcome {
    const N: usize = 256;
    let ratios: Vec<f64> = (0..2001)
        .into_par_iter()
        .map(|i| {
            let x = -1.0 + i as f64 / 1000.0;
            let w = (1.0 - x * x).max(0.0).powf(0.25);
            let p = legendre_upto(N, x)?;
            Ok(p.iter()
                .enumerate()
                .map(|(n, v)| w * v.abs() / ((2.0 / PI).sqrt() / (n as f64 + 0.5).sqrt()))
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let worst = ratios.into_iter().fold(0.0, f64::max);
    Ok((worst <= 1.0, format!("largest ratio to the envelope {worst:.6} for n <= {N}")))
}

fn jacobi_parity() -> Outcome {
    let mut worst = 0.0f64;
    for n in 0..=64 {
        for (alpha, beta) in [(0.5, -0.4), (1.3, 0.5), (2.7, 1.9), (-0.6, 2.2)] {
            let mut pairs = Vec::new();
            for i in 0..=40 {
                let x = -0.95 + 1.9 * i as f64 / 40.0;
                let lhs = jacobi_general_eval(JacobiParams { n, alpha, beta, x: -x })?;
                let rhs = jacobi_general_eval(JacobiParams { n, alpha: beta, beta: alpha, x })?;
                pairs.push((lhs, if n % 2 == 1 { -rhs } else { rhs }));
            }
            // relative to the size of the polynomial on the sample, zeros included
            let scale = pairs.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
            for (l, r) in pairs {
                worst = worst.max((l - r).abs() / scale);
            }
        }
    }
    Ok(verdict(worst, 1e-11, "relative error"))
}

type Smooth = (&'static str, fn(f64) -> f64);

const SMOOTH: [Smooth; 8] = [
    ("1", |_| 1.0),
    ("x", |x| x),
    ("x^2", |x| x * x),
    ("exp", f64::exp),
    ("cos 2x", |x| (2.0 * x).cos()),
    ("sin", f64::sin),
    ("1/(3+x)", |x| 1.0 / (3.0 + x)),
    ("exp(-x^2)", |x| (-x * x).exp()),
];

fn tight() -> QuadOptions {
    QuadOptions::default().with_rel_tol(1e-12)
}

/// ∫ f I_{-1+}^ρ g and ∫ (I_{1-}^ρ f) g over [-1, 1].
fn ibp_sides(f: fn(f64) -> f64, g: fn(f64) -> f64, rho: f64) -> Result<(f64, f64)> {
    let opts = tight();
    let inner = |h: fn(f64) -> f64, x: f64, side: Side| {
        rl_integral_with(h, -1.0, 1.0, rho, x, side, &[], &opts).map_or(f64::NAN, |e| e.value)
    };
    let lhs = integrate(|x| f(x) * inner(g, x, Side::Left), -1.0, 1.0, &[Singularity::new(-1.0, 0.0, rho)], &opts)?;
    let rhs = integrate(|x| inner(f, x, Side::Right) * g(x), -1.0, 1.0, &[Singularity::new(1.0, rho, 0.0)], &opts)?;
    Ok((lhs.value, rhs.value))
}

fn integration_by_parts() -> Outcome {
    let mut pairs = Vec::new();
    for i in 0..SMOOTH.len() {
        for j in 0..SMOOTH.len() {
            if i < j && pairs.len() < 20 {
                pairs.push((i, j));
            }
        }
    }
    let cases: Vec<(usize, usize, f64)> =
        pairs.iter().flat_map(|&(i, j)| [0.25, 0.5, 0.75].map(|r| (i, j, r))).collect();
    let worst = cases
        .par_iter()
        .map(|&(i, j, rho)| {
            let (l, r) = ibp_sides(SMOOTH[i].1, SMOOTH[j].1, rho)?;
            let d = (l - r).abs();
            Ok(if d.is_nan() { f64::INFINITY } else { d })
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let (ok, d) = verdict(worst, 1e-7, "residual");
    Ok((ok, format!("{} pairs x 3 orders, {d}", pairs.len())))
}

fn rl_semigroup() -> Outcome {
    let opts = tight();
    let mut worst = 0.0f64;
    for eta in [0.0, 0.5, 1.3] {
        for (r1, r2) in [(0.3, 0.7), (0.5, 1.2), (1.5, 0.25)] {
            for x in [-0.5, 0.2, 0.9] {
                let f = |y: f64| (1.0 + y).powf(eta);
                let once = |y: f64| {
                    rl_integral_with(f, -1.0, 1.0, r1, y, Side::Left, &[Singularity::new(-1.0, 0.0, eta)], &opts)
                        .map_or(f64::NAN, |e| e.value)
                };
                let twice = rl_integral_with(
                    once,
                    -1.0,
                    1.0,
                    r2,
                    x,
                    Side::Left,
                    &[Singularity::new(-1.0, 0.0, eta + r1)],
                    &opts,
                )?
                .value;
                let want = rl_power_closed(-1.0, eta, r1 + r2, x, Side::Left)?;
                worst = worst.max(rel(twice, want));
            }
        }
    }
    Ok(verdict(worst, 1e-9, "relative error"))
}

fn taylor_reconstruction() -> Outcome {
    let mut cases = Vec::new();
    for g in [Modulator::Exp, Modulator::Sin, Modulator::Cos] {
        for theta in [-0.5, 0.2] {
            for mu in [0.4, 1.5, 2.3] {
                for (side, x) in [(Side::Left, theta + 0.6), (Side::Right, theta - 0.4)] {
                    cases.push((g.clone(), theta, mu, side, x));
                }
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|(g, theta, mu, side, x): &(Modulator, f64, f64, Side, f64)| {
            let f = SingularFunction::smooth(g.clone());
            let k = mu.ceil() as usize;
            let parts = fractional_taylor_expand(&f, *theta, *mu, k, *side, *x)?;
            Ok((parts.sum() - f.eval(*x)).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let (ok, d) = verdict(worst, 1e-8, "reconstruction error");
    Ok((ok, format!("{} cases, {d}", cases.len())))
}

fn taylor_remainder_vanishes() -> Outcome {
    let mut worst = 0.0f64;
    for (theta, mu) in [(0.0f64, 0.6f64), (0.3, 1.7), (-0.4, 2.6)] {
        let k = mu.ceil() as usize;
        let f = SingularFunction::interior_plus_power(theta, mu)?;
        let p = fractional_taylor_expand(&f, theta, mu, k, Side::Left, theta + 0.5)?;
        worst = worst.max(p.remainder.abs());
        // a polynomial of degree k-1 has no fractional part at all
        let coeffs: Vec<f64> = (0..k).map(|j| 0.5 + j as f64).collect();
        let q = SingularFunction::smooth(Modulator::Polynomial(coeffs));
        for (side, x) in [(Side::Left, theta + 0.5), (Side::Right, theta - 0.5)] {
            let p = fractional_taylor_expand(&q, theta, mu, k, side, x)?;
            worst = worst.max(p.remainder.abs());
        }
    }
    Ok(verdict(worst, 1e-10, "|remainder|"))
}

fn caputo_integer_order() -> Outcome {
    let mut worst_ratio = f64::INFINITY;
    let mut worst_err = 0.0f64;
    for g in [Modulator::Exp, Modulator::Sin] {
        let u = SingularFunction::smooth(g);
        for k in 1..=3usize {
            for (side, point, x) in [(Side::Left, -1.0, 0.3), (Side::Right, 1.0, -0.2)] {
                let v = caputo_derivative(&u, point, k as f64, side, x)?;
                let sign = if side == Side::Right && k % 2 == 1 { -1.0 } else { 1.0 };
                let f = |t: f64| u.eval(t);
                let e1 = (v - sign * finite_difference(&f, k, x, 2e-2)).abs();
                let e2 = (v - sign * finite_difference(&f, k, x, 1e-2)).abs();
                worst_err = worst_err.max(e2);
                worst_ratio = worst_ratio.min(e1 / e2);
            }
        }
    }
    // halving h must cut the discrepancy by about four
    let ok = worst_ratio > 3.5 && worst_err < 1e-3;
    Ok((ok, format!("smallest error ratio on halving h {worst_ratio:.3}, max error {worst_err:.2e}")))
}

fn boundary_limit_trichotomy() -> Outcome {
    let opts = tight();
    let g = f64::cos;
    let mut bad = Vec::new();
    for (gam, rho) in [(0.5, 0.5), (0.0, 0.25), (-0.5, 0.5), (-0.3, 0.3), (-0.7, 0.3), (-0.5, 0.2)] {
        let v: Vec<f64> = (2..=6)
            .map(|j| {
                let x = -1.0 + 10f64.powi(-j);
                rl_integral_with(
                    |t| (1.0 + t).powf(gam) * g(t),
                    -1.0,
                    1.0,
                    rho,
                    x,
                    Side::Left,
                    &[Singularity::new(-1.0, 0.0, gam)],
                    &opts,
                )
                .map(|e| e.value)
            })
            .collect::<Result<_>>()?;
        let slope = (v[3] / v[4]).abs().log10();
        let s = gam + rho;
        let ok = match boundary_limit(gam, rho, g(-1.0))? {
            BoundaryLimit::Zero => s > 0.0 && (slope - s).abs() < 0.01 && v[4].abs() < v[0].abs(),
            BoundaryLimit::Infinite => s < 0.0 && (slope - s).abs() < 0.01 && v[4].abs() > v[0].abs(),
            BoundaryLimit::Finite(l) => rel((10.0 * v[4] - v[3]) / 9.0, l) < 1e-6,
        };
        if !ok {
            bad.push(format!("gamma={gam} rho={rho}"));
        }
    }
    Ok((bad.is_empty(), format!("6 cases, mismatches: {bad:?}")))
}

fn fracint(n: usize, mu: f64, x: f64, side: IntegralSide) -> Result<f64> {
    frac_int_legendre(FracIntLegendreQuery { n, mu, x, side })
}

fn fractional_integral_bound() -> Outcome {
    let mut cases = Vec::new();
    for mu in [-0.3, 0.3, 0.5, 1.2, 2.6] {
        let n0 = ((mu + 1.0f64).ceil() as usize).max(1);
        for n in n0..=128 {
            cases.push((n, mu));
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(n, mu)| {
            let b = frac_int_legendre_bound(n, mu)?;
            let mut w = 0.0f64;
            for i in 0..=1000 {
                let x = -1.0 + i as f64 / 500.0;
                for side in [IntegralSide::FromRight, IntegralSide::FromLeft] {
                    w = w.max(fracint(n, mu, x, side)?.abs() / b);
                }
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst <= 1.0 + 1e-12, format!("{} (n, mu) pairs, largest ratio to the bound {worst:.6}", cases.len())))
}

fn endpoint_vanishing() -> Outcome {
    let mut bad = 0;
    let mut cases = 0;
    for n in 0..=40 {
        for mu in [-0.7, -0.3, 0.0, 0.4, 1.0, 1.7, 2.6] {
            cases += 2;
            if fracint(n, mu, 1.0, IntegralSide::FromRight)? != 0.0 {
                bad += 1;
            }
            if fracint(n, mu, -1.0, IntegralSide::FromLeft)? != 0.0 {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{cases} evaluations, {bad} nonzero")))
}

fn fracint_vs_rl_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let triples: Vec<(usize, f64, f64, Side)> = (0..50)
        .map(|_| {
            let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
            (rng.gen_range(0..=32), rng.gen_range(-0.49..2.99), rng.gen_range(-0.98..0.98), side)
        })
        .collect();
    let opts = QuadOptions::default().with_rel_tol(1e-13);
    let errs = triples
        .par_iter()
        .map(|&(n, mu, x, side)| {
            let q = rl_integral_with(
                |t| legendre_eval(n, t).unwrap_or(f64::NAN),
                -1.0,
                1.0,
                mu + 1.0,
                x,
                side,
                &[],
                &opts,
            )?
            .value;
            let which = if side == Side::Left { IntegralSide::FromLeft } else { IntegralSide::FromRight };
            Ok(rel(fracint(n, mu, x, which)?, q))
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = errs.into_iter().fold(0.0, f64::max);
    let (ok, d) = verdict(worst, 1e-8, "relative error");
    Ok((ok, format!("50 random triples, {d}")))
}

/// The model variants the closed-form coefficients cover.
pub fn model_variants() -> Result<Vec<SingularFunction>> {
    Ok(vec![
        SingularFunction::interior_plus_power(0.3, 0.6)?,
        SingularFunction::interior_plus_power(-0.4, 1.7)?,
        SingularFunction::abs_power(0.5)?,
        SingularFunction::abs_power(1.7)?,
        SingularFunction::abs_power(2.6)?,
        SingularFunction::AbsX,
        SingularFunction::endpoint_power(0.1, Modulator::One)?,
        SingularFunction::endpoint_power(1.2, Modulator::One)?,
        SingularFunction::endpoint_power(0.1, Modulator::Sin)?,
        SingularFunction::endpoint_power(1.2, Modulator::Sin)?,
        SingularFunction::endpoint_power(2.6, Modulator::Sin)?,
        SingularFunction::endpoint_power(0.7, Modulator::Exp)?,
    ])
}

fn structurally_zero(u: &SingularFunction, n: usize) -> bool {
    n % 2 == 1 && matches!(u, SingularFunction::AbsPower { .. } | SingularFunction::AbsX)
}

/// Agreement of closed-form and quadrature coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientGap {
    pub compared: usize,
    pub above_tolerance: usize,
    pub worst: f64,
    pub worst_at: String,
}

/// Relative gaps between closed-form and quadrature coefficients for n ≤ `top`
/// over all model variants.
pub fn closed_vs_quadrature_gap(top: usize, tol: f64) -> Result<CoefficientGap> {
    let mut jobs = Vec::new();
    for u in model_variants()? {
        let t = match &u {
            SingularFunction::AbsX => 2,
            _ => (u.mu().unwrap_or(0.0) + 1.0).ceil() as usize,
        };
        for n in t..=top {
            if !structurally_zero(&u, n) {
                jobs.push((u.clone(), n));
            }
        }
    }
    let gaps = jobs
        .par_iter()
        .map(|(u, n)| {
            let c = coeff_closed_model(u, *n)?;
            Ok((rel(c, coeff_quadrature(u, *n, 1e-13)?), c))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let mut out = CoefficientGap { compared: jobs.len(), above_tolerance: 0, worst: 0.0, worst_at: String::new() };
    for ((u, n), (g, c)) in jobs.iter().zip(gaps) {
        if g > tol {
            out.above_tolerance += 1;
        }
        if g > out.worst {
            out.worst = g;
            out.worst_at = format!("{} n={n} (coefficient {c:.3e})", u.label());
        }
    }
    Ok(out)
}

fn closed_vs_quadrature() -> Outcome {
    const TOL: f64 = 1e-6;
    let g = closed_vs_quadrature_gap(64, TOL)?;
    Ok((
        g.above_tolerance == 0,
        format!(
            "{} coefficients, {} above {TOL:.0e}, max relative gap {:.3e} at {}",
            g.compared, g.above_tolerance, g.worst, g.worst_at
        ),
    ))
}

fn parseval_exp() -> Outcome {
    let s = expand(&SingularFunction::smooth(Modulator::Exp), 40, Strategy::ClosedFormPreferred)?;
    let d = (s.norm_sq() - 2f64.sinh()).abs();
    Ok(verdict(d, 1e-10, "discrepancy"))
}

fn integer_order_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..=3usize {
        for n in k + 1..=40 {
            let mut pairs = Vec::new();
            for i in 0..=40 {
                let x = -1.0 + i as f64 / 20.0;
                pairs.push((fracint(n, k as f64, x, IntegralSide::FromRight)?, frac_int_legendre_integer(n, k, x)?));
            }
            let scale = pairs.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
            for (a, b) in pairs {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    Ok(verdict(worst, 1e-11, "relative error"))
}

fn endpoint_value_limit() -> Outcome {
    let mut worst = 0.0f64;
    for (n, mu) in [(2, 0.5), (5, 0.3), (9, 1.3), (16, 2.6), (33, 0.1), (64, 1.7), (128, 2.6)] {
        let h = 1e-3 / ((n + 1) * (n + 1)) as f64;
        let r = |h: f64| fracint(n, mu, -1.0 + h, IntegralSide::FromRight);
        let (r0, r1, r2) = (r(h)?, r(0.5 * h)?, r(0.25 * h)?);
        let (l1, l2) = (2.0 * r1 - r0, 2.0 * r2 - r1);
        let limit = (4.0 * l2 - l1) / 3.0;
        worst = worst.max(rel(frac_int_legendre_minus1(n, mu)?, limit));
    }
    Ok(verdict(worst, 1e-6, "relative error"))
}

fn interior_profile(u: &SingularFunction, mu: f64, theta: f64) -> Result<RegularityProfile> {
    let s = seminorm_interior(u, mu, theta)?;
    RegularityProfile::new(RegularityProfile::order_for(mu), mu, Location::Interior(theta), 0, s)
}

fn endpoint_profile(u: &SingularFunction, mu: f64, m: u32) -> Result<RegularityProfile> {
    let s = seminorm_endpoint(u, mu, m)?;
    RegularityProfile::new(RegularityProfile::order_for(mu), mu, Location::LeftEndpoint, m, s)
}

/// Compares one bound with a measurement; refusals outside a bound's stated range
/// are skipped, any other failure propagates.
fn dominates(bound: Result<f64>, measured: f64, label: String, tally: &mut (usize, Vec<String>)) -> Result<()> {
    match bound {
        Ok(b) => {
            tally.0 += 1;
            // the coefficient bound holds with equality for |x|, so allow rounding
            if !(measured <= b * (1.0 + DOMINANCE_ROUNDING)) {
                tally.1.push(format!("{label}: {measured:.3e} > {b:.3e}"));
            }
            Ok(())
        }
        Err(Error::BoundNotStated(_)) => Ok(()),
        Err(e) => Err(e),
    }
}

/// Every stated bound against the measured errors and coefficients of the
/// tabulated functions: (comparisons, violations).
pub fn dominance_violations() -> Result<(usize, Vec<String>)> {
    let mut tally = (0, Vec::new());
    let mut interior = vec![(SingularFunction::AbsX, 1.0)];
    for mu in [1.7, 2.6] {
        interior.push((SingularFunction::abs_power(mu)?, mu));
    }
    for (u, mu) in &interior {
        let p = interior_profile(u, *mu, 0.0)?;
        for r in error_reports(u, &TABLE_DEGREES)? {
            let l = u.label();
            dominates(interior_bounds(&p, r.n, InteriorNorm::Linf), r.linf, format!("{l} linf N={}", r.n), &mut tally)?;
            dominates(
                interior_bounds(&p, r.n, InteriorNorm::WeightedLinf),
                r.weighted_linf,
                format!("{l} weighted N={}", r.n),
                &mut tally,
            )?;
            dominates(interior_bounds(&p, r.n, InteriorNorm::L2), r.l2, format!("{l} l2 N={}", r.n), &mut tally)?;
        }
    }
    let mut decay = interior.clone();
    decay.push((SingularFunction::interior_plus_power(0.3, 1.7)?, 1.7));
    for (u, mu) in &decay {
        let theta = if let SingularFunction::InteriorPlusPower { theta, .. } = u { *theta } else { 0.0 };
        let p = interior_profile(u, *mu, theta)?;
        let t = (*mu + 1.0).ceil() as usize;
        for n in t.max(2)..=256 {
            let (c, _) = coefficient(u, n, Strategy::ClosedFormPreferred)?;
            dominates(coeff_decay_bound(&p, n), c.abs(), format!("{} coefficient n={n}", u.label()), &mut tally)?;
        }
    }
    for mu in [0.1, 1.2] {
        let u = SingularFunction::endpoint_power(mu, Modulator::One)?;
        let reports = error_reports(&u, &TABLE_DEGREES)?;
        for m in 0..=2 {
            let p = endpoint_profile(&u, mu, m)?;
            for r in &reports {
                let l = format!("{} m={m}", u.label());
                dominates(
                    endpoint_bounds(&p, r.n, EndpointNorm::Linf),
                    r.linf,
                    format!("{l} linf N={}", r.n),
                    &mut tally,
                )?;
                dominates(endpoint_bounds(&p, r.n, EndpointNorm::L2), r.l2, format!("{l} l2 N={}", r.n), &mut tally)?;
            }
        }
    }
    for row in tightness_profile(&SingularFunction::AbsX, &ABSX_DEGREES)? {
        dominates(Ok(row.bound_at_0), row.error_at_0, format!("|x| at 0 N={}", row.n), &mut tally)?;
        dominates(Ok(row.bound_at_pm1), row.error_at_pm1, format!("|x| at +-1 N={}", row.n), &mut tally)?;
    }
    Ok(tally)
}

fn bound_dominance() -> Outcome {
    let (count, bad) = dominance_violations()?;
    Ok((bad.is_empty(), format!("{count} comparisons, {} violations{}", bad.len(), first_of(&bad))))
}

fn half_order_gap() -> Outcome {
    let mut worst = 0.0f64;
    for mu in [0.75, 1.7, 2.6] {
        let p = RegularityProfile::new(RegularityProfile::order_for(mu), mu, Location::Interior(0.0), 0, 1.0)?;
        let pts: Vec<(f64, f64)> = [32usize, 64, 128, 256, 512]
            .iter()
            .map(|&n| {
                let r =
                    interior_bounds(&p, n, InteriorNorm::Linf)? / interior_bounds(&p, n, InteriorNorm::WeightedLinf)?;
                Ok(((n as f64).ln(), r.ln()))
            })
            .collect::<Result<_>>()?;
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        worst = worst.max((slope - 0.5).abs());
    }
    Ok(verdict(worst, 0.05, "|slope - 1/2|"))
}

/// Bound kinds with the profile each is evaluated on and its algebraic rate.
fn curve_setups() -> Result<Vec<(BoundKind, RegularityProfile, f64)>> {
    let mut out = Vec::new();
    for mu in [0.75, 1.7, 2.6] {
        let p = RegularityProfile::new(RegularityProfile::order_for(mu), mu, Location::Interior(0.0), 0, 1.0)?;
        out.push((BoundKind::LinfInterior, p, mu - 0.5));
        out.push((BoundKind::WeightedLinfInterior, p, mu));
        out.push((BoundKind::L2Interior, p, mu + 0.5));
        out.push((BoundKind::CoeffDecay, p, mu + 0.5));
    }
    for mu in [0.1, 1.2, 2.6] {
        for m in [0, 2] {
            let p = RegularityProfile::new(RegularityProfile::order_for(mu), mu, Location::LeftEndpoint, m, 1.0)?;
            let s = mu + m as f64;
            if mu > 1.0 {
                out.push((BoundKind::LinfEndpoint, p, (s - 0.5).min(2.0 * mu)));
            }
            out.push((BoundKind::L2Endpoint, p, (s + 0.5).min(2.0 * mu + 1.0)));
        }
    }
    let p = RegularityProfile::new(1, 1.0, Location::Interior(0.0), 0, 2.0)?;
    out.push((BoundKind::AbsxAtZero, p, 1.0));
    out.push((BoundKind::AbsxAtPm1, p, 1.5));
    Ok(out)
}

fn bound_curves_decrease() -> Outcome {
    let mut bad = Vec::new();
    let setups = curve_setups()?;
    for (kind, p, _) in &setups {
        let start = (p.mu + p.m as f64 + 2.0).floor() as usize + 1;
        let degrees: Vec<usize> = (start.max(3)..=1024).collect();
        let c = BoundCurve::evaluate(*kind, *p, &degrees)?;
        let v: Vec<f64> = c.values.values().copied().collect();
        if !v.windows(2).all(|w| w[1] < w[0]) {
            bad.push(format!("{} mu={} m={}", kind.as_str(), p.mu, p.m));
        }
    }
    Ok((bad.is_empty(), format!("{} curves up to N=1024, not decreasing: {bad:?}", setups.len())))
}

fn bound_asymptotic_constants() -> Outcome {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for (kind, p, rate) in curve_setups()? {
        let c = BoundCurve::evaluate(kind, p, &[256, 512])?;
        let a = c.values[&256] * 256f64.powf(rate);
        let b = c.values[&512] * 512f64.powf(rate);
        let r = rel(a, b);
        if r > worst {
            worst = r;
            at = format!("{} mu={} m={}", kind.as_str(), p.mu, p.m);
        }
    }
    let (ok, d) = verdict(worst, 0.02, "relative change of bound x N^rate");
    Ok((ok, format!("{d} at {at}")))
}

/// L² error of the degree-N truncation by direct quadrature of (u - π_N u)².
pub fn direct_l2_error(u: &SingularFunction, n: usize) -> Result<f64> {
    let s = reference_series(u, n)?.truncate(n);
    let sing: Vec<Singularity> = u.singularities().iter().map(|s| Singularity::breakpoint(s.at)).collect();
    let opts = QuadOptions::default().with_rel_tol(1e-10).with_degree_hint(2 * n);
    let est = integrate(|x| (u.eval(x) - s.eval(x).unwrap_or(f64::NAN)).powi(2), -1.0, 1.0, &sing, &opts)?;
    Ok(est.value.sqrt())
}

fn parseval_vs_direct_l2() -> Outcome {
    let mut worst = 0.0f64;
    for (u, n) in
        [(SingularFunction::abs_power(1.7)?, 16), (SingularFunction::endpoint_power(1.2, Modulator::One)?, 32)]
    {
        let r = error_reports(&u, &[n, 2 * n])?;
        worst = worst.max(rel(r[0].l2, direct_l2_error(&u, n)?));
    }
    Ok(verdict(worst, 0.01, "relative gap"))
}

fn weighted_below_linf() -> Outcome {
    let mut bad = 0;
    let mut count = 0;
    let mut gap_17 = 0.0f64;
    for u in [
        SingularFunction::abs_power(1.7)?,
        SingularFunction::abs_power(2.6)?,
        SingularFunction::endpoint_power(0.1, Modulator::One)?,
        SingularFunction::endpoint_power(1.2, Modulator::One)?,
    ] {
        let reports: Vec<ErrorReport> = error_reports(&u, &TABLE_DEGREES)?;
        for r in &reports {
            count += 1;
            if r.weighted_linf > r.linf {
                bad += 1;
            }
            if u.mu() == Some(1.7) && matches!(u, SingularFunction::AbsPower { .. }) {
                gap_17 = gap_17.max(rel(r.weighted_linf, r.linf));
            }
        }
    }
    // same three significant digits for |x|^1.7
    let ok = bad == 0 && gap_17 < 5e-3;
    Ok((ok, format!("{count} reports, {bad} with weighted > plain; |x|^1.7 largest gap {gap_17:.2e}")))
}

fn absx_pointwise() -> Outcome {
    let mut bad = Vec::new();
    for r in tightness_profile(&SingularFunction::AbsX, &ABSX_DEGREES)? {
        if r.error_at_0 > r.bound_at_0 || r.error_at_pm1 > r.bound_at_pm1 || r.argmax_location.abs() > 1e-2 {
            bad.push(r.n);
        }
    }
    Ok((bad.is_empty(), format!("N in {ABSX_DEGREES:?}, failing N: {bad:?}")))
}
