use std::f64::consts::PI;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fraccalc::{endpoint_caputo_series, Modulator, SingularFunction};
use crate::quad::{integrate, QuadOptions, Singularity};
use crate::specfun::gamma::{gamma_unchecked, lgamma};
use crate::specfun::poly::legendre_unchecked;

use super::fracint::{frac_int_legendre, frac_int_legendre_minus1, FracIntLegendreQuery, IntegralSide};
use super::series::{LegendreSeries, Provenance};

/// Number of boundary terms used for endpoint singularities with a non-constant
/// modulator, capped by what the degree allows.
pub const ENDPOINT_BOUNDARY_TERMS: usize = 2;

/// Relative tolerance for coefficients computed inside [`expand`].
pub const EXPAND_TOL: f64 = 1e-12;

/// (2n+1)/2 ∫ u P_n by singularity-split adaptive quadrature.
pub fn coeff_quadrature(u: &SingularFunction, n: usize, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let opts = QuadOptions::default().with_rel_tol(tol).with_degree_hint(n);
    let sing = u.singularities();
    let (lo, sing) = match u {
        // zero to the left of θ
        SingularFunction::InteriorPlusPower { theta, mu } => (*theta, vec![Singularity::new(*theta, 0.0, *mu)]),
        _ => (-1.0, sing),
    };
    let est = integrate(|x| u.eval(x) * legendre_unchecked(n, x), lo, 1.0, &sing, &opts)?;
    Ok(0.5 * (2 * n + 1) as f64 * est.value)
}

/// Coefficients of |x|: û_{2j} = (-1)^{j+1}(j+1/4)Γ(j-1/2)/(√π (j+1)!), odd ones vanish.
pub fn coeff_absx(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let j = (n / 2) as f64;
    let sign = if (n / 2) % 2 == 0 { -1.0 } else { 1.0 };
    if n == 0 {
        // Γ(-1/2) = -2√π
        return 0.5;
    }
    let ln = lgamma(j - 0.5) - 0.5 * PI.ln() - lgamma(j + 2.0);
    sign * (j + 0.25) * ln.exp()
}

fn below(n: usize, threshold: f64) -> Error {
    Error::BelowThreshold { n, threshold }
}

fn fracint(n: usize, mu: f64, x: f64, side: IntegralSide) -> Result<f64> {
    frac_int_legendre(FracIntLegendreQuery { n, mu, x, side })
}

/// Exact coefficient of a model singular function, valid from the degree
/// threshold n ≥ μ+1 on.
pub fn coeff_closed_model(u: &SingularFunction, n: usize) -> Result<f64> {
    let half = 0.5 * (2 * n + 1) as f64;
    let nf = n as f64;
    match u {
        SingularFunction::InteriorPlusPower { theta, mu } => {
            if nf < mu + 1.0 {
                return Err(below(n, mu + 1.0));
            }
            Ok(half * gamma_unchecked(mu + 1.0) * fracint(n, *mu, *theta, IntegralSide::FromRight)?)
        }
        SingularFunction::AbsPower { mu } => {
            if nf < mu + 1.0 {
                return Err(below(n, mu + 1.0));
            }
            if n % 2 == 1 {
                return Ok(0.0);
            }
            let right = fracint(n, *mu, 0.0, IntegralSide::FromRight)?;
            let left = fracint(n, *mu, 0.0, IntegralSide::FromLeft)?;
            Ok(half * gamma_unchecked(mu + 1.0) * (right + left))
        }
        // the explicit |x| series holds for every n
        SingularFunction::AbsX => Ok(coeff_absx(n)),
        SingularFunction::EndpointPower { mu, modulator } => endpoint_closed(*mu, modulator, n),
        SingularFunction::BlackBox(_) => Err(domain("closed-form coefficients exist only for the model variants")),
    }
}

fn endpoint_closed(mu: f64, g: &Modulator, n: usize) -> Result<f64> {
    let nf = n as f64;
    if nf < mu + 1.0 {
        return Err(below(n, mu + 1.0));
    }
    let half = 0.5 * (2 * n + 1) as f64;
    if g.is_one() {
        return Ok(half * gamma_unchecked(mu + 1.0) * frac_int_legendre_minus1(n, mu)?);
    }
    let m = ((nf - mu - 1.0).floor() as usize).min(ENDPOINT_BOUNDARY_TERMS);
    let v = endpoint_caputo_series(mu, g)?;
    let mut boundary = 0.0;
    for l in 0..=m {
        let d = v.derivative_at_minus1(l);
        if d != 0.0 {
            boundary += frac_int_legendre_minus1(n, mu + l as f64)? * d;
        }
    }
    // remainder ∫ I_{1-}^{μ+m+1} P_n · v^{(m+1)}; the integral vanishes like (1-x)^{μ+m+1}
    let order = mu + m as f64;
    let sing = [Singularity::new(1.0, order + 1.0, 0.0)];
    let opts = QuadOptions::default().with_rel_tol(1e-12).with_degree_hint(n);
    let fail = std::sync::Mutex::new(None);
    let est = integrate(
        |x| {
            let dv = v.derivative(m + 1, x);
            if dv == 0.0 {
                return 0.0;
            }
            match fracint(n, order, x, IntegralSide::FromRight) {
                Ok(i) => i * dv,
                Err(e) => {
                    fail.lock().unwrap().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        -1.0,
        1.0,
        &sing,
        &opts,
    );
    if let Some(e) = fail.into_inner().unwrap() {
        return Err(e);
    }
    let est = est?;
    debug!("endpoint coefficient n={n}: boundary {boundary:e}, remainder {:e} ± {:e}", est.value, est.error);
    Ok(half * (boundary + est.value))
}

/// Which engine [`expand`] may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    ClosedFormPreferred,
    QuadratureOnly,
}

/// Coefficient n with the engine actually used.
pub fn coefficient(u: &SingularFunction, n: usize, strategy: Strategy) -> Result<(f64, Provenance)> {
    if strategy == Strategy::ClosedFormPreferred && !u.is_black_box() {
        match coeff_closed_model(u, n) {
            Ok(c) => return Ok((c, Provenance::Closed)),
            Err(Error::BelowThreshold { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((coeff_quadrature(u, n, EXPAND_TOL)?, Provenance::Quadrature))
}

/// The Legendre series of `u` up to degree `degree`, computed in parallel over n.
pub fn expand(u: &SingularFunction, degree: usize, strategy: Strategy) -> Result<LegendreSeries> {
    let parts: Vec<(f64, Provenance)> =
        (0..=degree).into_par_iter().map(|n| coefficient(u, n, strategy)).collect::<Result<_>>()?;
    let (c, p) = parts.into_iter().unzip();
    LegendreSeries::new(c, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn absx_values() {
        assert_eq!(coeff_absx(0), 0.5);
        assert_eq!(coeff_absx(3), 0.0);
        assert!((coeff_absx(2) - 0.625).abs() < 1e-15);
        assert!((coeff_absx(4) + 0.1875).abs() < 1e-15);
    }

    #[test]
    fn quadrature_trivial() {
        let one = SingularFunction::smooth(Modulator::One);
        assert!((coeff_quadrature(&one, 0, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        assert!(coeff_quadrature(&one, 3, 1e-12).unwrap().abs() < 1e-14);
        let x = SingularFunction::smooth(Modulator::Polynomial(vec![0.0, 1.0]));
        assert!((coeff_quadrature(&x, 1, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        assert!((coeff_quadrature(&SingularFunction::AbsX, 2, 1e-12).unwrap() - 0.625).abs() < 1e-13);
    }

    #[test]
    fn closed_abs_power_at_one_is_absx() {
        let u = SingularFunction::abs_power(1.0).unwrap();
        for n in 2..12 {
            assert!((coeff_closed_model(&u, n).unwrap() - coeff_absx(n)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn interior_closed_matches_quadrature() {
        let u = SingularFunction::interior_plus_power(0.3, 0.6).unwrap();
        let c = coeff_closed_model(&u, 10).unwrap();
        let q = coeff_quadrature(&u, 10, 1e-12).unwrap();
        assert!(rel(c, q) < 1e-8, "{c} vs {q}");
    }

    #[test]
    fn endpoint_sine_size() {
        let u = SingularFunction::endpoint_power(1.2, Modulator::Sin).unwrap();
        let c = coeff_closed_model(&u, 16).unwrap();
        assert!((c.abs() - 6.59e-5).abs() < 0.005 * 6.59e-5, "{c}");
        let q = coeff_quadrature(&u, 16, 1e-12).unwrap();
        assert!(rel(c, q) < 1e-8, "{c} vs {q}");
    }

    #[test]
    fn endpoint_sine_against_high_precision() {
        // 60-digit mpmath quadrature of (2n+1)/2 ∫ (1+x)^μ sin(x) P_n(x) dx
        let cases = [
            (2.6, 59, -4.286_367_673_200_687_7e-10),
            (2.6, 64, 2.595_641_446_314_890_5e-10),
            (1.2, 63, 6.534_026_673_639_105_6e-7),
        ];
        for (mu, n, want) in cases {
            let u = SingularFunction::endpoint_power(mu, Modulator::Sin).unwrap();
            let c = coeff_closed_model(&u, n).unwrap();
            assert!(rel(c, want) < 1e-12, "mu={mu} n={n}: {c} vs {want}");
        }
        let one = SingularFunction::endpoint_power(1.2, Modulator::One).unwrap();
        let c = coeff_closed_model(&one, 59).unwrap();
        assert!(rel(c, -9.673_812_977_404_501_6e-7) < 1e-12, "{c}");
    }

    #[test]
    fn below_threshold_is_reported() {
        let u = SingularFunction::abs_power(2.6).unwrap();
        assert!(matches!(coeff_closed_model(&u, 3), Err(Error::BelowThreshold { .. })));
        let (_, p) = coefficient(&u, 3, Strategy::ClosedFormPreferred).unwrap();
        assert_eq!(p, Provenance::Quadrature);
    }

    #[test]
    fn expand_reproduces_polynomial() {
        let p3 = SingularFunction::black_box(|x| 0.5 * (5.0 * x * x * x - 3.0 * x), None);
        let s = expand(&p3, 5, Strategy::ClosedFormPreferred).unwrap();
        for (n, c) in s.coefficients().iter().enumerate() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-13, "n={n}: {c}");
        }
        assert!((s.eval(0.42).unwrap() - 0.5 * (5.0 * 0.42f64.powi(3) - 3.0 * 0.42)).abs() < 1e-13);
    }

    #[test]
    fn expand_absx() {
        let s = expand(&SingularFunction::AbsX, 4, Strategy::ClosedFormPreferred).unwrap();
        let want = [0.5, 0.0, 0.625, 0.0, -0.1875];
        for (c, w) in s.coefficients().iter().zip(want) {
            assert!((c - w).abs() < 1e-13);
        }
        assert!(s.provenance().iter().all(|p| *p == Provenance::Closed));
        assert_eq!(&s.coefficients()[..2], &[0.5, 0.0]);
    }
}
