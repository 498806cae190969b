//! Seminorms and a-priori error bounds for truncated Legendre expansions.
//!
//! All Gamma ratios are formed as differences of log-Gamma values so the bounds
//! stay finite for degrees far beyond the overflow point of Γ itself.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::sync::Once;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fraccalc::{
    caputo_limit, caputo_total_variation, endpoint_caputo_series, Location, RegularityProfile, Side, SingularFunction,
};
use crate::specfun::gamma::{gamma_unchecked, lgamma, sin_pi};

static WEIGHTED_WARNING: Once = Once::new();

/// Grid size for the sampled variation of a Caputo derivative.
pub const TV_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    LinfInterior,
    WeightedLinfInterior,
    L2Interior,
    LinfEndpoint,
    L2Endpoint,
    AbsxAtZero,
    AbsxAtPm1,
    CoeffDecay,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LinfInterior => "linf_interior",
            Self::WeightedLinfInterior => "weighted_linf_interior",
            Self::L2Interior => "l2_interior",
            Self::LinfEndpoint => "linf_endpoint",
            Self::L2Endpoint => "l2_endpoint",
            Self::AbsxAtZero => "absx_at_zero",
            Self::AbsxAtPm1 => "absx_at_pm1",
            Self::CoeffDecay => "coeff_decay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorNorm {
    Linf,
    WeightedLinf,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointNorm {
    Linf,
    L2,
}

/// The weight (1-x²)^{1/4} of the weighted maximum norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorm {
    pub weight_exponent: f64,
}

impl Default for WeightedNorm {
    fn default() -> Self {
        Self { weight_exponent: 0.25 }
    }
}

impl WeightedNorm {
    pub fn weight(&self, x: f64) -> f64 {
        (1.0 - x * x).max(0.0).powf(self.weight_exponent)
    }
}

fn not_stated(msg: impl Into<String>) -> Error {
    Error::BoundNotStated(msg.into())
}

fn order_of(mu: f64) -> Result<u32> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(domain(format!("order mu must be positive, got {mu}")));
    }
    Ok(RegularityProfile::order_for(mu))
}

/// Variation of u^{(k)} over [-1, 1] for the model variants.
fn integer_variation(u: &SingularFunction, k: u32) -> Result<f64> {
    let kf = k as f64;
    let fact = gamma_unchecked(kf + 1.0);
    match u {
        SingularFunction::AbsX if k == 1 => Ok(2.0),
        SingularFunction::AbsPower { mu } if *mu == kf => Ok(if k % 2 == 1 { 2.0 * fact } else { 0.0 }),
        SingularFunction::InteriorPlusPower { mu, .. } if *mu == kf => Ok(fact),
        SingularFunction::BlackBox(b) if b.hint.is_some() => {
            let s = b.singularity.unwrap_or(0.0);
            let left = caputo_total_variation(u, s, kf, Side::Right, TV_POINTS)?;
            let right = caputo_total_variation(u, s, kf, Side::Left, TV_POINTS)?;
            let jump = match b.caputo_limits {
                Some((minus, plus)) => (plus - minus).abs(),
                None => 0.0,
            };
            Ok(left + right + jump)
        }
        SingularFunction::BlackBox(_) => {
            Err(Error::InsufficientRegularity("black box needs a regularity hint for its seminorm".into()))
        }
        _ => Err(Error::HypothesisViolated(format!(
            "{} has no bounded-variation derivative of order {k} about an interior point",
            u.label()
        ))),
    }
}

/// U_θ^{(μ)}: variation of both one-sided Caputo derivatives plus their limits
/// at θ. For integer μ = k the variation of u^{(k)} over [-1, 1] is returned.
pub fn seminorm_interior(u: &SingularFunction, mu: f64, theta: f64) -> Result<f64> {
    let k = order_of(mu)?;
    if !(theta > -1.0 && theta < 1.0) {
        return Err(domain(format!("interior point {theta} outside (-1, 1)")));
    }
    if mu == k as f64 {
        return integer_variation(u, k);
    }
    match u {
        SingularFunction::InteriorPlusPower { theta: t, mu: m } if *t == theta && *m == mu => {
            Ok(gamma_unchecked(mu + 1.0))
        }
        SingularFunction::AbsPower { mu: m } if theta == 0.0 && *m == mu => Ok(2.0 * gamma_unchecked(mu + 1.0)),
        SingularFunction::EndpointPower { .. } => {
            Err(Error::HypothesisViolated("endpoint singularity: use the endpoint seminorm".into()))
        }
        _ => seminorm_interior_sampled(u, mu, theta),
    }
}

/// U_θ^{(μ)} from sampled Caputo derivatives, without the closed forms of the
/// model variants. Fails when the sampled variation does not settle.
pub fn seminorm_interior_sampled(u: &SingularFunction, mu: f64, theta: f64) -> Result<f64> {
    order_of(mu)?;
    if let SingularFunction::BlackBox(b) = u {
        if b.hint.is_none() {
            return Err(Error::InsufficientRegularity("black box needs a regularity hint for its seminorm".into()));
        }
    }
    let mut total = 0.0;
    for side in [Side::Left, Side::Right] {
        total += caputo_limit(u, theta, mu, side)?.abs();
        total += caputo_total_variation(u, theta, mu, side, TV_POINTS)?;
    }
    Ok(total)
}

/// U_-^{(μ,m)} = V[v^{(m)}] + |sin μπ| Σ_{l≤m} |v^{(l)}(-1+)| with v the left
/// Caputo derivative of order μ anchored at -1.
pub fn seminorm_endpoint(u: &SingularFunction, mu: f64, m: u32) -> Result<f64> {
    order_of(mu)?;
    let SingularFunction::EndpointPower { mu: own, modulator } = u else {
        return Err(Error::InsufficientRegularity(format!(
            "endpoint seminorm needs the (1+x)^mu g(x) form, got {}",
            u.label()
        )));
    };
    if *own != mu {
        return Err(Error::HypothesisViolated(format!("order {mu} differs from the exponent {own}")));
    }
    let s = sin_pi(mu).abs();
    if modulator.is_one() {
        return Ok(s * gamma_unchecked(mu + 1.0));
    }
    let v = endpoint_caputo_series(mu, modulator)?;
    let boundary: f64 = (0..=m as usize).map(|l| v.derivative_at_minus1(l).abs()).sum();
    Ok(v.total_variation(m as usize)? + s * boundary)
}

fn require_interior(p: &RegularityProfile) -> Result<()> {
    match p.location {
        Location::Interior(_) => Ok(()),
        _ => Err(not_stated("interior estimates need an interior singular point")),
    }
}

/// Right-hand sides of the interior estimates at degree N.
pub fn interior_bounds(profile: &RegularityProfile, n: usize, which: InteriorNorm) -> Result<f64> {
    require_interior(profile)?;
    let mu = profile.mu;
    let u = profile.seminorm;
    let nf = n as f64;
    match which {
        InteriorNorm::Linf => {
            if !(mu > 0.5) || nf < mu {
                return Err(not_stated(format!(
                    "mu > 1/2 and N >= mu required for the L-infinity bound (mu={mu}, N={n})"
                )));
            }
            let ln = lgamma(0.5 * (nf - mu + 1.0)) - lgamma(0.5 * (nf + mu)) - (mu - 1.0) * LN_2 - 0.5 * PI.ln();
            Ok(u * ln.exp() / (mu - 0.5))
        }
        InteriorNorm::WeightedLinf => {
            if !(mu > 0.0) || nf < mu {
                return Err(not_stated(format!("N >= mu > 0 required for the weighted bound (mu={mu}, N={n})")));
            }
            if mu <= 1.0 {
                WEIGHTED_WARNING.call_once(|| {
                    warn!("weighted maximum-norm bound used with mu = {mu} <= 1, where its derivation needs mu > 1")
                });
            }
            let ln = lgamma(0.5 * (nf - mu + 1.0)) - lgamma(0.5 * (nf + mu + 1.0)) - (mu - 1.0) * LN_2;
            Ok(u * ln.exp() / (mu * PI))
        }
        InteriorNorm::L2 => {
            if !(mu > -0.5) || !(mu < nf) {
                return Err(not_stated(format!("-1/2 < mu < N required for the L2 bound (mu={mu}, N={n})")));
            }
            let ln = lgamma(nf - mu) - lgamma(nf + mu + 1.0);
            Ok(u * (2.0 / ((2.0 * mu + 1.0) * PI) * ln.exp()).sqrt())
        }
    }
}

/// Right-hand sides of the endpoint estimates at degree N, with m from the profile.
pub fn endpoint_bounds(profile: &RegularityProfile, n: usize, which: EndpointNorm) -> Result<f64> {
    if profile.location != Location::LeftEndpoint {
        return Err(not_stated("endpoint estimates are stated for a singularity at x = -1"));
    }
    let mu = profile.mu;
    let mf = profile.m as f64;
    let nf = n as f64;
    let u = profile.seminorm;
    match which {
        EndpointNorm::Linf => {
            if !(mu > 0.5) || nf < mu + mf {
                return Err(not_stated(format!(
                    "mu > 1/2 and N >= mu+m required for the L-infinity bound (mu={mu}, m={mf}, N={n})"
                )));
            }
            if !(mu > 1.0) {
                return Err(not_stated(format!(
                    "the L-infinity endpoint bound divides by mu-1, which is not positive for mu={mu}"
                )));
            }
            let s = mu + mf;
            let first = (lgamma(0.5 * (nf - s + 1.0)) - lgamma(0.5 * (nf + s)) - (s - 1.0) * LN_2 - 0.5 * PI.ln())
                .exp()
                / (s - 0.5);
            let mut sum = 0.0;
            for j in 0..=profile.m {
                let a = mu + j as f64;
                let ln = a * LN_2 + lgamma(a + 1.0) + lgamma(nf - a + 1.0) - lgamma(nf + a + 1.0);
                sum += ln.exp() / (PI * (a - 1.0));
            }
            Ok((first + sum) * u)
        }
        EndpointNorm::L2 => {
            if !(mu > -0.5) || !(nf > mu + mf) {
                return Err(not_stated(format!(
                    "mu > -1/2 and N > mu+m required for the L2 bound (mu={mu}, m={mf}, N={n})"
                )));
            }
            let s = mu + mf;
            let first = 4.0 / ((2.0 * s + 1.0) * PI) * (lgamma(nf - s) - lgamma(nf + s + 1.0)).exp();
            let ln2 = (6.0 * mu + 8.0) * LN_2 + 2.0 * lgamma(mu + 1.0) - 2.0 * PI.ln() - (4.0 * mu + 2.0).ln()
                + 2.0 * ((nf + 1.0) / (2.0 * nf + 1.0)).ln()
                + lgamma(2.0 * nf - 2.0 * mu + 1.0)
                - lgamma(2.0 * nf + 2.0 * mu + 3.0);
            Ok((first + ln2.exp()).sqrt() * u)
        }
    }
}

/// Pointwise bounds for |x| at 0 and at ±1.
pub fn absx_pointwise_bounds(n: usize) -> Result<(f64, f64)> {
    if n <= 2 {
        return Err(domain(format!("pointwise bounds for |x| need N > 2, got {n}")));
    }
    let nf = n as f64;
    let at_zero = 2.0 / (PI * (nf - 1.0));
    let at_pm1 = (lgamma(0.5 * nf - 1.0) - lgamma(0.5 * nf + 0.5)).exp() / (2.0 * PI.sqrt());
    Ok((at_zero, at_pm1))
}

/// |û_n| ≤ (2n+1) Γ((n-μ)/2) U / (2^{μ+2} √π Γ((n+μ+3)/2)) for n ≥ μ+1.
pub fn coeff_decay_bound(profile: &RegularityProfile, n: usize) -> Result<f64> {
    let mu = profile.mu;
    let nf = n as f64;
    if nf < mu + 1.0 {
        return Err(Error::BelowThreshold { n, threshold: mu + 1.0 });
    }
    let ln = lgamma(0.5 * (nf - mu)) - lgamma(0.5 * (nf + mu + 3.0)) - (mu + 2.0) * LN_2 - 0.5 * PI.ln();
    Ok((2.0 * nf + 1.0) * ln.exp() * profile.seminorm)
}

/// One bound as a function of the degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub profile: RegularityProfile,
    pub values: BTreeMap<usize, f64>,
}

impl BoundCurve {
    pub fn evaluate(kind: BoundKind, profile: RegularityProfile, degrees: &[usize]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for &n in degrees {
            let v = match kind {
                BoundKind::LinfInterior => interior_bounds(&profile, n, InteriorNorm::Linf)?,
                BoundKind::WeightedLinfInterior => interior_bounds(&profile, n, InteriorNorm::WeightedLinf)?,
                BoundKind::L2Interior => interior_bounds(&profile, n, InteriorNorm::L2)?,
                BoundKind::LinfEndpoint => endpoint_bounds(&profile, n, EndpointNorm::Linf)?,
                BoundKind::L2Endpoint => endpoint_bounds(&profile, n, EndpointNorm::L2)?,
                BoundKind::AbsxAtZero => absx_pointwise_bounds(n)?.0,
                BoundKind::AbsxAtPm1 => absx_pointwise_bounds(n)?.1,
                BoundKind::CoeffDecay => coeff_decay_bound(&profile, n)?,
            };
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("{} at N={n}", kind.as_str())));
            }
            values.insert(n, v);
        }
        Ok(Self { kind, profile, values })
    }

    /// True when the stored values never increase with N.
    pub fn is_nonincreasing(&self) -> bool {
        let v: Vec<f64> = self.values.values().copied().collect();
        v.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["N", "bound", "kind", "mu", "k", "m", "seminorm"])?;
        for (n, b) in &self.values {
            out.write_record([
                n.to_string(),
                format!("{b:e}"),
                self.kind.as_str().to_string(),
                self.profile.mu.to_string(),
                self.profile.k.to_string(),
                self.profile.m.to_string(),
                format!("{:e}", self.profile.seminorm),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::Modulator;

    fn interior(mu: f64, u: f64) -> RegularityProfile {
        RegularityProfile::new(RegularityProfile::order_for(mu), mu, Location::Interior(0.0), 0, u).unwrap()
    }

    #[test]
    fn model_seminorms() {
        let g = gamma_unchecked(1.6);
        let u = SingularFunction::interior_plus_power(0.3, 0.6).unwrap();
        assert!((seminorm_interior(&u, 0.6, 0.3).unwrap() - g).abs() < 1e-15);
        let a = SingularFunction::abs_power(1.7).unwrap();
        assert!((seminorm_interior(&a, 1.7, 0.0).unwrap() - 2.0 * gamma_unchecked(2.7)).abs() < 1e-14);
        assert_eq!(seminorm_interior(&SingularFunction::AbsX, 1.0, 0.0).unwrap(), 2.0);
    }

    #[test]
    fn sampled_seminorm_agrees_with_closed_form() {
        let u = SingularFunction::interior_plus_power(0.3, 0.6).unwrap();
        let s = seminorm_interior_sampled(&u, 0.6, 0.3).unwrap();
        assert!((s - gamma_unchecked(1.6)).abs() < 1e-3 * s, "{s}");
        let a = SingularFunction::abs_power(1.7).unwrap();
        let s = seminorm_interior_sampled(&a, 1.7, 0.0).unwrap();
        assert!((s - 2.0 * gamma_unchecked(2.7)).abs() < 1e-3 * s, "{s}");
    }

    #[test]
    fn black_box_without_hint_refuses() {
        let b = SingularFunction::black_box(|x: f64| x.abs().powf(1.5), Some(0.0));
        assert!(matches!(seminorm_interior(&b, 1.5, 0.0), Err(Error::InsufficientRegularity(_))));
    }

    #[test]
    fn endpoint_seminorms() {
        let u = SingularFunction::endpoint_power(1.2, Modulator::One).unwrap();
        let want = sin_pi(1.2).abs() * gamma_unchecked(2.2);
        assert!((seminorm_endpoint(&u, 1.2, 3).unwrap() - want).abs() < 1e-15);
        let k = SingularFunction::endpoint_power(2.0, Modulator::One).unwrap();
        assert_eq!(seminorm_endpoint(&k, 2.0, 1).unwrap(), 0.0);
        let s = SingularFunction::endpoint_power(1.2, Modulator::Sin).unwrap();
        let v = seminorm_endpoint(&s, 1.2, 2).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!(seminorm_endpoint(&SingularFunction::AbsX, 1.0, 0).is_err());
    }

    #[test]
    fn absx_bounds_at_eight() {
        let (z, e) = absx_pointwise_bounds(8).unwrap();
        assert!((z - 2.0 / (7.0 * PI)).abs() < 1e-15);
        assert!((z - 0.090_946).abs() < 1e-6);
        // Γ(3)/(2√π Γ(4.5))
        assert!((e - 0.048_504_363_608_958_6).abs() < 1e-14);
        assert!(absx_pointwise_bounds(2).is_err());
    }

    #[test]
    fn linf_interior_arithmetic() {
        // μ=1, U=2, N=8: 2 Γ(4)/(2^0 · 0.5 · √π · Γ(4.5))
        let b = interior_bounds(&interior(1.0, 2.0), 8, InteriorNorm::Linf).unwrap();
        let want = 2.0 * 6.0 / (0.5 * PI.sqrt() * 11.631_728_396_567_449);
        assert!((b - want).abs() < 1e-13 * want);
    }

    #[test]
    fn preconditions_refuse() {
        assert!(matches!(interior_bounds(&interior(0.4, 1.0), 8, InteriorNorm::Linf), Err(Error::BoundNotStated(_))));
        assert!(interior_bounds(&interior(1.7, 1.0), 1, InteriorNorm::Linf).is_err());
        assert!(interior_bounds(&interior(0.4, 1.0), 8, InteriorNorm::L2).is_ok());
        let p = RegularityProfile::new(1, 0.1, Location::LeftEndpoint, 0, 1.0).unwrap();
        assert!(endpoint_bounds(&p, 8, EndpointNorm::Linf).is_err());
        assert!(endpoint_bounds(&p, 8, EndpointNorm::L2).is_ok());
        assert!(coeff_decay_bound(&interior(1.7, 1.0), 2).is_err());
    }

    #[test]
    fn half_order_gap() {
        let p = interior(1.7, 1.0);
        let r = |n| {
            interior_bounds(&p, n, InteriorNorm::Linf).unwrap()
                / interior_bounds(&p, n, InteriorNorm::WeightedLinf).unwrap()
        };
        let slope = (r(512) / r(32)).ln() / 16f64.ln();
        assert!((slope - 0.5).abs() < 0.05, "{slope}");
    }

    #[test]
    fn curve_csv_and_monotone() {
        let c = BoundCurve::evaluate(BoundKind::L2Interior, interior(1.7, 2.0), &[8, 16, 32]).unwrap();
        assert!(c.is_nonincreasing());
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("N,bound,kind,mu,k,m,seminorm\n8,"));
        assert_eq!(text.lines().count(), 4);
    }
}
