use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::Singularity;

/// Orientation of a one-sided operator. `Left` is anchored at the left end of
/// its interval (I_{a+}, D_{θ+}) and acts on points above the anchor; `Right`
/// is anchored at the right end (I_{b-}, D_{θ-}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Smooth factor g in (1+x)^μ g(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulator {
    One,
    Sin,
    Cos,
    Exp,
    /// Monomial coefficients c_0 + c_1 x + ...
    Polynomial(Vec<f64>),
}

impl Modulator {
    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    pub fn derivative(&self, j: usize, x: f64) -> f64 {
        match self {
            Modulator::One => {
                if j == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Modulator::Sin => match j % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            },
            Modulator::Cos => match j % 4 {
                0 => x.cos(),
                1 => -x.sin(),
                2 => -x.cos(),
                _ => x.sin(),
            },
            Modulator::Exp => x.exp(),
            Modulator::Polynomial(c) => {
                if j >= c.len() {
                    return 0.0;
                }
                // Horner on the j-th derivative coefficients
                let mut acc = 0.0;
                for i in (j..c.len()).rev() {
                    acc = acc * x + c[i] * falling(i as f64, j);
                }
                acc
            }
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Modulator::One => true,
            Modulator::Polynomial(c) => c.first() == Some(&1.0) && c[1..].iter().all(|v| *v == 0.0),
            _ => false,
        }
    }

    /// Degree when g is a polynomial.
    pub fn degree(&self) -> Option<usize> {
        match self {
            Modulator::One => Some(0),
            Modulator::Polynomial(c) => Some(c.iter().rposition(|v| *v != 0.0).unwrap_or(0)),
            _ => None,
        }
    }

    /// Bound on |g^{(j)}| over [-1, 1] valid for every j.
    pub fn derivative_bound(&self) -> f64 {
        match self {
            Modulator::One => 1.0,
            Modulator::Sin | Modulator::Cos => 1.0,
            Modulator::Exp => std::f64::consts::E,
            Modulator::Polynomial(c) => {
                // crude: sum of |c_i| i!/(i-j)! maximised over j
                (0..c.len())
                    .map(|j| (j..c.len()).map(|i| c[i].abs() * falling(i as f64, j)).sum::<f64>())
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Modulator::One => "1".into(),
            Modulator::Sin => "sin".into(),
            Modulator::Cos => "cos".into(),
            Modulator::Exp => "exp".into(),
            Modulator::Polynomial(c) => format!("poly{c:?}"),
        }
    }
}

/// Falling factorial λ(λ-1)...(λ-j+1).
pub fn falling(lambda: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |p, i| p * (lambda - i as f64))
}

/// Where the singularity of a regularity profile sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Interior(f64),
    LeftEndpoint,
    RightEndpoint,
}

impl Location {
    pub fn point(&self) -> f64 {
        match self {
            Location::Interior(t) => *t,
            Location::LeftEndpoint => -1.0,
            Location::RightEndpoint => 1.0,
        }
    }
}

/// Smoothness class of a function: k-1 absolutely continuous derivatives, a
/// Caputo derivative of order μ ∈ (k-1, k] of bounded variation, m further
/// derivatives of it (endpoint case), and the resulting seminorm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityProfile {
    pub k: u32,
    pub mu: f64,
    pub location: Location,
    pub m: u32,
    pub seminorm: f64,
}

impl RegularityProfile {
    pub fn new(k: u32, mu: f64, location: Location, m: u32, seminorm: f64) -> Result<Self> {
        if k == 0 || !(mu > k as f64 - 1.0 && mu <= k as f64) {
            return Err(domain(format!("regularity needs k-1 < mu <= k, got k={k}, mu={mu}")));
        }
        if !(seminorm >= 0.0) {
            return Err(domain(format!("seminorm must be nonnegative, got {seminorm}")));
        }
        if let Location::Interior(t) = location {
            if !(t > -1.0 && t < 1.0) {
                return Err(domain(format!("interior location {t} outside (-1, 1)")));
            }
        }
        Ok(Self { k, mu, location, m, seminorm })
    }

    /// k = ⌈μ⌉ for positive μ.
    pub fn order_for(mu: f64) -> u32 {
        (mu.ceil() as u32).max(1)
    }
}

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function known only through point evaluations.
#[derive(Clone)]
pub struct BlackBox {
    pub eval: Evaluator,
    pub singularity: Option<f64>,
    pub hint: Option<RegularityProfile>,
    /// One-sided limits (θ-, θ+) of the Caputo derivatives at the singularity.
    pub caputo_limits: Option<(f64, f64)>,
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("singularity", &self.singularity)
            .field("hint", &self.hint)
            .field("caputo_limits", &self.caputo_limits)
            .finish_non_exhaustive()
    }
}

/// Target function of an expansion.
#[derive(Debug, Clone)]
pub enum SingularFunction {
    /// (x - θ)_+^μ
    InteriorPlusPower {
        theta: f64,
        mu: f64,
    },
    /// |x|^μ
    AbsPower {
        mu: f64,
    },
    /// |x|
    AbsX,
    /// (1 + x)^μ g(x)
    EndpointPower {
        mu: f64,
        modulator: Modulator,
    },
    BlackBox(BlackBox),
}

impl SingularFunction {
    pub fn interior_plus_power(theta: f64, mu: f64) -> Result<Self> {
        if !(theta > -1.0 && theta < 1.0) {
            return Err(domain(format!("theta must lie in (-1, 1), got {theta}")));
        }
        if !(mu > -1.0) || !mu.is_finite() {
            return Err(domain(format!("exponent must exceed -1, got {mu}")));
        }
        Ok(Self::InteriorPlusPower { theta, mu })
    }

    pub fn abs_power(mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(domain(format!("|x|^mu needs mu > 0, got {mu}")));
        }
        Ok(Self::AbsPower { mu })
    }

    pub fn endpoint_power(mu: f64, modulator: Modulator) -> Result<Self> {
        if !(mu > -1.0) || !mu.is_finite() {
            return Err(domain(format!("exponent must exceed -1, got {mu}")));
        }
        Ok(Self::EndpointPower { mu, modulator })
    }

    /// A smooth function g on [-1, 1] given by its modulator.
    pub fn smooth(modulator: Modulator) -> Self {
        Self::EndpointPower { mu: 0.0, modulator }
    }

    pub fn black_box<F>(f: F, singularity: Option<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::BlackBox(BlackBox { eval: Arc::new(f), singularity, hint: None, caputo_limits: None })
    }

    pub fn with_hint(self, hint: RegularityProfile, caputo_limits: Option<(f64, f64)>) -> Self {
        match self {
            Self::BlackBox(mut b) => {
                b.hint = Some(hint);
                b.caputo_limits = caputo_limits;
                Self::BlackBox(b)
            }
            other => other,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::InteriorPlusPower { theta, mu } => {
                if x > *theta {
                    (x - theta).powf(*mu)
                } else {
                    0.0
                }
            }
            Self::AbsPower { mu } => x.abs().powf(*mu),
            Self::AbsX => x.abs(),
            Self::EndpointPower { mu, modulator } => (1.0 + x).powf(*mu) * modulator.eval(x),
            Self::BlackBox(b) => (b.eval)(x),
        }
    }

    /// Classical k-th derivative away from the singular point (a.e. sense).
    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        if k == 0 {
            return Ok(self.eval(x));
        }
        Ok(match self {
            Self::InteriorPlusPower { theta, mu } => {
                if x > *theta {
                    falling(*mu, k) * (x - theta).powf(mu - k as f64)
                } else if x < *theta || *mu > k as f64 {
                    0.0
                } else {
                    one_sided_at_zero(*mu, k)
                }
            }
            Self::AbsPower { mu } => {
                let s = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
                if x == 0.0 {
                    one_sided_at_zero(*mu, k)
                } else {
                    s * falling(*mu, k) * x.abs().powf(mu - k as f64)
                }
            }
            Self::AbsX => match k {
                1 => x.signum() * if x == 0.0 { 0.0 } else { 1.0 },
                _ => 0.0,
            },
            Self::EndpointPower { mu, modulator } => {
                let mut acc = 0.0;
                let mut binom = 1.0;
                for j in 0..=k {
                    let fj = falling(*mu, j);
                    if fj != 0.0 {
                        acc += binom * fj * (1.0 + x).powf(mu - j as f64) * modulator.derivative(k - j, x);
                    }
                    binom = binom * (k - j) as f64 / (j + 1) as f64;
                }
                acc
            }
            Self::BlackBox(_) => {
                return Err(Error::InsufficientRegularity(
                    "derivatives of a black-box evaluator are not available".into(),
                ))
            }
        })
    }

    /// Points where the function (or its derivatives) is singular, with the
    /// algebraic exponent of the function itself on each side.
    pub fn singularities(&self) -> Vec<Singularity> {
        self.derivative_singularities(0)
    }

    /// Algebraic behaviour of the k-th derivative near the singular points.
    pub fn derivative_singularities(&self, k: usize) -> Vec<Singularity> {
        let kf = k as f64;
        match self {
            Self::InteriorPlusPower { theta, mu } => {
                if is_integer(*mu) && *mu >= 0.0 && kf > *mu {
                    vec![Singularity::breakpoint(*theta)]
                } else {
                    vec![Singularity::new(*theta, 0.0, mu - kf)]
                }
            }
            Self::AbsPower { mu } => {
                if is_integer(*mu) && kf > *mu {
                    vec![Singularity::breakpoint(0.0)]
                } else {
                    vec![Singularity::symmetric(0.0, mu - kf)]
                }
            }
            Self::AbsX => vec![Singularity::breakpoint(0.0)],
            Self::EndpointPower { mu, .. } => {
                if is_integer(*mu) && *mu >= 0.0 {
                    Vec::new()
                } else {
                    vec![Singularity::new(-1.0, 0.0, mu - kf)]
                }
            }
            Self::BlackBox(b) => b.singularity.map(Singularity::breakpoint).into_iter().collect(),
        }
    }

    /// Jumps (location, right minus left) of the k-th derivative.
    pub fn derivative_jumps(&self, k: usize) -> Vec<(f64, f64)> {
        match self {
            Self::InteriorPlusPower { theta, mu } if *mu == k as f64 => {
                vec![(*theta, falling(*mu, k))]
            }
            Self::AbsPower { mu } if *mu == k as f64 && k % 2 == 1 => vec![(0.0, 2.0 * falling(*mu, k))],
            Self::AbsX if k == 1 => vec![(0.0, 2.0)],
            _ => Vec::new(),
        }
    }

    /// Exponent λ such that the function behaves like c |x - s|^λ on the given
    /// side of its singular point s, if it has one there.
    pub fn local_exponent(&self, at: f64, side: Side) -> Option<f64> {
        match self {
            Self::InteriorPlusPower { theta, mu } if *theta == at => match side {
                Side::Left => Some(*mu),
                Side::Right => None,
            },
            Self::AbsPower { mu } if at == 0.0 => Some(*mu),
            Self::AbsX if at == 0.0 => Some(1.0),
            Self::EndpointPower { mu, .. } if at == -1.0 && !is_integer(*mu) => Some(*mu),
            _ => None,
        }
    }

    /// True when the function vanishes identically on the given side of `at`.
    pub fn vanishes_beyond(&self, at: f64, side: Side) -> bool {
        matches!(self, Self::InteriorPlusPower { theta, .. } if side == Side::Right && at <= *theta)
    }

    pub fn mu(&self) -> Option<f64> {
        match self {
            Self::InteriorPlusPower { mu, .. } | Self::AbsPower { mu } | Self::EndpointPower { mu, .. } => Some(*mu),
            Self::AbsX => Some(1.0),
            Self::BlackBox(b) => b.hint.map(|h| h.mu),
        }
    }

    pub fn is_black_box(&self) -> bool {
        matches!(self, Self::BlackBox(_))
    }

    pub fn label(&self) -> String {
        match self {
            Self::InteriorPlusPower { theta, mu } => format!("(x-{theta})_+^{mu}"),
            Self::AbsPower { mu } => format!("|x|^{mu}"),
            Self::AbsX => "|x|".into(),
            Self::EndpointPower { mu, modulator } => {
                if modulator.is_one() {
                    format!("(1+x)^{mu}")
                } else {
                    format!("(1+x)^{mu}*{}", modulator.name())
                }
            }
            Self::BlackBox(_) => "black-box".into(),
        }
    }
}

fn one_sided_at_zero(mu: f64, k: usize) -> f64 {
    let e = mu - k as f64;
    if e > 0.0 {
        0.0
    } else if e == 0.0 {
        falling(mu, k)
    } else {
        f64::INFINITY
    }
}

pub(crate) fn is_integer(x: f64) -> bool {
    x == x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulator_derivatives_cycle() {
        let x = 0.37;
        assert_eq!(Modulator::Sin.derivative(5, x), x.cos());
        assert_eq!(Modulator::Cos.derivative(2, x), -x.cos());
        let p = Modulator::Polynomial(vec![1.0, 2.0, 3.0]);
        assert!((p.eval(x) - (1.0 + 2.0 * x + 3.0 * x * x)).abs() < 1e-15);
        assert!((p.derivative(1, x) - (2.0 + 6.0 * x)).abs() < 1e-15);
        assert_eq!(p.derivative(2, x), 6.0);
        assert_eq!(p.derivative(3, x), 0.0);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let fns = [
            SingularFunction::interior_plus_power(0.2, 1.6).unwrap(),
            SingularFunction::abs_power(2.3).unwrap(),
            SingularFunction::endpoint_power(1.2, Modulator::Sin).unwrap(),
        ];
        let h = 1e-5;
        for u in &fns {
            for &x in &[-0.6, 0.45, 0.8] {
                let fd = (u.eval(x + h) - u.eval(x - h)) / (2.0 * h);
                let d1 = u.derivative(1, x).unwrap();
                assert!((fd - d1).abs() < 1e-8 * d1.abs().max(1.0), "{} at {x}", u.label());
                let fd2 = (u.derivative(1, x + h).unwrap() - u.derivative(1, x - h).unwrap()) / (2.0 * h);
                let d2 = u.derivative(2, x).unwrap();
                assert!((fd2 - d2).abs() < 1e-7 * d2.abs().max(1.0), "{} at {x}", u.label());
            }
        }
    }

    #[test]
    fn profile_validation() {
        assert!(RegularityProfile::new(2, 1.5, Location::Interior(0.0), 0, 1.0).is_ok());
        assert!(RegularityProfile::new(1, 1.5, Location::Interior(0.0), 0, 1.0).is_err());
        assert!(RegularityProfile::new(2, 1.5, Location::Interior(1.0), 0, 1.0).is_err());
        assert!(RegularityProfile::new(2, 1.5, Location::LeftEndpoint, 0, -1.0).is_err());
    }

    #[test]
    fn black_box_needs_metadata_for_derivatives() {
        let u = SingularFunction::black_box(|x: f64| x * x, None);
        assert!(matches!(u.derivative(1, 0.3), Err(Error::InsufficientRegularity(_))));
        assert_eq!(u.eval(0.5), 0.25);
    }
}
