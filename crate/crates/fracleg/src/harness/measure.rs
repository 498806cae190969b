use log::debug;
use serde::{Deserialize, Serialize};

use crate::bounds::WeightedNorm;
use crate::error::{domain, Error, Result};
use crate::fraccalc::SingularFunction;
use crate::legexp::{expand, LegendreSeries, Strategy};

/// Chebyshev points of the L∞ evaluation grid.
pub const GRID_POINTS: usize = 4097;
/// Points of the local cluster around each singular point.
pub const CLUSTER_POINTS: usize = 129;
/// The Parseval tail estimate must stay below this fraction of the partial sum.
pub const TAIL_FRACTION: f64 = 1e-3;
/// Largest reference degree the tail monitor may extend to.
pub const MAX_REFERENCE_DEGREE: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub linf: f64,
    pub weighted_linf: f64,
    pub l2: f64,
    pub argmax_location: f64,
    pub per_point_profile: Option<Vec<(f64, f64)>>,
}

/// Initial reference degree for the Parseval tail of degree-N errors.
pub fn reference_degree(n: usize) -> usize {
    (4 * n).max(n + 256)
}

/// Squared L² error of the degree-N truncation from the coefficients above N,
/// with the geometric estimate of what lies beyond the reference degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalTail {
    pub partial: f64,
    pub tail: f64,
    pub certified: bool,
}

impl ParsevalTail {
    pub fn l2(&self) -> f64 {
        (self.partial + self.tail).sqrt()
    }
}

fn block(c: &[f64], lo: usize, hi: usize) -> f64 {
    (lo..hi.min(c.len())).map(|n| 2.0 * c[n] * c[n] / (2 * n + 1) as f64).sum()
}

/// Parseval sum for degree N against the reference series.
pub fn parseval_tail(reference: &LegendreSeries, n: usize) -> Result<ParsevalTail> {
    let c = reference.coefficients();
    let m = c.len() - 1;
    if m < 2 * n + 2 {
        return Err(domain(format!("reference degree {m} too small for N = {n}")));
    }
    let partial = block(c, n + 1, m + 1);
    // last two dyadic blocks of the reference give the decay ratio
    let b1 = block(c, m / 4 + 1, m / 2 + 1);
    let b2 = block(c, m / 2 + 1, m + 1);
    let floor = (f64::EPSILON * f64::EPSILON) * reference.norm_sq().max(f64::MIN_POSITIVE) * m as f64;
    if b1 + b2 <= floor || partial <= floor {
        return Ok(ParsevalTail { partial, tail: 0.0, certified: true });
    }
    let r = b2 / b1;
    if !(r < 1.0) {
        return Ok(ParsevalTail { partial, tail: f64::INFINITY, certified: false });
    }
    let tail = b2 * r / (1.0 - r);
    Ok(ParsevalTail { partial, tail, certified: tail <= TAIL_FRACTION * partial })
}

/// Expansion of `u` deep enough that the Parseval tail of the degree-N error is
/// certified; the degree starts at [`reference_degree`] and doubles as needed.
pub fn reference_series(u: &SingularFunction, n: usize) -> Result<LegendreSeries> {
    let mut m = reference_degree(n);
    loop {
        let s = expand(u, m, Strategy::ClosedFormPreferred)?;
        let t = parseval_tail(&s, n)?;
        if t.certified {
            debug!("reference degree {m} certified for N={n} (tail {:e} of {:e})", t.tail, t.partial);
            return Ok(s);
        }
        if 2 * m > MAX_REFERENCE_DEGREE {
            return Err(Error::NonConvergent(format!(
                "Parseval tail {:e} exceeds {TAIL_FRACTION} of {:e} at reference degree {m}",
                t.tail, t.partial
            )));
        }
        m *= 2;
    }
}

/// Evaluation abscissas: Chebyshev points plus a cluster around each
/// singularity, sorted.
pub fn evaluation_grid(u: &SingularFunction, n: usize) -> Vec<f64> {
    let mut xs: Vec<f64> =
        (0..GRID_POINTS).map(|i| -(std::f64::consts::PI * i as f64 / (GRID_POINTS - 1) as f64).cos()).collect();
    let width = (2.0 / n.max(1) as f64).min(0.25);
    for s in u.singularities() {
        for i in 0..CLUSTER_POINTS {
            let t = -(std::f64::consts::PI * i as f64 / (CLUSTER_POINTS - 1) as f64).cos();
            let x = s.at + width * t;
            if x.abs() <= 1.0 {
                xs.push(x);
            }
        }
        xs.push(s.at);
    }
    xs.push(-1.0);
    xs.push(1.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Max of `f` over the grid, refined once by golden section between the
/// neighbours of the grid argmax.
fn grid_max<F: Fn(f64) -> f64>(f: F, xs: &[f64]) -> (f64, f64) {
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let (i, &v) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty grid");
    let lo = xs[i.saturating_sub(1)];
    let hi = xs[(i + 1).min(xs.len() - 1)];
    let (xr, vr) = golden_max(&f, lo, hi);
    if vr > v {
        (xr, vr)
    } else {
        (xs[i], v)
    }
}

/// Errors of the degree-N truncation, with the L² part taken from `reference`.
pub fn measure_errors_with(
    u: &SingularFunction,
    n: usize,
    reference: &LegendreSeries,
    keep_profile: bool,
) -> Result<ErrorReport> {
    if reference.degree() < n {
        return Err(domain(format!("reference degree {} below N = {n}", reference.degree())));
    }
    let s = reference.truncate(n);
    let err = |x: f64| (u.eval(x) - s.eval(x).unwrap_or(f64::NAN)).abs();
    let xs = evaluation_grid(u, n);
    let (argmax, linf) = grid_max(err, &xs);
    let w = WeightedNorm::default();
    let (_, weighted_linf) = grid_max(|x| w.weight(x) * err(x), &xs);
    // the weighted maximiser also witnesses at least that much plain error
    let linf = linf.max(weighted_linf);
    if !(linf.is_finite() && weighted_linf.is_finite()) {
        return Err(Error::NonFinite(format!("pointwise error of {} at N={n}", u.label())));
    }
    let tail = parseval_tail(reference, n)?;
    if !tail.certified {
        return Err(Error::NonConvergent(format!(
            "Parseval tail {:e} exceeds {TAIL_FRACTION} of {:e} for N={n}",
            tail.tail, tail.partial
        )));
    }
    let per_point_profile = keep_profile.then(|| xs.iter().map(|&x| (x, err(x))).collect());
    Ok(ErrorReport { n, linf, weighted_linf, l2: tail.l2(), argmax_location: argmax, per_point_profile })
}

/// Errors of the degree-N truncation of `u` in the maximum, weighted maximum
/// and L² norms.
pub fn measure_errors(u: &SingularFunction, n: usize) -> Result<ErrorReport> {
    let reference = reference_series(u, n)?;
    measure_errors_with(u, n, &reference, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::Modulator;

    #[test]
    fn polynomial_is_reproduced() {
        let p2 = SingularFunction::smooth(Modulator::Polynomial(vec![-0.5, 0.0, 1.5]));
        let r = measure_errors(&p2, 5).unwrap();
        assert!(r.linf < 1e-13 && r.weighted_linf < 1e-13 && r.l2 < 1e-13, "{r:?}");
    }

    #[test]
    fn grid_has_clusters() {
        let g = evaluation_grid(&SingularFunction::AbsX, 16);
        assert!(g.len() > GRID_POINTS);
        assert!(g.contains(&0.0));
        assert_eq!(g[0], -1.0);
        assert_eq!(*g.last().unwrap(), 1.0);
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7 && v.abs() < 1e-13);
    }

    #[test]
    fn smooth_exp_errors_are_tiny() {
        let e = SingularFunction::smooth(Modulator::Exp);
        let r = measure_errors(&e, 16).unwrap();
        assert!(r.linf < 1e-14, "{r:?}");
        assert!(r.weighted_linf <= r.linf);
    }
}
