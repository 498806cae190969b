use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadOptions, Singularity};
use crate::specfun::gamma::gamma_unchecked;

/// A discontinuity with its one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub at: f64,
    pub left: f64,
    pub right: f64,
}

impl Jump {
    pub fn height(&self) -> f64 {
        self.right - self.left
    }
}

/// Samples of a function of bounded variation. Samples sitting exactly on a
/// declared jump are taken to be right-continuous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BVSamples {
    grid: Vec<f64>,
    values: Vec<f64>,
    jumps: Vec<Jump>,
}

impl BVSamples {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, mut jumps: Vec<Jump>) -> Result<Self> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(domain("grid and values must be nonempty and of equal length"));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("grid must be strictly increasing"));
        }
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        if jumps.iter().any(|j| j.at < lo || j.at > hi) {
            return Err(domain("jump outside the grid span"));
        }
        jumps.sort_by(|a, b| a.at.total_cmp(&b.at));
        Ok(Self { grid, values, jumps })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Vec<f64>, f: F, jumps: Vec<Jump>) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values, jumps)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Value at `x` by linear interpolation within the continuous piece holding `x`.
    fn value_at(&self, x: f64, from_right: bool) -> f64 {
        let i = self.grid.partition_point(|g| *g < x);
        if i < self.grid.len() && self.grid[i] == x {
            return self.values[i];
        }
        let (l, r) = (i - 1, i);
        let (xl, xr) = (self.grid[l], self.grid[r]);
        let mut vl = self.values[l];
        let mut vr = self.values[r];
        for j in &self.jumps {
            if j.at > xl && j.at < xr {
                if x < j.at || (x == j.at && !from_right) {
                    vr = j.left;
                    return vl + (vr - vl) * (x - xl) / (j.at - xl);
                }
                vl = j.right;
                return vl + (vr - vl) * (x - j.at) / (xr - j.at);
            }
        }
        vl + (vr - vl) * (x - xl) / (xr - xl)
    }
}

/// Total variation over [c, d] from the sample sequence plus the declared jumps.
pub fn total_variation(g: &BVSamples, c: f64, d: f64) -> Result<f64> {
    if g.values.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("NaN sample in total_variation".into()));
    }
    if !(c < d) {
        return Ok(0.0);
    }
    let (lo, hi) = (g.grid[0], g.grid[g.grid.len() - 1]);
    if c < lo || d > hi {
        return Err(domain(format!("interval [{c}, {d}] outside the sample span [{lo}, {hi}]")));
    }
    let mut seq = vec![g.value_at(c, true)];
    let mut ji = g.jumps.iter().peekable();
    for (&x, &v) in g.grid.iter().zip(&g.values) {
        while let Some(j) = ji.peek() {
            if j.at <= x && j.at < d {
                if j.at > c {
                    seq.push(j.left);
                    seq.push(j.right);
                }
                ji.next();
            } else {
                break;
            }
        }
        if x > c && x < d {
            seq.push(v);
        }
    }
    for j in ji {
        if j.at > c && j.at < d {
            seq.push(j.left);
            seq.push(j.right);
        }
    }
    seq.push(g.value_at(d, false));
    Ok(seq.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

/// Limit of the Riemann–Liouville integral of (x-a)^γ g(x) as x approaches the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum BoundaryLimit {
    Zero,
    Finite(f64),
    Infinite,
}

pub fn boundary_limit(gamma: f64, rho: f64, g_at_endpoint: f64) -> Result<BoundaryLimit> {
    if !(gamma > -1.0 && rho > 0.0) {
        return Err(domain(format!("boundary_limit needs gamma > -1 and rho > 0, got {gamma}, {rho}")));
    }
    let s = rho + gamma;
    if s.abs() <= 1e-14 * rho.max(1.0) {
        Ok(BoundaryLimit::Finite(g_at_endpoint * gamma_unchecked(gamma + 1.0)))
    } else if s > 0.0 {
        Ok(BoundaryLimit::Zero)
    } else {
        Ok(BoundaryLimit::Infinite)
    }
}

/// An integrator of bounded variation: an a.e. density plus point masses.
pub struct StieltjesMeasure<'a> {
    pub density: &'a (dyn Fn(f64) -> f64 + Sync),
    pub singularities: Vec<Singularity>,
    pub jumps: Vec<Jump>,
}

/// ∫_a^b f dv over the open interval: the density part by quadrature and each
/// interior jump as a point mass f(s)·(v(s+) - v(s-)).
pub fn rs_integral<F: Fn(f64) -> f64>(
    f: F,
    measure: &StieltjesMeasure<'_>,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut sing = measure.singularities.clone();
    for j in &measure.jumps {
        sing.push(Singularity::breakpoint(j.at));
    }
    let smooth = integrate(|t| f(t) * (measure.density)(t), a, b, &sing, opts)?.value;
    let sign = if a <= b { 1.0 } else { -1.0 };
    let masses: f64 = measure.jumps.iter().filter(|j| j.at > lo && j.at < hi).map(|j| f(j.at) * j.height()).sum();
    Ok(smooth + sign * masses)
}
