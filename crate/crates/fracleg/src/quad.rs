//! Adaptive Gauss–Jacobi quadrature for integrands that behave like
//! |x - s|^e near a finite set of declared points s.
//!
//! Panels touching a declared point use a Gauss–Jacobi rule whose weight carries
//! the algebraic factor, so the rule only sees the smooth remainder. Panels are
//! bisected where the difference between an n-point and a 2n-point rule is
//! largest until the summed difference meets the tolerance.

use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::specfun::gamma::lgamma;

/// Algebraic behaviour |x - at|^left for x < at and |x - at|^right for x > at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub at: f64,
    pub left: f64,
    pub right: f64,
}

impl Singularity {
    pub fn new(at: f64, left: f64, right: f64) -> Self {
        Self { at, left, right }
    }

    pub fn symmetric(at: f64, exponent: f64) -> Self {
        Self { at, left: exponent, right: exponent }
    }

    /// A breakpoint with no algebraic weight (a kink or a jump).
    pub fn breakpoint(at: f64) -> Self {
        Self { at, left: 0.0, right: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Points of the coarse rule on each panel; the fine rule uses twice as many.
    pub nodes: usize,
    pub max_panels: usize,
    /// Polynomial degree of the smooth factor, used to presplit oscillatory integrands.
    pub degree_hint: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, nodes: DEFAULT_NODES, max_panels: 4000, degree_hint: 0 }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_degree_hint(mut self, degree: usize) -> Self {
        self.degree_hint = degree;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Nodes and weights on [-1, 1] for the weight (1-t)^alpha (1+t)^beta.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const DEFAULT_NODES: usize = 20;

/// Gauss–Jacobi rule by the Golub–Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if n == 0 {
        return Err(domain("a quadrature rule needs at least one node"));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(domain(format!("Gauss-Jacobi exponents must exceed -1, got ({alpha}, {beta})")));
    }
    let ab = alpha + beta;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    d[0] = (beta - alpha) / (ab + 2.0);
    for k in 1..n {
        let s = 2.0 * k as f64 + ab;
        d[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for k in 1..n {
        let kf = k as f64;
        let b2 = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let s = 2.0 * kf + ab;
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        e[k - 1] = b2.sqrt();
    }
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + lgamma(alpha + 1.0) + lgamma(beta + 1.0) - lgamma(ab + 2.0);
    let mu0 = ln_mu0.exp();
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z).map(|(x, v)| (x, mu0 * v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

pub fn gauss_legendre(n: usize) -> Result<Rule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Implicit QL on a symmetric tridiagonal matrix, tracking only the first row
/// of the eigenvector matrix. `e[i]` couples rows i and i+1.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::NonConvergent("tridiagonal eigenvalue iteration".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn default_legendre_pair() -> &'static (Rule, Rule) {
    static PAIR: OnceLock<(Rule, Rule)> = OnceLock::new();
    PAIR.get_or_init(|| {
        (gauss_legendre(DEFAULT_NODES).expect("valid rule"), gauss_legendre(2 * DEFAULT_NODES).expect("valid rule"))
    })
}

struct RuleBook {
    n: usize,
    plain: Option<(Rule, Rule)>,
    weighted: Vec<((f64, f64), (Rule, Rule))>,
}

impl RuleBook {
    fn new(n: usize) -> Result<Self> {
        let plain = if n == DEFAULT_NODES { None } else { Some((gauss_legendre(n)?, gauss_legendre(2 * n)?)) };
        Ok(Self { n, plain, weighted: Vec::new() })
    }

    fn index(&mut self, ep: f64, eq: f64) -> Result<Option<usize>> {
        if ep == 0.0 && eq == 0.0 {
            return Ok(None);
        }
        if let Some(i) = self.weighted.iter().position(|(k, _)| *k == (ep, eq)) {
            return Ok(Some(i));
        }
        // (1-t)^alpha sits at the right end q, (1+t)^beta at the left end p
        let pair = (gauss_jacobi(self.n, eq, ep)?, gauss_jacobi(2 * self.n, eq, ep)?);
        self.weighted.push(((ep, eq), pair));
        Ok(Some(self.weighted.len() - 1))
    }

    fn pair(&self, idx: Option<usize>) -> &(Rule, Rule) {
        match idx {
            Some(i) => &self.weighted[i].1,
            None => self.plain.as_ref().unwrap_or_else(|| default_legendre_pair()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    p: f64,
    q: f64,
    ep: f64,
    eq: f64,
    value: f64,
    error: f64,
    floor: f64,
}

fn apply_rule<F: Fn(f64) -> f64>(f: &F, rule: &Rule, p: f64, q: f64, ep: f64, eq: f64) -> Result<(f64, f64)> {
    let half = 0.5 * (q - p);
    let mid = 0.5 * (p + q);
    let scale = half.powf(1.0 + ep + eq);
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let y = mid + half * t;
        let mut h = f(y);
        if ep != 0.0 {
            h /= (y - p).powf(ep);
        }
        if eq != 0.0 {
            h /= (q - y).powf(eq);
        }
        if !h.is_finite() {
            return Err(Error::NonFinite(format!("integrand at {y}")));
        }
        sum += w * h;
        abs_sum += (w * h).abs();
    }
    Ok((scale * sum, scale * abs_sum))
}

fn eval_panel<F: Fn(f64) -> f64>(f: &F, book: &mut RuleBook, p: f64, q: f64, ep: f64, eq: f64) -> Result<Panel> {
    let idx = book.index(ep, eq)?;
    let (coarse, fine) = book.pair(idx);
    let (q1, _) = apply_rule(f, coarse, p, q, ep, eq)?;
    let (q2, abs2) = apply_rule(f, fine, p, q, ep, eq)?;
    let floor = 64.0 * f64::EPSILON * abs2;
    Ok(Panel { p, q, ep, eq, value: q2, error: (q2 - q1).abs(), floor })
}

/// Integral of `f` over [a, b]. Each declared singularity inside or at the ends
/// of the interval becomes a panel boundary carrying its algebraic exponent.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singularities: &[Singularity],
    opts: &QuadOptions,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if a > b {
        let flipped: Vec<Singularity> = singularities.iter().map(|s| Singularity::new(s.at, s.right, s.left)).collect();
        let est = integrate(f, b, a, &flipped, opts)?;
        return Ok(Estimate { value: -est.value, error: est.error });
    }

    // breakpoints with the exponent seen from each side
    let mut cuts: Vec<(f64, f64, f64)> = vec![(a, 0.0, 0.0), (b, 0.0, 0.0)];
    for s in singularities {
        if s.at < a || s.at > b {
            continue;
        }
        if s.at == a {
            cuts[0].2 += s.right;
        } else if s.at == b {
            cuts[1].1 += s.left;
        } else {
            cuts.push((s.at, s.left, s.right));
        }
    }
    cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    cuts.dedup_by(|x, y| {
        if x.0 == y.0 {
            // coincident factors multiply, so their exponents add
            y.1 += x.1;
            y.2 += x.2;
            true
        } else {
            false
        }
    });

    let mut book = RuleBook::new(opts.nodes.max(2))?;
    let pieces = if opts.degree_hint > opts.nodes { opts.degree_hint / opts.nodes + 1 } else { 1 };
    let mut panels: Vec<Panel> = Vec::new();
    for w in cuts.windows(2) {
        let (p, _, ep) = w[0];
        let (q, eq, _) = w[1];
        let len = q - p;
        let local = ((pieces as f64 * len / (b - a)).ceil() as usize).max(1);
        for j in 0..local {
            let lo = if j == 0 { p } else { p + len * j as f64 / local as f64 };
            let hi = if j + 1 == local { q } else { p + len * (j + 1) as f64 / local as f64 };
            let e_lo = if j == 0 { ep } else { 0.0 };
            let e_hi = if j + 1 == local { eq } else { 0.0 };
            panels.push(eval_panel(&f, &mut book, lo, hi, e_lo, e_hi)?);
        }
    }

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error.max(p.floor)).sum();
        let floor: f64 = panels.iter().map(|p| p.floor).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target || err <= 2.0 * floor {
            return Ok(Estimate { value: total, error: err });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.error > p.floor)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("some panel exceeds its floor");
        if panels.len() >= opts.max_panels {
            return Err(Error::Quadrature { requested: target, achieved: err });
        }
        let pn = panels.swap_remove(worst);
        let mid = 0.5 * (pn.p + pn.q);
        if mid <= pn.p || mid >= pn.q {
            return Err(Error::Quadrature { requested: target, achieved: err });
        }
        panels.push(eval_panel(&f, &mut book, pn.p, mid, pn.ep, 0.0)?);
        panels.push(eval_panel(&f, &mut book, mid, pn.q, 0.0, pn.eq)?);
    }
}
