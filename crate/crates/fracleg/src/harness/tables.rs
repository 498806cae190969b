use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{absx_pointwise_bounds, WeightedNorm};
use crate::error::{domain, Result};
use crate::fraccalc::SingularFunction;
use crate::legexp::{coefficient, Strategy};
use crate::specfun::legendre_eval;

use super::measure::{measure_errors_with, reference_series, ErrorReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    Linf,
    WeightedLinf,
    L2,
}

impl Norm {
    pub fn pick(&self, r: &ErrorReport) -> f64 {
        match self {
            Self::Linf => r.linf,
            Self::WeightedLinf => r.weighted_linf,
            Self::L2 => r.l2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub error: f64,
    pub order: Option<f64>,
}

/// Errors at doubling degrees with the observed orders log₂(e_{j-1}/e_j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn from_errors(degrees: &[usize], errors: &[f64]) -> Result<Self> {
        check_doubling(degrees)?;
        let rows = degrees
            .iter()
            .zip(errors)
            .enumerate()
            .map(|(j, (&n, &e))| ConvergenceRow { n, error: e, order: (j > 0).then(|| (errors[j - 1] / e).log2()) })
            .collect();
        Ok(Self { rows })
    }

    pub fn orders(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.order).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

fn check_doubling(degrees: &[usize]) -> Result<()> {
    if degrees.len() < 2 {
        return Err(domain("a convergence table needs at least two degrees"));
    }
    if degrees[0] == 0 || degrees.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(domain(format!("degrees must double from one row to the next, got {degrees:?}")));
    }
    Ok(())
}

/// Error reports for each degree, sharing one reference series.
pub fn error_reports(u: &SingularFunction, degrees: &[usize]) -> Result<Vec<ErrorReport>> {
    let top = degrees.iter().copied().max().ok_or_else(|| domain("no degrees given"))?;
    let reference = reference_series(u, top)?;
    degrees.par_iter().map(|&n| measure_errors_with(u, n, &reference, false)).collect()
}

/// One convergence table per requested norm.
pub fn convergence_table(
    u: &SingularFunction,
    degrees: &[usize],
    norms: &[Norm],
) -> Result<BTreeMap<Norm, ConvergenceTable>> {
    check_doubling(degrees)?;
    let reports = error_reports(u, degrees)?;
    let mut out = BTreeMap::new();
    for norm in norms {
        let e: Vec<f64> = reports.iter().map(|r| norm.pick(r)).collect();
        out.insert(*norm, ConvergenceTable::from_errors(degrees, &e)?);
    }
    Ok(out)
}

/// |û_n| at doubling degrees with the observed decay orders.
pub fn decay_table(u: &SingularFunction, degrees: &[usize]) -> Result<ConvergenceTable> {
    check_doubling(degrees)?;
    let c: Vec<f64> = degrees
        .par_iter()
        .map(|&n| coefficient(u, n, Strategy::ClosedFormPreferred).map(|(c, _)| c.abs()))
        .collect::<Result<_>>()?;
    ConvergenceTable::from_errors(degrees, &c)
}

/// Pointwise errors of the |x| expansion against the bounds at 0 and ±1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub error_at_0: f64,
    pub bound_at_0: f64,
    pub error_at_pm1: f64,
    pub bound_at_pm1: f64,
    pub argmax_location: f64,
    pub profile: Vec<(f64, f64)>,
}

/// Points of the uniform grid of the pointwise profiles.
pub const PROFILE_POINTS: usize = 2001;

fn uniform(points: usize) -> Vec<f64> {
    (0..points).map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64).collect()
}

pub fn tightness_profile(u: &SingularFunction, degrees: &[usize]) -> Result<Vec<TightnessRow>> {
    if !matches!(u, SingularFunction::AbsX) {
        return Err(domain("the pointwise bounds are stated for |x| only"));
    }
    let top = degrees.iter().copied().max().ok_or_else(|| domain("no degrees given"))?;
    if degrees.iter().any(|&n| n <= 2) {
        return Err(domain("pointwise bounds for |x| need N > 2"));
    }
    let reference = reference_series(u, top)?;
    degrees
        .par_iter()
        .map(|&n| {
            let report = measure_errors_with(u, n, &reference, false)?;
            let s = reference.truncate(n);
            let err = |x: f64| -> Result<f64> { Ok((u.eval(x) - s.eval(x)?).abs()) };
            let (b0, b1) = absx_pointwise_bounds(n)?;
            let profile = uniform(PROFILE_POINTS).into_iter().map(|x| Ok((x, err(x)?))).collect::<Result<_>>()?;
            Ok(TightnessRow {
                n,
                error_at_0: err(0.0)?,
                bound_at_0: b0,
                error_at_pm1: err(1.0)?.max(err(-1.0)?),
                bound_at_pm1: b1,
                argmax_location: report.argmax_location,
                profile,
            })
        })
        .collect()
}

/// (x, P_n(x), (1-x²)^{1/4} P_n(x)) on a uniform grid of 2001 points.
pub fn figure1_data(n: usize) -> Result<Vec<(f64, f64, f64)>> {
    let w = WeightedNorm::default();
    uniform(PROFILE_POINTS)
        .into_iter()
        .map(|x| {
            let p = legendre_eval(n, x)?;
            Ok((x, p, w.weight(x) * p))
        })
        .collect()
}

fn fmt_order(o: Option<f64>) -> String {
    o.map_or_else(String::new, |v| format!("{v:.4}"))
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

/// Rows of one parameter value in a two-norm table.
pub struct TwoNormBlock<'a> {
    pub mu: f64,
    pub first: &'a ConvergenceTable,
    pub second: &'a ConvergenceTable,
}

fn write_two_norm<W: Write>(w: W, header: [&str; 6], blocks: &[TwoNormBlock<'_>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for b in blocks {
        for (r1, r2) in b.first.rows.iter().zip(&b.second.rows) {
            out.write_record([
                r1.n.to_string(),
                sci(r1.error),
                fmt_order(r1.order),
                sci(r2.error),
                fmt_order(r2.order),
                b.mu.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `N,linf,linf_order,wlinf,wlinf_order,mu`
pub fn write_table1<W: Write>(w: W, blocks: &[TwoNormBlock<'_>]) -> Result<()> {
    write_two_norm(w, ["N", "linf", "linf_order", "wlinf", "wlinf_order", "mu"], blocks)
}

/// `N,linf,linf_order,l2,l2_order,mu`
pub fn write_table3<W: Write>(w: W, blocks: &[TwoNormBlock<'_>]) -> Result<()> {
    write_two_norm(w, ["N", "linf", "linf_order", "l2", "l2_order", "mu"], blocks)
}

/// `n,coeff_abs,order,mu`
pub fn write_table2<W: Write>(w: W, blocks: &[(f64, &ConvergenceTable)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "coeff_abs", "order", "mu"])?;
    for (mu, t) in blocks {
        for r in &t.rows {
            out.write_record([r.n.to_string(), sci(r.error), fmt_order(r.order), mu.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `x,error`
pub fn write_profile<W: Write>(w: W, profile: &[(f64, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "error"])?;
    for (x, e) in profile {
        out.write_record([x.to_string(), sci(*e)])?;
    }
    out.flush()?;
    Ok(())
}

/// `N,error_at_0,bound_at_0,error_at_pm1,bound_at_pm1,argmax_location`
pub fn write_tightness<W: Write>(w: W, rows: &[TightnessRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["N", "error_at_0", "bound_at_0", "error_at_pm1", "bound_at_pm1", "argmax_location"])?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            sci(r.error_at_0),
            sci(r.bound_at_0),
            sci(r.error_at_pm1),
            sci(r.bound_at_pm1),
            r.argmax_location.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `x,Pn,weighted`
pub fn write_figure1<W: Write>(w: W, data: &[(f64, f64, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "Pn", "weighted"])?;
    for (x, p, q) in data {
        out.write_record([x.to_string(), sci(*p), sci(*q)])?;
    }
    out.flush()?;
    Ok(())
}

/// Creates `dir/name` and hands the writer to `f`.
pub fn write_file<F>(dir: &Path, name: &str, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut File) -> Result<()>,
{
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut file = File::create(&path)?;
    f(&mut file)?;
    Ok(path)
}
