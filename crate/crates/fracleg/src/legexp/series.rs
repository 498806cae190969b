use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// How a coefficient was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Closed,
    Quadrature,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Closed => "closed",
            Self::Quadrature => "quadrature",
        }
    }
}

/// Coefficients û_0..û_N of a truncated Legendre series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreSeries {
    coefficients: Vec<f64>,
    provenance: Vec<Provenance>,
}

impl LegendreSeries {
    pub fn new(coefficients: Vec<f64>, provenance: Vec<Provenance>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(domain("a series needs at least one coefficient"));
        }
        if coefficients.len() != provenance.len() {
            return Err(domain("one provenance tag per coefficient"));
        }
        if let Some(i) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient {i} is {}", coefficients[i])));
        }
        Ok(Self { coefficients, provenance })
    }

    /// A series whose coefficients are all tagged as closed form.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        let p = vec![Provenance::Closed; coefficients.len()];
        Self::new(coefficients, p)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// The series cut to degree `n` (or unchanged if already shorter).
    pub fn truncate(&self, n: usize) -> Self {
        let m = (n + 1).min(self.coefficients.len());
        Self { coefficients: self.coefficients[..m].to_vec(), provenance: self.provenance[..m].to_vec() }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        partial_sum_eval(self, x)
    }

    /// Coefficients of the derivative, from P_j' = Σ_{i<j, j-i odd} (2i+1) P_i.
    pub fn derivative(&self) -> Self {
        let c = &self.coefficients;
        let n = c.len();
        if n == 1 {
            return Self { coefficients: vec![0.0], provenance: vec![Provenance::Closed] };
        }
        let mut d = vec![0.0; n - 1];
        // running sums over j = i+1, i+3, ... taken from the top down
        let mut odd = 0.0;
        let mut even = 0.0;
        for i in (0..n - 1).rev() {
            let j = i + 1;
            if j % 2 == 1 {
                odd += c[j];
            } else {
                even += c[j];
            }
            let s = if i % 2 == 0 { odd } else { even };
            d[i] = (2 * i + 1) as f64 * s;
        }
        let provenance = self.provenance[1..].to_vec();
        Self { coefficients: d, provenance }
    }

    /// Σ 2/(2n+1) û_n², the squared L² norm of the series.
    pub fn norm_sq(&self) -> f64 {
        self.coefficients.iter().enumerate().map(|(n, c)| 2.0 * c * c / (2 * n + 1) as f64).sum()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "coefficient", "provenance"])?;
        for (n, (c, p)) in self.coefficients.iter().zip(&self.provenance).enumerate() {
            out.write_record([n.to_string(), format!("{c:e}"), p.as_str().to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Σ û_n P_n(x) by Clenshaw's backward recurrence.
pub fn partial_sum_eval(s: &LegendreSeries, x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() > 1.0 {
        return Err(domain(format!("abscissa {x} outside [-1, 1]")));
    }
    Ok(clenshaw(&s.coefficients, x))
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    // P_{k+1} = (2k+1)/(k+1) x P_k - k/(k+1) P_{k-1}
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (0..c.len()).rev() {
        let kf = k as f64;
        let alpha = (2.0 * kf + 1.0) / (kf + 1.0) * x;
        let beta = -(kf + 1.0) / (kf + 2.0);
        let b0 = c[k] + alpha * b1 + beta * b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}

/// Coefficients of π_N^1 u = u(-1) + ∫_{-1}^x π_{N-1}u', given the Legendre
/// series of u' truncated at N-1.
pub fn h1_projection_coeffs(u_prime_series: &LegendreSeries, u_at_minus1: f64) -> Result<LegendreSeries> {
    let a = u_prime_series.coefficients();
    let big_n = a.len();
    if big_n < 2 {
        return Err(domain(format!("H1 projection needs N >= 2, got N = {big_n}")));
    }
    let get = |i: usize| a.get(i).copied().unwrap_or(0.0);
    let mut c = vec![0.0; big_n + 1];
    // ∫_{-1}^x P_0 = P_0 + P_1 and ∫_{-1}^x P_n = (P_{n+1} - P_{n-1})/(2n+1)
    c[0] = u_at_minus1 + get(0) - get(1) / 3.0;
    for (j, cj) in c.iter_mut().enumerate().skip(1) {
        *cj = get(j - 1) / (2 * j - 1) as f64 - get(j + 1) / (2 * j + 3) as f64;
    }
    LegendreSeries::new(c, vec![Provenance::Closed; big_n + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::legendre_eval;

    fn series(c: &[f64]) -> LegendreSeries {
        LegendreSeries::from_coefficients(c.to_vec()).unwrap()
    }

    #[test]
    fn constant_series() {
        assert_eq!(partial_sum_eval(&series(&[2.5]), 0.3).unwrap(), 2.5);
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let c = [0.3, -1.2, 0.5, 2.0, -0.7, 0.01];
        for &x in &[-1.0, -0.61, 0.0, 0.42, 1.0] {
            let direct: f64 = c.iter().enumerate().map(|(n, c)| c * legendre_eval(n, x).unwrap()).sum();
            assert!((partial_sum_eval(&series(&c), x).unwrap() - direct).abs() < 1e-14);
        }
        assert!(partial_sum_eval(&series(&c), 1.01).is_err());
    }

    #[test]
    fn derivative_coefficients() {
        // P_3' = 5 P_2 + P_0, P_2' = 3 P_1
        let d = series(&[0.0, 0.0, 1.0, 1.0]).derivative();
        assert_eq!(d.coefficients(), &[1.0, 3.0, 5.0]);
    }

    #[test]
    fn h1_of_linear_is_exact() {
        // u = 2x + 1: u' = 2, u(-1) = -1
        let p = h1_projection_coeffs(&series(&[2.0, 0.0]), -1.0).unwrap();
        assert!((p.coefficients()[0] - 1.0).abs() < 1e-15);
        assert!((p.coefficients()[1] - 2.0).abs() < 1e-15);
        assert!(p.coefficients()[2].abs() < 1e-15);
        assert!(h1_projection_coeffs(&series(&[2.0]), -1.0).is_err());
    }

    #[test]
    fn h1_interpolates_square_at_endpoints() {
        // u = x²: u' = 2 P_1
        let p = h1_projection_coeffs(&series(&[0.0, 2.0, 0.0]), 1.0).unwrap();
        assert!((p.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.eval(-1.0).unwrap() - 1.0).abs() < 1e-15);
        let d = p.derivative();
        assert!((d.coefficients()[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let s = LegendreSeries::new(vec![0.5, 0.0], vec![Provenance::Quadrature, Provenance::Closed]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,coefficient,provenance\n0,5e-1,quadrature\n1,0e0,closed\n");
    }

    #[test]
    fn rejects_non_finite() {
        assert!(LegendreSeries::from_coefficients(vec![f64::NAN]).is_err());
        assert!(LegendreSeries::from_coefficients(vec![]).is_err());
    }
}
