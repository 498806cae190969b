use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::hyper::{big, hyp2f1_big, to_f64, Big};
use crate::error::{domain, Error, Result};

fn check_abscissa(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 {
        return Err(domain(format!("abscissa {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Legendre polynomial P_n(x) by the three-term recurrence.
pub fn legendre_eval(n: usize, x: f64) -> Result<f64> {
    check_abscissa(x)?;
    Ok(legendre_unchecked(n, x))
}

pub(crate) fn legendre_unchecked(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// P_0(x), ..., P_n(x).
pub fn legendre_upto(n: usize, x: f64) -> Result<Vec<f64>> {
    check_abscissa(x)?;
    let mut out = Vec::with_capacity(n + 1);
    legendre_fill(n, x, &mut out);
    Ok(out)
}

pub(crate) fn legendre_fill(n: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push(x);
    for k in 1..n {
        let kf = k as f64;
        let p = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(p);
    }
}

/// Degree, real parameters and abscissa of a generalized Jacobi polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
}

/// P_n^{(alpha, beta)}(x) for real parameters.
///
/// Degrees 0 and 1 come from the hypergeometric definition; higher degrees use
/// the three-term recurrence, falling back to the extended-precision sum when a
/// recurrence denominator vanishes.
pub fn jacobi_general_eval(p: JacobiParams) -> Result<f64> {
    check_abscissa(p.x)?;
    if !(p.alpha.is_finite() && p.beta.is_finite()) {
        return Err(domain("jacobi parameters must be finite"));
    }
    match jacobi_recurrence(p) {
        Some(v) => Ok(v),
        None => jacobi_via_hypergeometric(p, super::DEFAULT_PRECISION_BITS),
    }
}

fn jacobi_recurrence(p: JacobiParams) -> Option<f64> {
    let JacobiParams { n, alpha: a, beta: b, x } = p;
    if n == 0 {
        return Some(1.0);
    }
    let ab = a + b;
    let (mut p0, mut p1) = (1.0, (a + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0));
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let den = 2.0 * kf * (kf + ab) * (s - 2.0);
        if den == 0.0 {
            return None;
        }
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let p2 = (c1 * p1 - c2 * p0) / den;
        p0 = p1;
        p1 = p2;
    }
    Some(p1)
}

/// The three-term recurrence carried out in `bits` of working precision, for
/// abscissas where the f64 recurrence cancels badly.
pub(crate) fn jacobi_recurrence_big(p: JacobiParams, bits: usize) -> Option<f64> {
    let JacobiParams { n, alpha, beta, x } = p;
    if n == 0 {
        return Some(1.0);
    }
    let (a, b, xb) = (big(alpha, bits), big(beta, bits), big(x, bits));
    let one = big(1.0, bits);
    let two = big(2.0, bits);
    let ab = &a + &b;
    let a2b2 = &a * &a - &b * &b;
    let mut p0 = one.clone();
    let mut p1 = (&a + &one) + (&ab + &two) * (&xb - &one) / &two;
    for k in 2..=n {
        let kb = big(k as f64, bits);
        let s = &two * &kb + &ab;
        let den = &two * &kb * (&kb + &ab) * (&s - &two);
        if den == big(0.0, bits) {
            return None;
        }
        let c1 = (&s - &one) * (&s * (&s - &two) * &xb + &a2b2);
        let c2 = &two * (&kb + &a - &one) * (&kb + &b - &one) * &s;
        let p2 = (c1 * &p1 - c2 * &p0) / den;
        p0 = p1;
        p1 = p2;
    }
    Some(to_f64(&p1))
}

/// Quotient with one correction step; the crate's own TwoFloat division keeps
/// only double precision.
fn dd_div(num: TwoFloat, den: TwoFloat) -> TwoFloat {
    let q0 = num.hi() / den.hi();
    let r = num - den * q0;
    TwoFloat::from(q0) + (r.hi() + r.lo()) / den.hi()
}

/// The three-term recurrence in double-double arithmetic (about 106 bits).
pub(crate) fn jacobi_recurrence_dd(p: JacobiParams) -> Option<f64> {
    let JacobiParams { n, alpha: a, beta: b, x } = p;
    if n == 0 {
        return Some(1.0);
    }
    let (a, b, x) = (TwoFloat::from(a), TwoFloat::from(b), TwoFloat::from(x));
    let ab = a + b;
    let a2b2 = a * a - b * b;
    let mut p0 = TwoFloat::from(1.0);
    let mut p1 = (a + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let s = ab + 2.0 * kf;
        let den = (ab + kf) * (s - 2.0) * (2.0 * kf);
        if den.hi() == 0.0 {
            return None;
        }
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a2b2);
        let c2 = (a + (kf - 1.0)) * (b + (kf - 1.0)) * s * 2.0;
        let p2 = dd_div(c1 * p1 - c2 * p0, den);
        p0 = p1;
        p1 = p2;
    }
    Some(p1.hi() + p1.lo())
}

fn scaled_pochhammer(c: f64, n: usize, bits: usize) -> Big {
    // (c)_n / n!
    let mut acc = big(1.0, bits);
    for i in 0..n {
        acc = acc * big(c + i as f64, bits) / big(i as f64 + 1.0, bits);
    }
    acc
}

/// Reference evaluation of P_n^{(alpha, beta)}(x) from the terminating
/// hypergeometric sum in `bits` of working precision.
pub fn jacobi_via_hypergeometric(p: JacobiParams, bits: usize) -> Result<f64> {
    check_abscissa(p.x)?;
    let JacobiParams { n, alpha: a, beta: b, x } = p;
    let nn = u32::try_from(n).map_err(|_| domain("degree too large"))?;
    let second = n as f64 + a + b + 1.0;
    match hyp2f1_big(nn, second, a + 1.0, 0.5 * (1.0 - x), bits) {
        Ok(s) => Ok(to_f64(&(scaled_pochhammer(a + 1.0, n, bits) * s))),
        Err(Error::ParameterPole { .. }) => {
            // mirror form P_n^{(a,b)}(x) = (-1)^n P_n^{(b,a)}(-x)
            let s = hyp2f1_big(nn, second, b + 1.0, 0.5 * (1.0 + x), bits)?;
            let v = to_f64(&(scaled_pochhammer(b + 1.0, n, bits) * s));
            Ok(if n % 2 == 1 { -v } else { v })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hyp2f1_terminating;

    #[test]
    fn legendre_endpoints_and_centre() {
        for n in 0..50 {
            assert_eq!(legendre_eval(n, 1.0).unwrap(), 1.0);
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(legendre_eval(n, -1.0).unwrap(), s);
        }
        assert_eq!(legendre_eval(2, 0.0).unwrap(), -0.5);
        assert!(legendre_eval(3, 1.01).is_err());
    }

    #[test]
    fn legendre_matches_exact_polynomial() {
        // P_5(x) = (63x^5 - 70x^3 + 15x)/8; at 0.3 the exact value is 0.34538625
        let v = legendre_eval(5, 0.3).unwrap();
        assert!((v - 0.345_386_25).abs() < 1e-15);
    }

    #[test]
    fn legendre_upto_matches_single() {
        let all = legendre_upto(30, -0.37).unwrap();
        for (n, v) in all.iter().enumerate() {
            assert_eq!(*v, legendre_eval(n, -0.37).unwrap());
        }
    }

    #[test]
    fn jacobi_low_degrees() {
        let p = |n, alpha, beta, x| jacobi_general_eval(JacobiParams { n, alpha, beta, x }).unwrap();
        assert_eq!(p(0, 0.3, -7.1, 0.2), 1.0);
        // P_1 = (alpha+1) + (alpha+beta+2)(x-1)/2
        assert!((p(1, 1.5, -1.5, 0.2) - (2.5 - 0.8)).abs() < 1e-15);
        // Gamma(4.5)/(2! Gamma(2.5))
        assert!((p(2, 1.5, -1.5, 1.0) - 4.375).abs() < 1e-14);
    }

    #[test]
    fn jacobi_matches_hypergeometric() {
        let p = JacobiParams { n: 3, alpha: 2.0, beta: -2.0, x: 0.4 };
        let rec = jacobi_general_eval(p).unwrap();
        // (alpha+1)_3/3! * 2F1(-3, 4; 3; 0.3)
        let reference = 10.0 * hyp2f1_terminating(3, 4.0, 3.0, 0.3).unwrap();
        assert!(((rec - reference) / reference).abs() < 1e-12);
        assert!((rec - 1.96).abs() < 1e-13);
    }

    #[test]
    fn hypergeometric_mirror_form() {
        // alpha + 1 = -1 is a pole of the direct sum; the mirror form still works
        let p = JacobiParams { n: 4, alpha: -2.0, beta: 2.0, x: 0.1 };
        let a = jacobi_via_hypergeometric(p, 200).unwrap();
        let b = jacobi_general_eval(p).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn double_double_agrees_with_big_recurrence() {
        // values near -1 with alpha = mu+1, beta = -mu-1 lose most f64 bits
        for &(n, mu, x) in &[(33usize, 2.6, -0.99), (64, 1.2, -0.9995), (128, 0.3, -0.999)] {
            let p = JacobiParams { n, alpha: mu + 1.0, beta: -mu - 1.0, x };
            let dd = jacobi_recurrence_dd(p).unwrap();
            let big = jacobi_recurrence_big(p, 256).unwrap();
            assert!((dd - big).abs() <= 1e-12 * big.abs(), "n={n}: {dd} vs {big}");
        }
    }
}
