use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_4e-6,
];

// (-1)^k zeta(k) / k for k = 2..=30: Taylor coefficients of ln Gamma(1 + e) + gamma*e.
const LN_GAMMA_1P: [f64; 29] = [
    0.822_467_033_424_113_2,
    -0.400_685_634_386_531_4,
    0.270_580_808_427_784_55,
    -0.207_385_551_028_673_98,
    0.169_557_176_997_408_2,
    -0.144_049_896_768_846_12,
    0.125_509_669_524_743_04,
    -0.111_334_265_869_564_69,
    0.100_099_457_512_781_81,
    -0.090_954_017_145_829_04,
    0.083_353_840_546_109,
    -0.076_932_516_411_352_19,
    0.071_432_946_295_361_34,
    -0.066_668_705_882_420_47,
    0.062_500_955_141_213_04,
    -0.058_823_978_658_684_58,
    0.055_555_767_627_403_61,
    -0.052_631_679_379_616_66,
    0.050_000_047_698_101_69,
    -0.047_619_070_330_142_23,
    0.045_454_556_293_204_67,
    -0.043_478_266_053_040_26,
    0.041_666_669_150_341_21,
    -0.040_000_001_192_140_14,
    0.038_461_539_034_675_19,
    -0.037_037_037_312_989_33,
    0.035_714_285_847_333_36,
    -0.034_482_758_684_919_3,
    0.033_333_333_364_377_58,
];

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn lanczos_sum(z: f64) -> f64 {
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + i as f64);
    }
    s
}

/// ln Gamma(1 + e) for |e| <= 0.2.
fn ln_gamma_1p_series(e: f64) -> f64 {
    let mut acc = 0.0;
    for c in LN_GAMMA_1P.iter().rev() {
        acc = acc * e + c;
    }
    e * (-EULER_GAMMA + e * acc)
}

/// Unchecked ln Gamma for x > 0; NaN otherwise.
pub(crate) fn lgamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if (x - 1.0).abs() <= 0.2 {
        return ln_gamma_1p_series(x - 1.0);
    }
    if (x - 2.0).abs() <= 0.2 {
        let e = x - 2.0;
        return e.ln_1p() + ln_gamma_1p_series(e);
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum away from its poles
        return (PI / sin_pi(x)).ln() - lgamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Natural logarithm of Gamma(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(lgamma(x))
}

/// Gamma(x) for real x away from the poles 0, -1, -2, ...
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("gamma of NaN"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(domain(format!("gamma has a pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 23.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    if x < 20.0 {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        return (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z);
    }
    lgamma(x).exp()
}

/// Rising factorial (c)_m = c (c+1) ... (c+m-1).
pub fn pochhammer(c: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |p, i| p * (c + i as f64))
}

/// ln Gamma(x) - ln Gamma(y) for x, y > 0, exact Pochhammer product for small integer gaps.
pub fn ln_gamma_ratio(x: f64, y: f64) -> f64 {
    ln_gamma_ratio_gap(x, y, x - y)
}

/// As [`ln_gamma_ratio`] with the gap d = x - y supplied by the caller, who may
/// know it more accurately than the rounded difference.
fn ln_gamma_ratio_gap(x: f64, y: f64, d: f64) -> f64 {
    if d == d.round() && d.abs() <= 64.0 {
        let m = d.abs() as u32;
        let lp = if d >= 0.0 { pochhammer(y, m) } else { pochhammer(x, m) };
        return if d >= 0.0 { lp.ln() } else { -lp.ln() };
    }
    if x.min(y) >= STIRLING_DIFF_MIN {
        // Stirling with the large (z-1/2) ln z terms cancelled analytically
        return d * x.ln() + (y - 0.5) * (d / y).ln_1p() - d + stirling_tail(x) - stirling_tail(y);
    }
    lgamma(x) - lgamma(y)
}

const STIRLING_DIFF_MIN: f64 = 15.0;

/// ln Gamma(z) - (z-1/2) ln z + z - ln(2π)/2 through the z^{-9} term.
fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / z;
    let r2 = r * r;
    r * (1.0 / 12.0 + r2 * (-1.0 / 360.0 + r2 * (1.0 / 1260.0 + r2 * (-1.0 / 1680.0 + r2 / 1188.0))))
}

/// Query for the ratio Gamma(z+a)/Gamma(z+b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRatioQuery {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

/// Gamma(z+a)/Gamma(z+b) for positive arguments.
pub fn gamma_ratio(q: GammaRatioQuery) -> Result<f64> {
    let (x, y) = (q.z + q.a, q.z + q.b);
    if !(x > 0.0 && y > 0.0) {
        return Err(domain(format!("gamma_ratio needs z+a > 0 and z+b > 0, got {x} and {y}")));
    }
    let d = q.a - q.b;
    if d == d.round() && d.abs() <= 64.0 {
        let m = d.abs() as u32;
        return Ok(if d >= 0.0 { pochhammer(y, m) } else { 1.0 / pochhammer(x, m) });
    }
    Ok(ln_gamma_ratio_gap(x, y, d).exp())
}

/// Lower and upper envelopes for Gamma(z+a)/Gamma(z+b) when b - a lies strictly
/// between two consecutive nonnegative integers.
pub fn kershaw_envelope(a: f64, b: f64, z: f64) -> Result<(f64, f64)> {
    let gap = b - a;
    if !(gap > 0.0) {
        return Err(domain(format!("kershaw_envelope needs b > a, got a={a}, b={b}")));
    }
    if gap == gap.floor() {
        return Err(Error::IntegerGap(gap));
    }
    if !(z + a > 0.0 && z + b > 1.0) {
        return Err(domain(format!("kershaw_envelope needs z+a > 0 and z+b > 1, got {} and {}", z + a, z + b)));
    }
    let m = gap.floor();
    let mu = gap - m;
    let poch = pochhammer(z + a, m as u32);
    let lower = (z + b - 1.5 + (1.25 - mu).sqrt()).powf(-mu) / poch;
    let upper = (z + b - 0.5 * (mu + 1.0)).powf(-mu) / poch;
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_gamma_known_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.5 * PI.ln(), max_relative = 1e-14);
        // 3.5 * 2.5 * 1.5 * 0.5 * sqrt(pi)
        let g45 = 3.5 * 2.5 * 1.5 * 0.5 * PI.sqrt();
        assert_relative_eq!(log_gamma(4.5).unwrap(), g45.ln(), max_relative = 1e-14);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn log_gamma_against_frozen_high_precision() {
        // mpmath.loggamma at 40 digits, evaluated at the exact f64 inputs
        let cases = [
            (1e-3, 6.907_178_885_383_853_7),
            (0.1, 2.252_712_651_734_206),
            (1.05, -0.026_853_072_502_260_19),
            (1.46, -0.121_485_001_004_007_43),
            (1.9, -0.038_984_275_923_083_36),
            (2.000_001, 4.227_846_576_245_292e-7),
            (3.7, 1.428_072_326_665_388_1),
            (150.5, 602.513_954_870_585_4),
            (1e6, 12_815_504.569_147_612),
        ];
        for (x, v) in cases {
            let got = log_gamma(x).unwrap();
            assert!(((got - v) / v).abs() < 1e-13, "x={x}: got {got}, want {v}");
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert!(gamma(-2.0).is_err());
    }

    #[test]
    fn sin_pi_exact_at_integers() {
        for k in -6..=6 {
            assert_eq!(sin_pi(k as f64), 0.0);
        }
        assert_relative_eq!(sin_pi(0.5), 1.0);
        assert_relative_eq!(sin_pi(2.3), (0.3 * PI).sin(), max_relative = 1e-14);
        assert_relative_eq!(sin_pi(-1.7), (0.3 * PI).sin(), max_relative = 1e-14);
    }

    #[test]
    fn gamma_ratio_examples() {
        let r = |a, b, z| gamma_ratio(GammaRatioQuery { a, b, z }).unwrap();
        assert_eq!(r(0.7, 0.7, 3.0), 1.0);
        assert_relative_eq!(r(1.0, 0.0, 2.5), 2.5, max_relative = 1e-15);
        assert_relative_eq!(r(0.0, 0.5, 1.0), 2.0 / PI.sqrt(), max_relative = 1e-14);
        assert!(gamma_ratio(GammaRatioQuery { a: -3.0, b: 0.0, z: 1.0 }).is_err());
    }

    #[test]
    fn ln_gamma_ratio_at_large_arguments() {
        // mpmath loggamma differences at 40 digits
        let cases = [
            (100_000.75, 100_000.0, 8.634_693_161_228_452_568),
            (100_000.5, 100_000.0, 5.756_461_482_485_114_215),
            (20.3, 17.9, 7.014_210_889_113_339_988),
            (15.0, 16.5, -4.086_533_332_302_133_060),
            (300.25, 1000.5, -4_498.046_475_346_298_549),
        ];
        for (x, y, v) in cases {
            let got = ln_gamma_ratio(x, y);
            assert!(((got - v) / v).abs() < 4e-15, "{x}/{y}: {got} vs {v}");
        }
    }

    #[test]
    fn gamma_ratio_keeps_the_exact_gap() {
        // z + b is not representable; mpmath at the exact f64 inputs
        let r = gamma_ratio(GammaRatioQuery { a: 0.0, b: 0.9, z: 1e5 }).unwrap();
        assert_relative_eq!(r, 3.162_279_083_191_748_4e-5, max_relative = 1e-14);
    }

    #[test]
    fn kershaw_examples() {
        let (lo, hi) = kershaw_envelope(0.0, 0.5, 4.0).unwrap();
        let r = gamma_ratio(GammaRatioQuery { a: 0.0, b: 0.5, z: 4.0 }).unwrap();
        assert_relative_eq!(r, 0.515_830_476_386_52, max_relative = 1e-13);
        assert!(lo < r && r < hi);
        let (lo, hi) = kershaw_envelope(0.0, 1.5, 4.0).unwrap();
        let r = gamma_ratio(GammaRatioQuery { a: 0.0, b: 1.5, z: 4.0 }).unwrap();
        assert_relative_eq!(r, 0.114_628_994_752_56, max_relative = 1e-13);
        assert!(lo < r && r < hi);
        assert!(matches!(kershaw_envelope(0.0, 2.0, 4.0), Err(Error::IntegerGap(_))));
    }
}
