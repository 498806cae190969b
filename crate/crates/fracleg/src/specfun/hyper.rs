use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use crate::error::{domain, Error, Result};

pub(crate) type Big = FBig<HalfEven, 2>;

/// Working precision of the extended-precision paths, in bits.
pub const DEFAULT_PRECISION_BITS: usize = 200;

pub(crate) fn big(x: f64, bits: usize) -> Big {
    // every finite f64 is exactly representable
    Big::try_from(x).expect("finite input").with_precision(bits).value()
}

pub(crate) fn to_f64(x: &Big) -> f64 {
    x.to_f64().value()
}

/// Terms of 2F1(-n, b; c; z) summed in `bits` of binary precision.
pub(crate) fn hyp2f1_big(n: u32, b: f64, c: f64, z: f64, bits: usize) -> Result<Big> {
    if !(b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(domain("hyp2f1_terminating needs finite b, c, z"));
    }
    if c <= 0.0 && c == c.floor() && -c < n as f64 {
        return Err(Error::ParameterPole { c, terms: n });
    }
    let bb = big(b, bits);
    let cb = big(c, bits);
    let zb = big(z, bits);
    let mut term = big(1.0, bits);
    let mut sum = term.clone();
    for k in 0..n {
        let kb = big(k as f64, bits);
        let num = (big(k as f64, bits) - big(n as f64, bits)) * (&bb + &kb);
        let den = (&cb + &kb) * big(k as f64 + 1.0, bits);
        term = term * num / den * &zb;
        sum += &term;
    }
    Ok(sum)
}

/// 2F1(-n, b; c; z), a polynomial of degree n in z, summed in extended precision.
pub fn hyp2f1_terminating(n: u32, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_terminating_with(n, b, c, z, DEFAULT_PRECISION_BITS)
}

/// As [`hyp2f1_terminating`] with an explicit working precision in bits.
pub fn hyp2f1_terminating_with(n: u32, b: f64, c: f64, z: f64, bits: usize) -> Result<f64> {
    if bits < 53 {
        return Err(domain(format!("working precision {bits} is below double precision")));
    }
    Ok(to_f64(&hyp2f1_big(n, b, c, z, bits)?))
}
