//! Exact complex-rational scalars and their conversions.

use num_bigint::{BigInt, BigUint};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Complex number with arbitrary-precision rational parts.
pub type CRational = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn real(r: BigRational) -> CRational {
    Complex::new(r, BigRational::zero())
}

pub fn from_biguint(u: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(u.clone()))
}

/// `1 / u` as an exact rational.
pub fn recip_biguint(u: &BigUint) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(u.clone()))
}

/// `|c|^2` computed exactly.
pub fn norm_sqr(c: &CRational) -> BigRational {
    &c.re * &c.re + &c.im * &c.im
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

pub fn to_c64(c: &CRational) -> Complex64 {
    Complex64::new(to_f64(&c.re), to_f64(&c.im))
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Parses `"p/q"`, an integer, or a decimal such as `-1.25e-3`, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = |why: &str| Error::Parse(format!("invalid rational {s:?}: {why}"));
    if s.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad("numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad("denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad("exponent"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("unexpected character"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().unwrap_or_default());
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Canonical `"p/q"` rendering (`"p"` for integers).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
