//! Exact rational scalars.
//!
//! Every demand, capacity, flow value and coefficient is a [`Rational`]:
//! an arbitrary precision fraction kept in lowest terms.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Rational = BigRational;

/// `n/d` as a rational. Panics on a zero denominator.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `[z]⁺`
pub fn positive_part(z: &Rational) -> Rational {
    if z.is_positive() {
        z.clone()
    } else {
        Rational::zero()
    }
}

/// Second largest entry, counting ties: the second-to-last element of the sorted list.
pub fn second_max(values: &[Rational]) -> Result<Rational> {
    if values.len() < 2 {
        return Err(Error::Argument(format!(
            "second_max needs at least two values, got {}",
            values.len()
        )));
    }
    let mut v = values.to_vec();
    v.sort();
    Ok(v[v.len() - 2].clone())
}

pub fn min2(a: &Rational, b: &Rational) -> Rational {
    if a <= b { a.clone() } else { b.clone() }
}

pub fn max2(a: &Rational, b: &Rational) -> Rational {
    if a >= b { a.clone() } else { b.clone() }
}

pub fn in_unit_interval(z: &Rational) -> bool {
    !z.is_negative() && *z <= Rational::one()
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((w, f)) = t.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = w.starts_with('-');
        let whole: BigInt = if w.is_empty() || w == "-" { BigInt::zero() } else { w.parse().map_err(|_| bad())? };
        let frac: BigInt = f.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), f.len());
        let mag = Rational::new(whole.abs() * &scale + frac, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// `r · scale` as an integer. Errors if the product is not integral.
pub fn scaled(r: &Rational, scale: &BigInt) -> Result<BigInt> {
    let p = r * Rational::from_integer(scale.clone());
    if !p.is_integer() {
        return Err(Error::Internal(format!("{} is not a multiple of 1/{}", fmt_rational(r), scale)));
    }
    Ok(p.to_integer())
}

pub fn unscaled(n: &BigInt, scale: &BigInt) -> Rational {
    Rational::new(n.clone(), scale.clone())
}
