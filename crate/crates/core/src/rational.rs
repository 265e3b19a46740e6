//! Exact rationals and their `p/q` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i64>;

/// Lowest-terms `p/q`; integers print without a denominator.
pub fn format(q: &Rational) -> String {
    q.to_string()
}

pub fn parse(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad rational {text:?}"));
    match t.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn from_big(q: &BigRational) -> Result<Rational> {
    let conv = |x: &BigInt| {
        x.to_i64()
            .ok_or_else(|| Error::Domain(format!("rational {q} does not fit in 64 bits")))
    };
    Ok(Rational::new(conv(q.numer())?, conv(q.denom())?))
}

pub fn to_big(q: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}
