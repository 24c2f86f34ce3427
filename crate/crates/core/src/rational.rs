//! Exact rational helpers shared by the LP, family and CLI layers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn pow2(k: u32) -> Q {
    Q::from_integer(BigInt::one() << k as usize)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn nearest_rational(x: f64, max_den: u64) -> Result<Q> {
    if !x.is_finite() {
        return Err(Error::Parameter(format!("non-finite value {x}")));
    }
    let exact = Q::from_float(x).ok_or_else(|| Error::Parameter(format!("bad float {x}")))?;
    let max_den = BigInt::from(max_den);
    let neg = exact.is_negative();
    let target = exact.abs();
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rem = target.clone();
    loop {
        let a = rem.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > max_den {
            let k = (&max_den - &q0) / &q1;
            let ps = &k * &p1 + &p0;
            let qs = &k * &q1 + &q0;
            let cand_a = Q::new(p1.clone(), q1.clone());
            let best = if qs.is_zero() {
                cand_a
            } else {
                let cand_b = Q::new(ps, qs);
                if (&cand_b - &target).abs() < (&cand_a - &target).abs() {
                    cand_b
                } else {
                    cand_a
                }
            };
            return Ok(if neg { -best } else { best });
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rem - Q::from_integer(a);
        if frac.is_zero() {
            let r = Q::new(p1, q1);
            return Ok(if neg { -r } else { r });
        }
        rem = frac.recip();
    }
}

/// Parsed user value: exact when given as "p/q" or an integer, approximated
/// otherwise (the flag reports whether approximation happened).
pub fn parse_rational(s: &str) -> Result<(Q, bool)> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        let d: BigInt = b.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok((Q::new(n, d), false));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok((Q::from_integer(n), false));
    }
    let x: f64 = s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))?;
    let r = nearest_rational(x, 1_000_000)?;
    Ok((r, true))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rational_recovers_small_fractions() {
        assert_eq!(nearest_rational(67.0 / 756.0, 1_000_000).unwrap(), q(67, 756));
        assert_eq!(nearest_rational(-2.0 / 61.0, 1000).unwrap(), q(-2, 61));
        assert_eq!(nearest_rational(0.5, 10).unwrap(), q(1, 2));
        assert_eq!(nearest_rational(3.0, 10).unwrap(), qi(3));
    }

    #[test]
    fn nearest_rational_respects_bound() {
        let r = nearest_rational(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(r, q(355, 113));
        let r = nearest_rational(std::f64::consts::PI, 100).unwrap();
        assert!(r.denom() <= &BigInt::from(100));
        assert_eq!(r, q(311, 99));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("67/756").unwrap(), (q(67, 756), false));
        assert_eq!(parse_rational("-3").unwrap(), (qi(-3), false));
        let (r, approx) = parse_rational("0.125").unwrap();
        assert_eq!(r, q(1, 8));
        assert!(approx);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
