//! Exact rational weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn half() -> Q {
    q(1, 2)
}

/// `1 - 2^-k`.
pub fn one_minus_pow2(k: u32) -> Q {
    one() - Q::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Canonical `p/q` rendering; integers are written with denominator 1.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, `p`, or a finite decimal such as `0.25`.
pub fn parse_q(text: &str) -> Option<Q> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int}{frac}").parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Q::new(digits, scale));
    }
    let n: BigInt = text.parse().ok()?;
    Some(Q::from_integer(n))
}

pub fn sum<'a>(items: impl IntoIterator<Item = &'a Q>) -> Q {
    items.into_iter().fold(zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse_round_trip() {
        for x in [q(1, 2), q(0, 1), q(3, 1), q(-2, 6), q(7, 8)] {
            assert_eq!(parse_q(&format_q(&x)), Some(x));
        }
        assert_eq!(format_q(&q(2, 4)), "1/2");
        assert_eq!(format_q(&one()), "1/1");
        assert_eq!(parse_q("0.25"), Some(q(1, 4)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn one_minus_powers() {
        assert_eq!(one_minus_pow2(0), zero());
        assert_eq!(one_minus_pow2(3), q(7, 8));
    }
}
