//! Exact rational helpers shared by every module.
//!
//! All correctness-bearing comparisons go through integer arithmetic on
//! `BigInt`; floating point only appears in reported estimates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn half() -> Q {
    q(1, 2)
}

/// `2^e` for an integer exponent.
pub fn pow2(e: i64) -> Q {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Q::from_integer(p)
    } else {
        Q::new(BigInt::one(), p)
    }
}

/// `2^e` when `e` is an integer-valued rational.
pub fn pow2_q(e: &Q) -> Option<Q> {
    if !e.is_integer() {
        return None;
    }
    e.to_integer().to_i64().map(pow2)
}

/// Orders `lhs^e_lhs` against `rhs^e_rhs` for nonnegative rationals by
/// integer cross-multiplication.
pub fn cmp_power(lhs: &Q, e_lhs: u32, rhs: &Q, e_rhs: u32) -> Ordering {
    debug_assert!(!lhs.is_negative() && !rhs.is_negative());
    let left = lhs.numer().pow(e_lhs) * rhs.denom().pow(e_rhs);
    let right = rhs.numer().pow(e_rhs) * lhs.denom().pow(e_lhs);
    left.cmp(&right)
}

/// Orders `2^exp` against a positive rational.
pub fn cmp_pow2(exp: &Q, rhs: &Q) -> Ordering {
    debug_assert!(rhs.is_positive());
    let u = exp.numer();
    let v = exp.denom().to_u32().expect("exponent denominator fits u32");
    let shift = u.abs().to_u64().expect("exponent numerator fits u64");
    let p = BigInt::one() << shift;
    let c = rhs.numer().pow(v);
    let d = rhs.denom().pow(v);
    if u.is_negative() {
        // 2^{-|u|/v} vs c/d  <=>  d^v vs c^v 2^{|u|}
        d.cmp(&(c * p))
    } else {
        (p * d).cmp(&c)
    }
}

/// Least integer `Q` with `Q >= 2^exp`, for `exp >= 0`.
pub fn ceil_pow2(exp: &Q) -> BigInt {
    assert!(!exp.is_negative(), "ceil_pow2 needs a nonnegative exponent");
    let u = exp.numer().to_u64().expect("exponent numerator fits u64");
    let v = exp.denom().to_u32().expect("exponent denominator fits u32");
    let target = BigInt::one() << u;
    let mut root = target.nth_root(v);
    if root.pow(v) < target {
        root += 1;
    }
    root
}

/// Greatest integer `Q` with `Q <= 2^exp`, for `exp >= 0`.
pub fn floor_pow2(exp: &Q) -> BigInt {
    let c = ceil_pow2(exp);
    if exp.is_integer() {
        c
    } else {
        c - 1
    }
}

pub fn is_dyadic(x: &Q) -> bool {
    let d = x.denom();
    (d & (d - BigInt::one())).is_zero()
}

pub fn floor(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Q) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Nearest integer, ties rounded down.
pub fn nearest(x: &Q) -> BigInt {
    floor(&(x + half()))
        - if (x + half()).is_integer() {
            BigInt::one()
        } else {
            BigInt::zero()
        }
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// `log2` of a positive rational as a float, accurate for huge operands.
pub fn log2(x: &Q) -> f64 {
    assert!(x.is_positive(), "log2 of a nonpositive rational");
    log2_int(x.numer()) - log2_int(x.denom())
}

fn log2_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

pub fn to_f64(x: &Q) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    sign * log2(&x.abs()).exp2()
}

/// Formats as `numerator/denominator`, always with an explicit denominator.
pub fn format_rational(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = || Error::Parse {
        line: 0,
        message: format!("not a rational: {s:?}"),
    };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Parses a comma-separated list of rational strings.
pub fn parse_rational_list(s: &str) -> Result<Vec<Q>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_rational)
        .collect()
}

/// A point of ℝⁿ with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Q>);

impl RationalVector {
    pub fn new(entries: Vec<Q>) -> Self {
        assert!(
            !entries.is_empty(),
            "a rational vector has dimension at least 1"
        );
        RationalVector(entries)
    }

    pub fn from_ratios(entries: &[(i64, i64)]) -> Self {
        Self::new(entries.iter().map(|&(n, d)| q(n, d)).collect())
    }

    pub fn splat(value: Q, n: usize) -> Self {
        Self::new(vec![value; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &[Q]) -> Q {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn select(&self, coords: &[usize]) -> RationalVector {
        RationalVector(coords.iter().map(|&i| self.0[i].clone()).collect())
    }

    pub fn into_inner(self) -> Vec<Q> {
        self.0
    }
}

impl Deref for RationalVector {
    type Target = [Q];
    fn deref(&self) -> &[Q] {
        &self.0
    }
}

impl From<Vec<Q>> for RationalVector {
    fn from(v: Vec<Q>) -> Self {
        RationalVector::new(v)
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_q::vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_q::vec::deserialize(d)?;
        if v.is_empty() {
            return Err(serde::de::Error::custom("empty vector"));
        }
        Ok(RationalVector(v))
    }
}

/// Serde adapters writing rationals as `"n/d"` strings.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Q>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(
            x: &Option<Q>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_some(&format_rational(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Q>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cmp_power_examples() {
        assert_eq!(cmp_power(&qi(2), 1, &qi(4), 1), Ordering::Less);
        assert_eq!(cmp_power(&q(1, 2), 3, &q(1, 8), 1), Ordering::Equal);
        // 81/16 vs 5
        assert_eq!(cmp_power(&q(3, 2), 4, &qi(5), 1), Ordering::Greater);
        assert_eq!(cmp_power(&qi(0), 3, &qi(0), 5), Ordering::Equal);
    }

    #[test]
    fn pow2_comparisons() {
        assert_eq!(cmp_pow2(&qi(-3), &q(1, 8)), Ordering::Equal);
        assert_eq!(cmp_pow2(&q(1, 2), &q(141, 100)), Ordering::Greater);
        assert_eq!(cmp_pow2(&q(1, 2), &q(142, 100)), Ordering::Less);
        assert_eq!(cmp_pow2(&q(-4, 3), &q(2, 5)), Ordering::Less); // 0.3969 < 0.4
    }

    #[test]
    fn ceil_pow2_matches_integer_powers() {
        assert_eq!(ceil_pow2(&qi(0)), BigInt::from(1));
        assert_eq!(ceil_pow2(&qi(10)), BigInt::from(1024));
        assert_eq!(ceil_pow2(&q(1, 2)), BigInt::from(2));
        assert_eq!(ceil_pow2(&q(9, 2)), BigInt::from(23)); // 22.627
        assert_eq!(ceil_pow2(&q(15, 4)), BigInt::from(14)); // 13.45
    }

    #[test]
    fn rounding() {
        assert_eq!(floor(&q(-1, 3)), BigInt::from(-1));
        assert_eq!(ceil(&q(-1, 3)), BigInt::from(0));
        assert_eq!(nearest(&q(5, 2)), BigInt::from(2));
        assert_eq!(nearest(&q(7, 3)), BigInt::from(2));
        assert_eq!(nearest(&q(-7, 3)), BigInt::from(-2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational(" -6/4 ").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), qi(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&qi(3)), "3/1");
        assert_eq!(parse_rational_list("1/2, 1/3,1/6").unwrap().len(), 3);
    }

    #[test]
    fn dyadic_detection() {
        assert!(is_dyadic(&q(3, 2)));
        assert!(is_dyadic(&qi(2)));
        assert!(!is_dyadic(&q(1, 3)));
    }

    #[test]
    fn log2_of_large_values() {
        assert!((log2(&pow2(-300)) + 300.0).abs() < 1e-12);
        assert!((log2(&q(3, 1)) - 3f64.log2()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn cmp_power_agrees_with_cross_multiplication(
            an in 0i64..50, ad in 1i64..50, bn in 0i64..50, bd in 1i64..50,
            e in 1u32..=64, f in 1u32..=64,
        ) {
            let a = q(an, ad);
            let b = q(bn, bd);
            let lhs = num_traits::pow::pow(a.clone(), e as usize);
            let rhs = num_traits::pow::pow(b.clone(), f as usize);
            prop_assert_eq!(cmp_power(&a, e, &b, f), lhs.cmp(&rhs));
        }

        #[test]
        fn rational_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let x = q(n, d);
            prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }
}
