//! Exact scalar types.
//!
//! Everything that touches ground-set elements, areas or plane coefficients is
//! generic over [`Exact`]: an ordered, hashable, exactly-computing number type.
//! Implementations are provided for machine integers (`i64`, `i128`),
//! [`BigInt`], and rationals over each of them. Floating point types are
//! deliberately excluded: a unit-area test is an equality of polynomials in
//! the coordinates, and rounding would silently corrupt counts.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact, totally ordered scalar.
pub trait Exact:
    Clone + Ord + Hash + Debug + Display + Send + Sync + Signed + 'static
{
    fn from_i64(v: i64) -> Self;

    /// `self / rhs` when the quotient is representable exactly, `None` otherwise
    /// (including division by zero).
    fn try_divide(&self, rhs: &Self) -> Option<Self>;

    fn is_integral(&self) -> bool;

    fn to_rational(&self) -> BigRational;

    /// `None` when `q` is not representable (non-integer for integer types, or
    /// out of range).
    fn from_rational(q: &BigRational) -> Option<Self>;

    fn approx_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.to_rational()).unwrap_or(f64::NAN)
    }

    /// Scales `(a, b, c)` to the unique coprime integer triple spanning the same
    /// projective point whose first nonzero entry among `(a, b)` is positive.
    /// Requires `(a, b) != (0, 0)`.
    fn canonical_line(coef: [Self; 3]) -> [Self; 3];
}

fn sign_fix<T: Exact>(mut t: [T; 3]) -> [T; 3] {
    let lead_negative = if !t[0].is_zero() {
        t[0].is_negative()
    } else {
        t[1].is_negative()
    };
    if lead_negative {
        for v in t.iter_mut() {
            *v = -v.clone();
        }
    }
    t
}

macro_rules! impl_exact_int {
    ($($t:ty),*) => {$(
        impl Exact for $t {
            fn from_i64(v: i64) -> Self {
                <$t>::from(v)
            }

            fn try_divide(&self, rhs: &Self) -> Option<Self> {
                if rhs.is_zero() {
                    return None;
                }
                let (q, r) = self.div_rem(rhs);
                r.is_zero().then_some(q)
            }

            fn is_integral(&self) -> bool {
                true
            }

            fn to_rational(&self) -> BigRational {
                BigRational::from_integer(BigInt::from(self.clone()))
            }

            fn from_rational(q: &BigRational) -> Option<Self> {
                if !q.is_integer() {
                    return None;
                }
                <$t>::try_from(q.numer().clone()).ok()
            }

            fn canonical_line(coef: [Self; 3]) -> [Self; 3] {
                let g = coef[0].gcd(&coef[1]).gcd(&coef[2]);
                debug_assert!(!g.is_zero());
                let t = coef.map(|v| v / g.clone());
                sign_fix(t)
            }
        }
    )*};
}

impl_exact_int!(i64, i128, BigInt);

macro_rules! impl_exact_ratio {
    ($($t:ty),*) => {$(
        impl Exact for Ratio<$t> {
            fn from_i64(v: i64) -> Self {
                Ratio::from_integer(<$t>::from(v))
            }

            fn try_divide(&self, rhs: &Self) -> Option<Self> {
                if rhs.is_zero() {
                    None
                } else {
                    Some(self.clone() / rhs.clone())
                }
            }

            fn is_integral(&self) -> bool {
                self.is_integer()
            }

            fn to_rational(&self) -> BigRational {
                BigRational::new(
                    BigInt::from(self.numer().clone()),
                    BigInt::from(self.denom().clone()),
                )
            }

            fn from_rational(q: &BigRational) -> Option<Self> {
                let n = <$t>::try_from(q.numer().clone()).ok()?;
                let d = <$t>::try_from(q.denom().clone()).ok()?;
                Some(Ratio::new(n, d))
            }

            fn canonical_line(coef: [Self; 3]) -> [Self; 3] {
                let l = coef
                    .iter()
                    .fold(<$t>::one(), |acc, v| acc.lcm(v.denom()));
                let ints = coef.map(|v| (v * Ratio::from_integer(l.clone())).to_integer());
                let g = ints[0].gcd(&ints[1]).gcd(&ints[2]);
                debug_assert!(!g.is_zero());
                sign_fix(ints.map(|v| Ratio::from_integer(v / g.clone())))
            }
        }
    )*};
}

impl_exact_ratio!(i64, i128, BigInt);

/// Parses `p/q` or an integer `p` into a canonical big rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational literal: {s:?}"));
    let q = match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Input(format!("zero denominator in {s:?}")));
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
    };
    Ok(q)
}

/// Parses a rational literal directly into `T`.
pub fn parse_scalar<T: Exact>(s: &str) -> Result<T> {
    let q = parse_rational(s)?;
    T::from_rational(&q)
        .ok_or_else(|| Error::Input(format!("{s:?} is not representable in this scalar type")))
}

/// Canonical text form: `p` for integers, `p/q` otherwise. Never a decimal.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter storing a [`BigRational`] as its `p/q` string.
pub mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of `p/q` strings.
pub mod rational_vec_str {
    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type R64 = Ratio<i64>;

    #[test]
    fn parse_and_format() {
        let q = parse_rational("6/-4").unwrap();
        assert_eq!(format_rational(&q), "-3/2");
        assert_eq!(format_rational(&parse_rational(" 7 ").unwrap()), "7");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(parse_rational("1/3").unwrap().to_string(), "1/3");
    }

    #[test]
    fn integer_division_is_exact_or_none() {
        assert_eq!(7i64.try_divide(&2), None);
        assert_eq!((-8i64).try_divide(&2), Some(-4));
        assert_eq!(1i64.try_divide(&0), None);
        let half = R64::new(1, 2);
        assert_eq!(R64::from_i64(1).try_divide(&R64::from_i64(2)), Some(half));
    }

    #[test]
    fn scalar_conversion_respects_type() {
        let half = parse_rational("1/2").unwrap();
        assert_eq!(i64::from_rational(&half), None);
        assert_eq!(R64::from_rational(&half), Some(R64::new(1, 2)));
        assert!(parse_scalar::<i64>("5").is_ok());
        assert!(parse_scalar::<i64>("5/3").is_err());
        assert_eq!(parse_scalar::<BigRational>("5/3").unwrap().approx_f64(), 5.0 / 3.0);
    }

    #[test]
    fn canonical_lines_agree_across_types() {
        assert_eq!(i64::canonical_line([-4, 6, 2]), [2, -3, -1]);
        assert_eq!(i64::canonical_line([0, -3, 6]), [0, 1, -2]);
        let r = R64::canonical_line([R64::new(1, 2), R64::new(-3, 4), R64::new(1, 4)]);
        assert_eq!(r, [R64::from_i64(2), R64::from_i64(-3), R64::from_i64(1)]);
        let big = BigRational::canonical_line([
            BigRational::from_i64(-2),
            BigRational::from_i64(3),
            BigRational::from_i64(1),
        ]);
        assert_eq!(big[0], BigRational::from_i64(2));
        assert_eq!(big[2], BigRational::from_i64(-1));
    }
}
