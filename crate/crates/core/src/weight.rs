use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact nonnegative rational vertex weight.
///
/// Rendered as `"7/2"`, or `"3"` when the denominator is one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(BigRational);

impl Weight {
    pub fn zero() -> Self {
        Weight(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Weight(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `num/den`; fails on a zero denominator or a negative value.
    pub fn new(num: i64, den: i64) -> Result<Self, String> {
        if den == 0 {
            return Err("zero denominator".into());
        }
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        if r.is_negative() {
            return Err(format!("negative weight {}", r));
        }
        Ok(Weight(r))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| format!("invalid numerator `{}`", num))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| format!("invalid denominator `{}`", den))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        let r = BigRational::new(num, den);
        if r.is_negative() {
            return Err(format!("negative weight `{}`", s));
        }
        Ok(Weight(r))
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn add(self, rhs: &'a Weight) -> Weight {
        Weight(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Weight> for &'a Weight {
    type Output = Weight;
    /// Only used to undo double counting, so the result stays nonnegative.
    fn sub(self, rhs: &'a Weight) -> Weight {
        Weight(&self.0 - &rhs.0)
    }
}

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, rhs: &Weight) {
        self.0 += &rhs.0;
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        let mut acc = Weight::zero();
        for w in iter {
            acc += w;
        }
        acc
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_renders() {
        let w: Weight = "14/4".parse().unwrap();
        assert_eq!(w.to_string(), "7/2");
        let w: Weight = "3".parse().unwrap();
        assert_eq!(w.to_string(), "3");
        assert!("-1".parse::<Weight>().is_err());
        assert!("1/0".parse::<Weight>().is_err());
        assert!("x".parse::<Weight>().is_err());
    }

    #[test]
    fn exact_sums() {
        let a: Weight = "1/3".parse().unwrap();
        let total: Weight = [a.clone(), a.clone(), a].iter().sum();
        assert_eq!(total, Weight::one());
    }
}
