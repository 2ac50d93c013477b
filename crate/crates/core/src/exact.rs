//! Exact arithmetic: normalized big rationals, half-integers and the two
//! sawtooth functions used by the sigma formulas.
//!
//! Two sawtooth functions are kept apart on purpose. [`sawtooth_centered`]
//! is `frac(x) - 1/2` everywhere, including at integers where it is `-1/2`.
//! [`sawtooth_doubled`] is the classical Dedekind sawtooth `((x))`, which is
//! `0` at integers. The plain fractional part is [`frac_part`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn half() -> Self {
        Self::new(1, 2)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self(self.0.recip()))
        }
    }

    /// The integer value, if this is an integer that fits in an `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || crate::Error::Parse {
            what: "rational",
            input: s.to_string(),
        };
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Self::new(n, d))
            }
            None => Ok(Self::from_integer(s.parse::<BigInt>().map_err(|_| err())?)),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a `BigInt` as a decimal string.
pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigInt, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A number of the form `twice_value / 2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger {
    twice_value: BigInt,
}

impl HalfInteger {
    pub fn from_twice(twice_value: impl Into<BigInt>) -> Self {
        Self {
            twice_value: twice_value.into(),
        }
    }

    /// `None` unless the denominator of `x` is 1 or 2.
    pub fn from_rational(x: &ExactRational) -> Option<Self> {
        let two = BigInt::from(2);
        if x.denom().is_one() {
            Some(Self::from_twice(x.numer() * 2))
        } else if *x.denom() == two {
            Some(Self::from_twice(x.numer().clone()))
        } else {
            None
        }
    }

    pub fn twice_value(&self) -> &BigInt {
        &self.twice_value
    }

    pub fn to_rational(&self) -> ExactRational {
        ExactRational::new(self.twice_value.clone(), 2)
    }

    pub fn is_integer(&self) -> bool {
        self.twice_value.is_even()
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_rational().fmt(f)
    }
}

/// `⌊x⌋`.
pub fn floor_part(x: &ExactRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// `x - ⌊x⌋`, in `[0, 1)`.
pub fn frac_part(x: &ExactRational) -> ExactRational {
    ExactRational::new(x.numer().mod_floor(x.denom()), x.denom().clone())
}

/// `frac(x) - 1/2`, in `[-1/2, 1/2)`; equals `-1/2` at integers.
pub fn sawtooth_centered(x: &ExactRational) -> ExactRational {
    frac_part(x) - ExactRational::half()
}

/// The Dedekind sawtooth `((x))`: `frac(x) - 1/2` off the integers, `0` on them.
pub fn sawtooth_doubled(x: &ExactRational) -> ExactRational {
    if x.is_integer() {
        ExactRational::zero()
    } else {
        sawtooth_centered(x)
    }
}

/// Simplest rational near `x`: the first continued-fraction convergent `h/k`
/// with `|x - h/k| ≤ tol` and `k ≤ max_den`. Returns the fraction and the
/// residual `|x - h/k|`.
pub fn reconstruct_rational(x: f64, max_den: u128, tol: f64) -> Option<(ExactRational, f64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let a_big = BigInt::from(a as i128);
        let h_next = &a_big * &h + &h_prev;
        let k_next = &a_big * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        if k.to_u128().is_none_or(|d| d > max_den) {
            return None;
        }
        let candidate = ExactRational::new(h.clone(), k.clone());
        let residual = (x - candidate.to_f64()).abs();
        if residual <= tol {
            return Some((candidate, residual));
        }
        let frac = y - a;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}
