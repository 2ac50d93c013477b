//! The four Casson–Gordon families.
//!
//! For coprime `1 < q < p²` with `p` odd and `q` even, `(p, q)` is in a
//! family when, for some `n ≥ 1` and sign `s = ±1`:
//!
//! 1. `q = n·p + s` with `gcd(n, p) = 1`
//! 2. `q = n·(p + s)` with `n | 2p - s`
//! 3. `q = n·(p + s)` with `n | p + s` and `n` odd
//! 4. `q = n·(2p + s)` with `n | p - s` and `(p - s)/n` odd
//!
//! In every condition `n` is determined by `q`, so classification is `O(1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, PairError};

/// Checks `p` odd `≥ 3`, `q` even, `1 < q < p²`, `gcd(p, q) = 1`, in that order.
pub fn validate_pair(p: u64, q: u64) -> Result<(u64, u64), PairError> {
    if p > crate::MAX_P {
        return Err(PairError::PTooLarge(p));
    }
    if p.is_multiple_of(2) {
        return Err(PairError::PNotOdd(p));
    }
    if p < 3 {
        return Err(PairError::PTooSmall(p));
    }
    if q % 2 == 1 {
        return Err(PairError::QNotEven(q));
    }
    let p_sq = p * p;
    if q <= 1 || q >= p_sq {
        return Err(PairError::QOutOfRange { q, p_sq });
    }
    let g = p.gcd(&q);
    if g != 1 {
        return Err(PairError::NotCoprime { p, q, gcd: g });
    }
    Ok((p, q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyWitness {
    pub family: u8,
    pub n: u64,
    /// `+1` or `-1`, the upper or lower sign of the family condition.
    pub sign: i8,
}

impl FamilyWitness {
    /// Re-checks the family equation for `(p, q)`.
    pub fn holds_for(&self, p: u64, q: u64) -> bool {
        let (p, q, n) = (p as i128, q as i128, self.n as i128);
        let s = self.sign as i128;
        if n < 1 || s.abs() != 1 {
            return false;
        }
        match self.family {
            1 => q == n * p + s && (self.n).gcd(&(p as u64)) == 1,
            2 => q == n * (p + s) && (2 * p - s) % n == 0,
            3 => q == n * (p + s) && (p + s) % n == 0 && n % 2 == 1,
            4 => q == n * (2 * p + s) && (p - s) % n == 0 && ((p - s) / n) % 2 == 1,
            _ => false,
        }
    }
}

impl fmt::Display for FamilyWitness {
    /// `F<family>:<n>:<+|->`, e.g. `F1:1:-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { '+' } else { '-' };
        write!(f, "F{}:{}:{}", self.family, self.n, s)
    }
}

impl FromStr for FamilyWitness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let err = || Error::Parse {
            what: "family witness",
            input: s.to_string(),
        };
        let rest = s.strip_prefix('F').ok_or_else(err)?;
        let mut parts = rest.split(':');
        let family: u8 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(err)?;
        let n: u64 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(err)?;
        let sign = match parts.next() {
            Some("+") => 1,
            Some("-") => -1,
            _ => return Err(err()),
        };
        if parts.next().is_some() || !(1..=4).contains(&family) {
            return Err(err());
        }
        Ok(Self { family, n, sign })
    }
}

impl Serialize for FamilyWitness {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilyWitness {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub witnesses: Vec<FamilyWitness>,
}

impl Classification {
    pub fn is_member(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

/// `n` with `q = n·d` and `n ≥ 1`, if `d` divides `q`.
fn exact_quotient(q: i128, d: i128) -> Option<i128> {
    (d > 0 && q % d == 0 && q / d >= 1).then(|| q / d)
}

/// All family witnesses of a valid pair, in (family, sign) order.
pub fn classify(p: u64, q: u64) -> Result<Classification, PairError> {
    validate_pair(p, q)?;
    let (pi, qi) = (p as i128, q as i128);
    let mut witnesses = Vec::new();
    let mut push = |family: u8, n: i128, sign: i128| {
        witnesses.push(FamilyWitness {
            family,
            n: n as u64,
            sign: sign as i8,
        })
    };

    for family in 1..=4u8 {
        for s in [1i128, -1] {
            match family {
                1 => {
                    if let Some(n) = exact_quotient(qi - s, pi) {
                        if (n as u64).gcd(&p) == 1 {
                            push(1, n, s);
                        }
                    }
                }
                2 => {
                    if let Some(n) = exact_quotient(qi, pi + s) {
                        if (2 * pi - s) % n == 0 {
                            push(2, n, s);
                        }
                    }
                }
                3 => {
                    if let Some(n) = exact_quotient(qi, pi + s) {
                        if (pi + s) % n == 0 && n % 2 == 1 {
                            push(3, n, s);
                        }
                    }
                }
                _ => {
                    if let Some(n) = exact_quotient(qi, 2 * pi + s) {
                        if (pi - s) % n == 0 && ((pi - s) / n) % 2 == 1 {
                            push(4, n, s);
                        }
                    }
                }
            }
        }
    }
    Ok(Classification { witnesses })
}

/// Every valid pair with `p ≤ p_max` that lies in some family.
pub fn family_pairs_up_to(p_max: u64) -> BTreeSet<(u64, u64)> {
    let mut out = BTreeSet::new();
    for p in (3..=p_max).step_by(2) {
        for q in (2..p * p).step_by(2) {
            if let Ok(c) = classify(p, q) {
                if c.is_member() {
                    out.insert((p, q));
                }
            }
        }
    }
    out
}
