//! Lattice-point census of the triangles `rΔ(p,q)` with vertices `(0,0)`,
//! `(rp,0)` and `(rp, rq/p)`, the Pick count and the counting definition of
//! sigma.
//!
//! The three corners are never counted as boundary points and the `+1/2` in
//! the Pick count is unconditional, whether or not the apex is a lattice
//! point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactRational, HalfInteger};
use crate::families::validate_pair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriangleParams {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    /// `gcd(p, q) == 1`; required by the sigma operations, not by the census.
    pub coprime: bool,
}

impl TriangleParams {
    pub fn new(p: u64, q: u64, r: u64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if v == 0 {
                return Err(Error::NonPositive { name });
            }
        }
        if p > crate::MAX_P {
            return Err(Error::PTooLarge(p));
        }
        Ok(Self {
            p,
            q,
            r,
            coprime: p.gcd(&q) == 1,
        })
    }

    pub fn require_coprime(&self) -> Result<()> {
        if self.coprime {
            Ok(())
        } else {
            Err(Error::NotCoprime {
                a: self.q as i64,
                b: self.p,
                gcd: self.p.gcd(&self.q),
            })
        }
    }

    /// Whether the apex `(rp, rq/p)` is a lattice point.
    pub fn apex_is_lattice(&self) -> bool {
        (self.q as u128 * self.r as u128).is_multiple_of(self.p as u128)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeCensus {
    #[serde(with = "crate::exact::bigint_string")]
    pub interior: BigInt,
    #[serde(with = "crate::exact::bigint_string")]
    pub boundary_nonvertex: BigInt,
    /// 3 when the apex is a lattice point, otherwise 2.
    pub corner_lattice_points: u8,
}

impl LatticeCensus {
    /// All lattice points of the closed triangle.
    pub fn total(&self) -> BigInt {
        &self.interior + &self.boundary_nonvertex + BigInt::from(self.corner_lattice_points)
    }
}

pub fn area(tri: &TriangleParams) -> ExactRational {
    let r = BigInt::from(tri.r);
    ExactRational::new(BigInt::from(tri.q) * &r * &r, 2)
}

/// Trusted oracle: walks every column `x = 0..=rp` and classifies its
/// lattice points with integer comparisons only. `O(rp)`.
pub fn census_bruteforce(tri: &TriangleParams) -> LatticeCensus {
    let p_sq = tri.p as u128 * tri.p as u128;
    let q = tri.q as u128;
    let width = tri.p as u128 * tri.r as u128;
    let mut interior = 0u128;
    let mut boundary = 0u128;
    let mut corners = 0u8;

    for x in 0..=width {
        let qx = q
            .checked_mul(x)
            .expect("census_bruteforce: q*x overflows u128");
        // Column x holds y = 0..=top inside the closed triangle.
        let top = qx / p_sq;
        let on_hypotenuse = p_sq * top == qx;
        if x == 0 {
            // Only the origin.
            corners += 1;
        } else if x < width {
            let interior_here = if on_hypotenuse { top - 1 } else { top };
            interior += interior_here;
            // (x, 0) on the base, plus (x, top) when it lies on the hypotenuse.
            boundary += 1 + u128::from(on_hypotenuse && top > 0);
        } else {
            // Right edge: (rp, 0) is a corner, the apex is a corner when integral.
            corners += 1;
            if on_hypotenuse {
                corners += 1;
                boundary += top - 1;
            } else {
                boundary += top;
            }
        }
    }

    LatticeCensus {
        interior: BigInt::from(interior),
        boundary_nonvertex: BigInt::from(boundary),
        corner_lattice_points: corners,
    }
}

/// `Σ_{i=0}^{n-1} ⌊(a·i + b)/m⌋` for `a, b ≥ 0`, `m > 0`, in `O(log)` steps.
/// Returns `None` on `i128` overflow.
pub(crate) fn floor_sum_i128(mut n: i128, mut m: i128, mut a: i128, mut b: i128) -> Option<i128> {
    debug_assert!(n >= 0 && m > 0 && a >= 0 && b >= 0);
    let mut ans: i128 = 0;
    loop {
        if n == 0 {
            return Some(ans);
        }
        if a >= m {
            let tri = n.checked_mul(n - 1)? / 2;
            ans = ans.checked_add(tri.checked_mul(a / m)?)?;
            a %= m;
        }
        if b >= m {
            ans = ans.checked_add(n.checked_mul(b / m)?)?;
            b %= m;
        }
        let y_max = a.checked_mul(n)?.checked_add(b)?;
        if y_max < m {
            return Some(ans);
        }
        n = y_max / m;
        b = y_max % m;
        std::mem::swap(&mut m, &mut a);
    }
}

pub(crate) fn floor_sum_big(n: &BigInt, m: &BigInt, a: &BigInt, b: &BigInt) -> BigInt {
    let (mut n, mut m, mut a, mut b) = (n.clone(), m.clone(), a.clone(), b.clone());
    let mut ans = BigInt::zero();
    loop {
        if n.is_zero() {
            return ans;
        }
        if a >= m {
            ans += (&n * (&n - 1i32) / 2i32) * (&a / &m);
            a %= &m;
        }
        if b >= m {
            ans += &n * (&b / &m);
            b %= &m;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            return ans;
        }
        n = &y_max / &m;
        b = &y_max % &m;
        std::mem::swap(&mut m, &mut a);
    }
}

fn census_floorsum_i128(tri: &TriangleParams) -> Option<(i128, i128)> {
    let p = tri.p as i128;
    let q = tri.q as i128;
    let r = tri.r as i128;
    let p_sq = p * p;
    let width = p.checked_mul(r)?;
    let interior = floor_sum_i128(width - 1, p_sq, q, q - 1)?;
    let rq = r.checked_mul(q)?;
    let right = rq / p - i128::from(rq % p == 0);
    let hypotenuse = (width - 1) / p_sq;
    let boundary = (width - 1).checked_add(right)?.checked_add(hypotenuse)?;
    Some((interior, boundary))
}

fn census_floorsum_big(tri: &TriangleParams) -> (BigInt, BigInt) {
    let p = BigInt::from(tri.p);
    let q = BigInt::from(tri.q);
    let r = BigInt::from(tri.r);
    let p_sq = &p * &p;
    let width_m1 = &p * &r - 1i32;
    let interior = floor_sum_big(&width_m1, &p_sq, &q, &(&q - 1i32));
    let rq = &r * &q;
    let (quot, rem) = rq.div_rem(&p);
    let right = if rem.is_zero() { quot - 1i32 } else { quot };
    let hypotenuse = &width_m1 / &p_sq;
    (interior, &width_m1 + right + hypotenuse)
}

/// Closed-form census for coprime `(p, q)`:
/// interior `= Σ_{x=1}^{rp-1} ⌊(qx-1)/p²⌋`, base `rp-1`, right edge
/// `⌊rq/p⌋ - [p | rq]`, hypotenuse `⌊(rp-1)/p²⌋`.
pub fn census_floorsum(tri: &TriangleParams) -> Result<LatticeCensus> {
    tri.require_coprime()?;
    let (interior, boundary) = match census_floorsum_i128(tri) {
        Some((i, b)) => (BigInt::from(i), BigInt::from(b)),
        None => census_floorsum_big(tri),
    };
    Ok(LatticeCensus {
        interior,
        boundary_nonvertex: boundary,
        corner_lattice_points: if tri.apex_is_lattice() { 3 } else { 2 },
    })
}

/// `interior + boundary/2 + 1/2`.
pub fn pick_value(census: &LatticeCensus) -> HalfInteger {
    HalfInteger::from_twice(&census.interior * 2 + &census.boundary_nonvertex + 1)
}

/// `4·(area - pick) + 1 = 2qr² - 4·interior - 2·boundary - 1`.
pub fn sigma_from_census(tri: &TriangleParams, census: &LatticeCensus) -> BigInt {
    let r = BigInt::from(tri.r);
    BigInt::from(tri.q) * &r * &r * 2 - &census.interior * 4 - &census.boundary_nonvertex * 2 - 1
}

/// `i128` fast path of [`sigma_by_count`]; `None` on overflow.
pub(crate) fn sigma_count_fast(p: u64, q: u64, r: u64) -> Option<i64> {
    let tri = TriangleParams {
        p,
        q,
        r,
        coprime: true,
    };
    let (interior, boundary) = census_floorsum_i128(&tri)?;
    let r = r as i128;
    let sigma = (q as i128)
        .checked_mul(r)?
        .checked_mul(r)?
        .checked_mul(2)?
        .checked_sub(interior.checked_mul(4)?)?
        .checked_sub(boundary.checked_mul(2)?)?
        - 1;
    i64::try_from(sigma).ok()
}

/// `σ(p², q, r)` from the lattice census. Always an odd integer.
pub fn sigma_by_count(p: u64, q: u64, r: u64) -> Result<i64> {
    let tri = TriangleParams::new(p, q, r)?;
    tri.require_coprime()?;
    if let Some(s) = sigma_count_fast(p, q, r) {
        return Ok(s);
    }
    let census = census_floorsum(&tri)?;
    let sigma = sigma_from_census(&tri, &census);
    // |σ| is bounded by the sum of the partial quotients of p²/q, so it fits
    // an i64 whenever p < 2^31.
    Ok(sigma.to_i64().expect("sigma exceeds i64 although p < 2^31"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostCorrect {
    pub holds: bool,
    pub first_violation_r: Option<u64>,
}

/// Whether `σ(p², q, r) ∈ {-1, 1}` for all `r = 1..p-1`, scanning
/// `r = 1..=(p-1)/2` (σ is symmetric under `r ↦ p-r`) and stopping at the
/// first violation, which is then the smallest violating `r`.
pub fn is_almost_correct_all(p: u64, q: u64) -> Result<AlmostCorrect> {
    validate_pair(p, q)?;
    for r in 1..=(p - 1) / 2 {
        let s = sigma_by_count(p, q, r)?;
        if s != 1 && s != -1 {
            return Ok(AlmostCorrect {
                holds: false,
                first_violation_r: Some(r),
            });
        }
    }
    Ok(AlmostCorrect {
        holds: true,
        first_violation_r: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub k: u64,
    /// `+1` or `-1`.
    pub sign: i8,
    pub q_reduced: u64,
    pub already_reduced: bool,
}

/// Writes `q_raw = 2·k·p² + sign·q` with `1 < q < p²`.
pub fn reduce_parameters(p: u64, q_raw: u64) -> Result<ReductionResult> {
    use crate::error::PairError;
    if p > crate::MAX_P {
        return Err(PairError::PTooLarge(p).into());
    }
    if p.is_multiple_of(2) {
        return Err(PairError::PNotOdd(p).into());
    }
    if p < 3 {
        return Err(PairError::PTooSmall(p).into());
    }
    if q_raw % 2 == 1 || q_raw < 2 {
        return Err(PairError::QNotEven(q_raw).into());
    }
    let g = p.gcd(&q_raw);
    if g != 1 {
        return Err(PairError::NotCoprime {
            p,
            q: q_raw,
            gcd: g,
        }
        .into());
    }
    let p_sq = p * p;
    let period = 2 * p_sq;
    let (k, m) = q_raw.div_rem(&period);
    // m is even and p² is odd, so m != p².
    if m == 0 {
        Err(Error::NoReduction { q: q_raw })
    } else if m < p_sq {
        Ok(ReductionResult {
            k,
            sign: 1,
            q_reduced: m,
            already_reduced: k == 0,
        })
    } else {
        Ok(ReductionResult {
            k: k + 1,
            sign: -1,
            q_reduced: period - m,
            already_reduced: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(p: u64, q: u64, r: u64) -> TriangleParams {
        TriangleParams::new(p, q, r).unwrap()
    }

    fn counts(c: &LatticeCensus) -> (i64, i64) {
        (
            c.interior.to_i64().unwrap(),
            c.boundary_nonvertex.to_i64().unwrap(),
        )
    }

    #[test]
    fn area_examples() {
        assert_eq!(area(&tri(5, 18, 1)), ExactRational::from(9));
        assert_eq!(area(&tri(5, 4, 1)), ExactRational::from(2));
        assert_eq!(area(&tri(11, 46, 2)), ExactRational::from(92));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(counts(&census_bruteforce(&tri(5, 18, 1))), (5, 7));
        assert_eq!(counts(&census_bruteforce(&tri(5, 4, 1))), (0, 4));
        let unit = census_bruteforce(&tri(1, 2, 1));
        assert_eq!(counts(&unit), (0, 1));
        assert_eq!(unit.corner_lattice_points, 3);
    }

    #[test]
    fn floorsum_examples() {
        assert_eq!(counts(&census_floorsum(&tri(5, 18, 1)).unwrap()), (5, 7));
        let c1 = census_floorsum(&tri(11, 46, 1)).unwrap();
        assert_eq!(pick_value(&c1).to_string(), "47/2");
        let c2 = census_floorsum(&tri(11, 46, 2)).unwrap();
        assert_eq!(pick_value(&c2).to_string(), "92");
        assert!(matches!(
            census_floorsum(&tri(6, 4, 1)),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn pick_examples() {
        let c = |i: i64, b: i64| LatticeCensus {
            interior: i.into(),
            boundary_nonvertex: b.into(),
            corner_lattice_points: 2,
        };
        assert_eq!(pick_value(&c(5, 7)).to_string(), "9");
        assert_eq!(pick_value(&c(0, 4)).to_string(), "5/2");
        assert_eq!(pick_value(&c(0, 0)).to_string(), "1/2");
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_by_count(5, 18, 1).unwrap(), 1);
        assert_eq!(sigma_by_count(5, 4, 1).unwrap(), -1);
        assert_eq!(sigma_by_count(11, 46, 1).unwrap(), -1);
        assert_eq!(sigma_by_count(11, 46, 2).unwrap(), 1);
        assert!(sigma_by_count(9, 6, 1).is_err());
    }

    #[test]
    fn almost_correct_examples() {
        assert_eq!(
            is_almost_correct_all(5, 4).unwrap(),
            AlmostCorrect {
                holds: true,
                first_violation_r: None
            }
        );
        assert!(is_almost_correct_all(11, 46).unwrap().holds);
        // σ(81, 22, r) for r = 1..8 is -1, 1, 1, 3, 3, 1, 1, -1.
        assert_eq!(
            is_almost_correct_all(9, 22).unwrap(),
            AlmostCorrect {
                holds: false,
                first_violation_r: Some(4)
            }
        );
    }

    #[test]
    fn almost_correct_rejects_each_hypothesis() {
        use crate::error::PairError::*;
        let err = |p, q| match is_almost_correct_all(p, q) {
            Err(Error::Pair(e)) => e,
            other => panic!("expected pair error, got {other:?}"),
        };
        assert_eq!(err(4, 6), PNotOdd(4));
        assert_eq!(err(1, 2), PTooSmall(1));
        assert_eq!(err(5, 3), QNotEven(3));
        assert_eq!(err(5, 26), QOutOfRange { q: 26, p_sq: 25 });
        assert_eq!(
            err(5, 10),
            NotCoprime {
                p: 5,
                q: 10,
                gcd: 5
            }
        );
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_parameters(5, 68).unwrap();
        assert_eq!((r.k, r.sign, r.q_reduced), (1, 1, 18));
        let r = reduce_parameters(5, 32).unwrap();
        assert_eq!((r.k, r.sign, r.q_reduced), (1, -1, 18));
        let r = reduce_parameters(5, 4).unwrap();
        assert_eq!(
            (r.k, r.sign, r.q_reduced, r.already_reduced),
            (0, 1, 4, true)
        );
        assert!(reduce_parameters(5, 100).is_err());
        assert!(reduce_parameters(5, 0).is_err());
    }

    #[test]
    fn floor_sum_matches_naive() {
        for n in 0..30i128 {
            for m in 1..12i128 {
                for a in 0..15i128 {
                    for b in 0..15i128 {
                        let naive: i128 = (0..n).map(|i| (a * i + b) / m).sum();
                        assert_eq!(floor_sum_i128(n, m, a, b), Some(naive));
                        let big = floor_sum_big(&n.into(), &m.into(), &a.into(), &b.into());
                        assert_eq!(big, BigInt::from(naive));
                    }
                }
            }
        }
    }

    #[test]
    fn big_fallback_matches_fast_path() {
        for (p, q, r) in [(5, 4, 3), (11, 46, 7), (13, 100, 30)] {
            let t = tri(p, q, r);
            let (i, b) = census_floorsum_i128(&t).unwrap();
            assert_eq!(census_floorsum_big(&t), (BigInt::from(i), BigInt::from(b)));
        }
    }

    #[test]
    fn huge_magnification_promotes_to_bigint() {
        // r large enough that q·r² overflows i128 in the fast path.
        let r = u64::MAX;
        assert!(sigma_count_fast(5, 4, r).is_none());
        // σ depends on r only through r mod p, and r ≡ 0 mod 5 here.
        assert_eq!(r % 5, 0);
        assert_eq!(sigma_by_count(5, 4, r).unwrap(), 1);
        assert_eq!(
            sigma_by_count(5, 4, r - 1).unwrap(),
            sigma_by_count(5, 4, 4).unwrap()
        );
    }
}
