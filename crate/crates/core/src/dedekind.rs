//! Dedekind sums and Fourier–Dedekind sums, with the identities that tie
//! them to σ and to the lattice census.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{frac_part, reconstruct_rational, ExactRational, HalfInteger};
use crate::families::validate_pair;
use crate::lattice::{census_floorsum, pick_value, TriangleParams};
use crate::sigma::spectrum;

/// Exact `s(a, b) = Σ_{k=1}^{b-1} ((k/b))((ka/b))` for `gcd(a, b) = 1`.
///
/// Off the integers `((k/b)) = (2k - b)/(2b)`, so the sum is accumulated as
/// an integer over the common denominator `4b²`.
pub fn dedekind_sum(a: i64, b: u64) -> Result<ExactRational> {
    if b == 0 {
        return Err(Error::NonPositive { name: "b" });
    }
    let a_mod = (a as i128).rem_euclid(b as i128) as u128;
    let g = (a_mod as u64).gcd(&b);
    if g != 1 {
        return Err(Error::NotCoprime { a, b, gcd: g });
    }
    let b128 = b as u128;
    let fast = (|| {
        let bi = b as i128;
        let mut acc: i128 = 0;
        for k in 1..b128 {
            let ka = ((k * a_mod) % b128) as i128;
            acc = acc.checked_add((2 * k as i128 - bi).checked_mul(2 * ka - bi)?)?;
        }
        Some(acc)
    })();
    let numer = match fast {
        Some(acc) => BigInt::from(acc),
        None => {
            let bb = BigInt::from(b);
            let mut acc = BigInt::zero();
            for k in 1..b128 {
                let ka = BigInt::from((k * a_mod) % b128);
                acc += (BigInt::from(2 * k) - &bb) * (ka * 2 - &bb);
            }
            acc
        }
    };
    Ok(ExactRational::new(numer, BigInt::from(b) * b * 4))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SikoraCheck {
    /// `Σ_{r=1}^{p-1} σ(p², q, r)` from the spectrum.
    pub lhs: i64,
    /// `4·s(q, p) - 4p·s(q, p²)`.
    pub rhs: ExactRational,
    pub equal: bool,
}

/// Compares the σ sum with the Dedekind-sum expression; the two sides are
/// computed independently.
pub fn sikora_check(p: u64, q: u64) -> Result<SikoraCheck> {
    validate_pair(p, q)?;
    let lhs = spectrum(p, q)?.sum();
    let rhs = sikora_rhs(p, q)?;
    let equal = rhs == ExactRational::from(lhs);
    Ok(SikoraCheck { lhs, rhs, equal })
}

fn sikora_rhs(p: u64, q: u64) -> Result<ExactRational> {
    let four = ExactRational::from(4);
    let s_small = dedekind_sum(q as i64, p)?;
    let s_big = dedekind_sum(q as i64, p * p)?;
    Ok(&four * &s_small - &(&four * &(ExactRational::from(p as i64) * s_big)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakCriterion {
    /// `(4/(p-1))·|s(q, p) - p·s(q, p²)|`.
    pub value: ExactRational,
    pub satisfied: bool,
}

/// The necessary condition `(4/(p-1))·|s(q,p) - p·s(q,p²)| ≤ 1` satisfied by
/// every family pair, compared exactly.
pub fn weak_criterion(p: u64, q: u64) -> Result<WeakCriterion> {
    validate_pair(p, q)?;
    let diff =
        dedekind_sum(q as i64, p)? - ExactRational::from(p as i64) * dedekind_sum(q as i64, p * p)?;
    let value = ExactRational::new(4, p - 1) * diff.abs();
    let satisfied = value <= ExactRational::one();
    Ok(WeakCriterion { value, satisfied })
}

/// All valid `q` for this `p` satisfying the weak criterion, ascending.
pub fn weak_scan(p: u64) -> Result<BTreeSet<u64>> {
    validate_pair(p, 2)?;
    let mut out = BTreeSet::new();
    for q in (2..p * p).step_by(2) {
        if q.gcd(&p) != 1 {
            continue;
        }
        if weak_criterion(p, q)?.satisfied {
            out.insert(q);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierDedekindValue {
    pub value: ExactRational,
    pub n: i64,
    pub a1: i64,
    pub a2: i64,
    pub b: u64,
    /// `|numeric - value|` after reconstruction.
    pub residual: f64,
    pub imaginary: f64,
}

/// Tolerance on the residual and the imaginary part.
pub const FDS_TOLERANCE: f64 = 1e-6;

/// `s_n(a₁, a₂; b) = (1/b) Σ_{k=1}^{b-1} ζ^{kn} / ((1 - ζ^{k·a₁})(1 - ζ^{k·a₂}))`
/// with `ζ = e^{2πi/b}`, evaluated in double precision and reconstructed as
/// the simplest rational with denominator at most `12·b·|a₁a₂|`.
pub fn fourier_dedekind(n: i64, a1: i64, a2: i64, b: u64) -> Result<FourierDedekindValue> {
    if b == 0 {
        return Err(Error::NonPositive { name: "b" });
    }
    for a in [a1, a2] {
        let g = ((a as i128).rem_euclid(b as i128) as u64).gcd(&b);
        if g != 1 {
            return Err(Error::NotCoprime { a, b, gcd: g });
        }
    }
    let bi = b as i128;
    let root = |m: i128| {
        let theta = 2.0 * PI * (m.rem_euclid(bi) as f64) / b as f64;
        Complex64::new(theta.cos(), theta.sin())
    };
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..bi {
        let numer = root(k * n as i128);
        let denom = (one - root(k * a1 as i128)) * (one - root(k * a2 as i128));
        sum += numer / denom;
    }
    let numeric = sum / b as f64;
    let imaginary = numeric.im.abs();
    let fail = |detail: String| Error::Reconstruction {
        n,
        a1,
        a2,
        b,
        detail,
    };
    if imaginary >= FDS_TOLERANCE {
        return Err(fail(format!("imaginary part {imaginary:e}")));
    }
    let max_den = 12 * b as u128 * (a1.unsigned_abs() as u128 * a2.unsigned_abs() as u128);
    let tol = 1e-9 * numeric.re.abs().max(1.0);
    let (value, residual) = reconstruct_rational(numeric.re, max_den, tol).ok_or_else(|| {
        fail(format!(
            "no rational with denominator <= {max_den} near {}",
            numeric.re
        ))
    })?;
    if residual >= FDS_TOLERANCE {
        return Err(fail(format!("residual {residual:e}")));
    }
    Ok(FourierDedekindValue {
        value,
        n,
        a1,
        a2,
        b,
        residual,
        imaginary,
    })
}

/// `¼(1 + 1/p² + 1/q) + (1/12)(p²/q + q/p² + 1/(p²q))`.
pub fn c_constant(p: u64, q: u64) -> Result<ExactRational> {
    if p == 0 || q == 0 {
        return Err(Error::NonPositive {
            name: if p == 0 { "p" } else { "q" },
        });
    }
    let p_sq = BigInt::from(p) * p;
    let q = BigInt::from(q);
    let r = |n: BigInt, d: BigInt| ExactRational::new(n, d);
    let quarter = r(1.into(), 4.into())
        * (ExactRational::one() + r(1.into(), p_sq.clone()) + r(1.into(), q.clone()));
    let twelfth = r(1.into(), 12.into())
        * (r(p_sq.clone(), q.clone()) + r(q.clone(), p_sq.clone()) + r(1.into(), &p_sq * &q));
    Ok(quarter + twelfth)
}

/// `-t·p·q` reduced into `[0, b)`; Fourier–Dedekind sums only see `n mod b`.
fn shift_residue(t: u64, p: u64, q: u64, b: u64) -> i64 {
    let prod = (t as u128 % b as u128) * (p as u128 % b as u128) % b as u128
        * (q as u128 % b as u128)
        % b as u128;
    ((b as u128 - prod) % b as u128) as i64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReciprocityCheck {
    /// `s₀(p², 1; q)`.
    pub lhs: ExactRational,
    /// `-s₀(q, 1; p²) - c_{p,q} + 1`.
    pub rhs: ExactRational,
    pub holds: bool,
}

pub fn reciprocity_check(p: u64, q: u64) -> Result<ReciprocityCheck> {
    let g = p.gcd(&q);
    if g != 1 {
        return Err(Error::NotCoprime {
            a: q as i64,
            b: p,
            gcd: g,
        });
    }
    let p_sq = p * p;
    let lhs = fourier_dedekind(0, p_sq as i64, 1, q)?.value;
    let rhs =
        ExactRational::one() - fourier_dedekind(0, q as i64, 1, p_sq)?.value - c_constant(p, q)?;
    let holds = lhs == rhs;
    Ok(ReciprocityCheck { lhs, rhs, holds })
}

/// Number of lattice points in `tΔ(p, q)` from the Fourier–Dedekind formula,
/// checked to be an integer equal to the census total.
pub fn lattice_count_l(p: u64, q: u64, t: u64) -> Result<BigInt> {
    let tri = TriangleParams::new(p, q, t)?;
    let census = census_floorsum(&tri)?;
    let p_sq = p * p;
    let pb = BigInt::from(p);
    let qb = BigInt::from(q);
    let tb = BigInt::from(t);
    let half = ExactRational::half();
    let quadratic = &half * &ExactRational::from(&qb * &tb * &tb);
    let linear = &half
        * &(ExactRational::from(tb.clone())
            * (ExactRational::from(pb.clone())
                + ExactRational::new(qb.clone(), pb.clone())
                + ExactRational::new(1, pb.clone())));
    let s_big = fourier_dedekind(shift_residue(t, p, q, p_sq), q as i64, 1, p_sq)?.value;
    let s_small = fourier_dedekind(shift_residue(t, p, q, q), p_sq as i64, 1, q)?.value;
    let total = quadratic + linear + c_constant(p, q)? + s_big + s_small;
    let expected = census.total();
    if !total.is_integer() || total.numer() != &expected {
        return Err(Error::FormulaMismatch {
            formula: "L(t)",
            p,
            q,
            t,
            formula_value: total.to_string(),
            census_value: expected.to_string(),
        });
    }
    Ok(expected)
}

/// The five summands of the Fourier–Dedekind expression for `Pick(tΔ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickTerms {
    /// `½qt²`
    pub quadratic: ExactRational,
    /// `½{t/p}`
    pub half_frac_t: ExactRational,
    /// `½{tq/p}`
    pub half_frac_tq: ExactRational,
    /// `s_{-tpq}(q, 1; p²)`
    pub fds_shifted: ExactRational,
    /// `-s₀(q, 1; p²)`
    pub minus_fds_zero: ExactRational,
}

impl PickTerms {
    pub fn total(&self) -> ExactRational {
        self.quadratic.clone()
            + self.half_frac_t.clone()
            + self.half_frac_tq.clone()
            + self.fds_shifted.clone()
            + self.minus_fds_zero.clone()
    }
}

pub fn pick_terms(p: u64, q: u64, t: u64) -> Result<PickTerms> {
    TriangleParams::new(p, q, t)?;
    let g = p.gcd(&q);
    if g != 1 {
        return Err(Error::NotCoprime {
            a: q as i64,
            b: p,
            gcd: g,
        });
    }
    let p_sq = p * p;
    let half = ExactRational::half();
    let tb = BigInt::from(t);
    Ok(PickTerms {
        quadratic: &half * &ExactRational::from(BigInt::from(q) * &tb * &tb),
        half_frac_t: &half * &frac_part(&ExactRational::new(tb.clone(), p)),
        half_frac_tq: &half * &frac_part(&ExactRational::new(&tb * q, p)),
        fds_shifted: fourier_dedekind(shift_residue(t, p, q, p_sq), q as i64, 1, p_sq)?.value,
        minus_fds_zero: -fourier_dedekind(0, q as i64, 1, p_sq)?.value,
    })
}

/// `Pick(tΔ)` from the Fourier–Dedekind expression, checked against the census.
pub fn pick_via_fds(p: u64, q: u64, t: u64) -> Result<HalfInteger> {
    let total = pick_terms(p, q, t)?.total();
    let census = census_floorsum(&TriangleParams::new(p, q, t)?)?;
    let expected = pick_value(&census);
    match HalfInteger::from_rational(&total) {
        Some(h) if h == expected => Ok(h),
        _ => Err(Error::FormulaMismatch {
            formula: "Pick via Fourier-Dedekind sums",
            p,
            q,
            t,
            formula_value: total.to_string(),
            census_value: expected.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::classify;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    /// Oracle: the defining sawtooth sum in exact rationals.
    fn dedekind_oracle(a: i64, b: u64) -> ExactRational {
        use crate::exact::sawtooth_doubled;
        (1..b as i64)
            .map(|k| sawtooth_doubled(&q(k, b as i64)) * sawtooth_doubled(&q(k * a, b as i64)))
            .sum()
    }

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_sum(1, 3).unwrap(), q(1, 18));
        assert_eq!(dedekind_sum(2, 3).unwrap(), q(-1, 18));
        assert_eq!(dedekind_sum(7, 1).unwrap(), ExactRational::zero());
        assert!(matches!(dedekind_sum(4, 6), Err(Error::NotCoprime { .. })));
        for (a, b) in [(5, 7), (-3, 10), (46, 121), (100, 81)] {
            assert_eq!(dedekind_sum(a, b).unwrap(), dedekind_oracle(a, b));
        }
    }

    #[test]
    fn dedekind_reciprocity() {
        for a in 1..=200i64 {
            for b in 1..=200u64 {
                if (a as u64).gcd(&b) != 1 {
                    continue;
                }
                let lhs = dedekind_sum(a, b).unwrap() + dedekind_sum(b as i64, a as u64).unwrap();
                let (ab, bb) = (a as i128, b as i128);
                let rhs = q(-1, 4)
                    + ExactRational::new(1, 12)
                        * (ExactRational::new(ab, bb)
                            + ExactRational::new(bb, ab)
                            + ExactRational::new(1, ab * bb));
                assert_eq!(lhs, rhs, "s({a},{b})");
            }
        }
    }

    #[test]
    fn sikora_examples() {
        let c = sikora_check(5, 4).unwrap();
        assert!(c.equal);
        let c = sikora_check(9, 14).unwrap();
        assert!(c.equal);
        assert!((-24..=-8).contains(&c.lhs));
        let c = sikora_check(11, 46).unwrap();
        assert!(c.equal && c.lhs.abs() <= 10);
    }

    #[test]
    fn weak_criterion_examples() {
        assert!(weak_criterion(9, 22).unwrap().satisfied);
        assert!(!weak_criterion(9, 14).unwrap().satisfied);
        for p in (3..=25).step_by(2) {
            for qq in (2..p * p).step_by(2) {
                if classify(p, qq).map(|c| c.is_member()).unwrap_or(false) {
                    assert!(weak_criterion(p, qq).unwrap().satisfied, "({p},{qq})");
                }
            }
        }
    }

    #[test]
    fn weak_scan_examples() {
        let family: BTreeSet<u64> = (2..81)
            .step_by(2)
            .filter(|&x| classify(9, x).map(|c| c.is_member()).unwrap_or(false))
            .collect();
        let mut expected = family;
        expected.extend([22, 56, 68, 70]);
        assert_eq!(weak_scan(9).unwrap(), expected);
        assert_eq!(weak_scan(3).unwrap(), [2, 4].into());
        let five = weak_scan(5).unwrap();
        assert!(five.contains(&4) && five.contains(&18));
        assert!(weak_scan(4).is_err());
    }

    #[test]
    fn fourier_dedekind_anchors() {
        let v = fourier_dedekind(0, 46, 1, 121).unwrap();
        assert_eq!(v.value, q(2, 11));
        assert!(v.residual < FDS_TOLERANCE);
        assert_eq!(fourier_dedekind(-506, 46, 1, 121).unwrap().value, q(6, 11));
        assert_eq!(
            fourier_dedekind(-1012, 46, 1, 121).unwrap().value,
            q(-1, 11)
        );
        assert_eq!(
            fourier_dedekind(0, 1, 1, 1).unwrap().value,
            ExactRational::zero()
        );
        assert!(fourier_dedekind(0, 11, 1, 121).is_err());
    }

    #[test]
    fn c_constant_examples() {
        assert_eq!(c_constant(1, 2).unwrap(), q(7, 8));
        let c = c_constant(11, 46).unwrap();
        let expected = q(1, 4) * (ExactRational::one() + q(1, 121) + q(1, 46))
            + q(1, 12) * (q(121, 46) + q(46, 121) + q(1, 121 * 46));
        assert_eq!(c, expected);
        assert!(c_constant(0, 3).is_err());
    }

    #[test]
    fn reciprocity_examples() {
        for (p, qq) in [(11, 46), (5, 4), (5, 18), (3, 1), (7, 2)] {
            assert!(reciprocity_check(p, qq).unwrap().holds, "({p},{qq})");
        }
    }

    #[test]
    fn lattice_count_examples() {
        assert_eq!(lattice_count_l(5, 18, 1).unwrap(), BigInt::from(14));
        let census = census_floorsum(&TriangleParams::new(11, 46, 1).unwrap()).unwrap();
        assert_eq!(lattice_count_l(11, 46, 1).unwrap(), census.total());
        let census = census_floorsum(&TriangleParams::new(5, 4, 2).unwrap()).unwrap();
        assert_eq!(lattice_count_l(5, 4, 2).unwrap(), census.total());
    }

    #[test]
    fn pick_via_fds_examples() {
        let terms = pick_terms(11, 46, 1).unwrap();
        assert_eq!(terms.quadratic, ExactRational::from(23));
        assert_eq!(terms.half_frac_t, q(1, 22));
        assert_eq!(terms.half_frac_tq, q(1, 11));
        assert_eq!(terms.fds_shifted, q(6, 11));
        assert_eq!(terms.minus_fds_zero, q(-2, 11));
        assert_eq!(pick_via_fds(11, 46, 1).unwrap().to_string(), "47/2");
        let terms = pick_terms(11, 46, 2).unwrap();
        assert_eq!(
            [
                terms.quadratic,
                terms.half_frac_t,
                terms.half_frac_tq,
                terms.fds_shifted,
                terms.minus_fds_zero
            ],
            [
                ExactRational::from(92),
                q(1, 11),
                q(2, 11),
                q(-1, 11),
                q(-2, 11)
            ]
        );
        assert_eq!(pick_via_fds(11, 46, 2).unwrap().to_string(), "92");
        assert_eq!(pick_via_fds(5, 4, 1).unwrap().to_string(), "5/2");
    }

    #[test]
    fn sin_squared_lemma() {
        for p in 2..=13u64 {
            for qq in 1..p * p {
                if qq.gcd(&p) != 1 {
                    continue;
                }
                for s in 1..p * p {
                    let sum: f64 = (1..p)
                        .map(|r| (PI * ((qq * r * s) % p) as f64 / p as f64).sin().powi(2))
                        .sum();
                    let expected = if s % p == 0 { 0.0 } else { p as f64 / 2.0 };
                    assert!((sum - expected).abs() < 1e-9, "p={p} q={qq} s={s}");
                }
            }
        }
    }
}
