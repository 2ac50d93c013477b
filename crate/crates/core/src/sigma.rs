//! Formula-based evaluation of `σ(p², q, r)`: the continued-fraction
//! ("Eisenstein") sum over the expansion of `p²/q`, and the cotangent sum.
//!
//! With `q₀ = p²`, `q₁ = q`, `q_{i-1} = aᵢ·qᵢ + q_{i+1}`:
//!
//! ```text
//! σ = ½ Σᵢ (-1)ⁱ aᵢ (1 - 4{qᵢr/p}²) - Σᵢ (-1)ⁱ (1 - 4((qᵢr/p))((q_{i-1}r/p)))
//! ```
//!
//! up to a global sign, which is calibrated per pair against the lattice
//! count. `{x}` is [`sawtooth_centered`] and `((x))` is [`sawtooth_doubled`].

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, PairError, Result};
use crate::exact::{sawtooth_centered, sawtooth_doubled, ExactRational};
use crate::families::validate_pair;
use crate::lattice::{sigma_by_count, sigma_count_fast};

/// Positive continued fraction of `p²/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinExpansion {
    /// Partial quotients `a₁..a_k`.
    pub a: Vec<u64>,
    /// Remainders `q₀ = p², q₁ = q, …, q_k`.
    pub q_seq: Vec<u64>,
}

impl EisensteinExpansion {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Requires `gcd(p, q) = 1` and `1 < q < p²`; `q` may be odd.
pub fn expand_eisenstein(p: u64, q: u64) -> Result<EisensteinExpansion> {
    if p > crate::MAX_P {
        return Err(Error::PTooLarge(p));
    }
    let p_sq = p * p;
    if q <= 1 || q >= p_sq {
        return Err(PairError::QOutOfRange { q, p_sq }.into());
    }
    let g = p.gcd(&q);
    if g != 1 {
        return Err(Error::NotCoprime {
            a: q as i64,
            b: p,
            gcd: g,
        });
    }
    let mut a = Vec::new();
    let mut q_seq = vec![p_sq, q];
    let (mut prev, mut cur) = (p_sq, q);
    while cur != 0 {
        let (quot, rem) = prev.div_rem(&cur);
        a.push(quot);
        if rem != 0 {
            q_seq.push(rem);
        }
        prev = cur;
        cur = rem;
    }
    Ok(EisensteinExpansion { a, q_seq })
}

fn alternating(i: usize) -> ExactRational {
    ExactRational::from(if i.is_multiple_of(2) { 1 } else { -1 })
}

/// The continued-fraction sum taken literally in exact rationals, before
/// the global sign is applied.
pub fn sigma_contfrac_raw(exp: &EisensteinExpansion, p: u64, r: u64) -> ExactRational {
    let one = ExactRational::one();
    let four = ExactRational::from(4);
    let arg = |i: usize| ExactRational::new(BigInt::from(exp.q_seq[i]) * r, p);
    let mut first = ExactRational::zero();
    let mut second = ExactRational::zero();
    for i in 1..=exp.len() {
        let x = arg(i);
        let c = sawtooth_centered(&x);
        let a_i = ExactRational::from(BigInt::from(exp.a[i - 1]));
        first = first + alternating(i) * a_i * (&one - &(&four * &(&c * &c)));
        let prod = sawtooth_doubled(&x) * sawtooth_doubled(&arg(i - 1));
        second = second + alternating(i) * (&one - &(&four * &prod));
    }
    first / ExactRational::from(2) - second
}

/// `2p²` times the raw sum, in integers. With `uᵢ = 2·(qᵢr mod p) - p`
/// and `vᵢ = uᵢ` (or `0` when `p | qᵢr`):
/// `Σ (-1)ⁱ aᵢ (p² - uᵢ²) - 2 Σ (-1)ⁱ (p² - vᵢ v_{i-1})`.
/// Every term is bounded by `p⁴`, so `i128` cannot overflow for `p < 2^31`;
/// checked arithmetic still guards it.
fn scaled_raw(a: &[u64], residues: &[u64], p: u64, r: u64) -> Option<i128> {
    let p_i = p as i128;
    let p_sq = p_i * p_i;
    let r_mod = (r % p) as u128;
    let mut total: i128 = 0;
    // q₀ = p² is divisible by p.
    let mut v_prev: i128 = 0;
    for (i, (&a_i, &res)) in a.iter().zip(&residues[1..]).enumerate() {
        let t = ((res as u128 * r_mod) % p as u128) as i128;
        let u = 2 * t - p_i;
        let v = if t == 0 { 0 } else { u };
        let term = (a_i as i128)
            .checked_mul(p_sq - u * u)?
            .checked_sub(2 * (p_sq - v * v_prev))?;
        // i is zero-based here, so (-1)^(i+1).
        total = if i % 2 == 0 {
            total.checked_sub(term)?
        } else {
            total.checked_add(term)?
        };
        v_prev = v;
    }
    Some(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCalibration {
    /// `+1` or `-1`.
    pub global_sign: i8,
    pub calibrated_at_r: u64,
}

/// Evaluates `σ(p², q, ·)` for one pair by the continued-fraction sum, reusing
/// one expansion and one sign calibration.
#[derive(Clone, Debug)]
pub struct SigmaEvaluator {
    p: u64,
    q: u64,
    expansion: EisensteinExpansion,
    residues: Vec<u64>,
    calibration: SignCalibration,
}

impl SigmaEvaluator {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        let expansion = expand_eisenstein(p, q)?;
        Self::with_expansion(p, q, expansion)
    }

    pub fn with_expansion(p: u64, q: u64, expansion: EisensteinExpansion) -> Result<Self> {
        let residues = expansion.q_seq.iter().map(|&x| x % p).collect();
        let mut ev = Self {
            p,
            q,
            expansion,
            residues,
            calibration: SignCalibration {
                global_sign: 1,
                calibrated_at_r: 0,
            },
        };
        ev.calibration = ev.calibrate()?;
        Ok(ev)
    }

    fn calibrate(&self) -> Result<SignCalibration> {
        for r in [1, 2] {
            let count = match sigma_count_fast(self.p, self.q, r) {
                Some(c) => c,
                None => sigma_by_count(self.p, self.q, r)?,
            };
            let raw = self.raw(r)?;
            if raw == 0 {
                continue;
            }
            if raw.abs() != count.abs() as i128 {
                return Err(Error::Calibration {
                    p: self.p,
                    q: self.q,
                    r,
                    raw: raw.to_string(),
                    count,
                });
            }
            let global_sign = if raw == count as i128 { 1 } else { -1 };
            return Ok(SignCalibration {
                global_sign,
                calibrated_at_r: r,
            });
        }
        Err(Error::Calibration {
            p: self.p,
            q: self.q,
            r: 2,
            raw: "0".into(),
            count: sigma_by_count(self.p, self.q, 2)?,
        })
    }

    /// Raw (uncalibrated) value as an exact integer.
    fn raw(&self, r: u64) -> Result<i128> {
        let p = self.p as i128;
        let scale = 2 * p * p;
        match scaled_raw(&self.expansion.a, &self.residues, self.p, r) {
            Some(total) if total % scale == 0 => Ok(total / scale),
            Some(total) => Err(Error::NonIntegral {
                p: self.p,
                q: self.q,
                r,
                value: ExactRational::new(total, scale).to_string(),
            }),
            None => {
                let exact = sigma_contfrac_raw(&self.expansion, self.p, r);
                exact
                    .to_i64()
                    .map(i128::from)
                    .ok_or_else(|| Error::NonIntegral {
                        p: self.p,
                        q: self.q,
                        r,
                        value: exact.to_string(),
                    })
            }
        }
    }

    /// Calibrated `σ(p², q, r)`; errors unless the value is an odd integer.
    /// For `p | r` the triangle is a lattice triangle and σ is 1.
    pub fn sigma(&self, r: u64) -> Result<i64> {
        if r.is_multiple_of(self.p) {
            return Ok(1);
        }
        let value = self.calibration.global_sign as i128 * self.raw(r)?;
        if value % 2 == 0 {
            return Err(Error::NonIntegral {
                p: self.p,
                q: self.q,
                r,
                value: value.to_string(),
            });
        }
        Ok(value as i64)
    }

    pub fn calibration(&self) -> SignCalibration {
        self.calibration
    }

    pub fn expansion(&self) -> &EisensteinExpansion {
        &self.expansion
    }
}

/// Sign making the continued-fraction sum agree with the lattice count.
/// Fails loudly when the magnitudes disagree.
pub fn calibrate_sign(p: u64, q: u64) -> Result<SignCalibration> {
    if p < 3 {
        return Err(PairError::PTooSmall(p).into());
    }
    Ok(SigmaEvaluator::new(p, q)?.calibration())
}

/// `cal.global_sign · raw`, checked to be an odd integer; 1 when `p | r`.
pub fn sigma_contfrac(
    p: u64,
    q: u64,
    r: u64,
    cal: &SignCalibration,
    exp: &EisensteinExpansion,
) -> Result<i64> {
    if r.is_multiple_of(p) {
        return Ok(1);
    }
    let raw = sigma_contfrac_raw(exp, p, r);
    let value = ExactRational::from(cal.global_sign as i64) * raw;
    match value.to_i64() {
        Some(v) if v % 2 != 0 => Ok(v),
        _ => Err(Error::NonIntegral {
            p,
            q,
            r,
            value: value.to_string(),
        }),
    }
}

/// Precomputed cotangent-sum weights for one `(p, q)`.
///
/// `σ(p², q, r) = -(2/p²) Σ_{s=1}^{p²-1} cot(πs/p²) cot(πqs/p²) sin²(πqrs/p)`;
/// `r` enters only through `qs mod p`, so the weights are bucketed by that
/// residue and each `r` costs `O(p)`.
#[derive(Clone, Debug)]
pub struct CotangentKernel {
    p: u64,
    buckets: Vec<f64>,
    sin_sq: Vec<f64>,
}

impl CotangentKernel {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::NonPositive { name: "p" });
        }
        let g = p.gcd(&q);
        if g != 1 {
            return Err(Error::NotCoprime {
                a: q as i64,
                b: p,
                gcd: g,
            });
        }
        let p_sq = p * p;
        let n = p_sq as f64;
        let cot = |k: u64| 1.0 / (PI * k as f64 / n).tan();
        let mut buckets = vec![0.0; p as usize];
        for s in 1..p_sq {
            let qs = ((q as u128 * s as u128) % p_sq as u128) as u64;
            buckets[(qs % p) as usize] += cot(s) * cot(qs);
        }
        let sin_sq = (0..p)
            .map(|j| (PI * j as f64 / p as f64).sin().powi(2))
            .collect();
        Ok(Self { p, buckets, sin_sq })
    }

    /// The sum vanishes for `p | r`, where σ is 1.
    pub fn sigma(&self, r: u64) -> f64 {
        let p = self.p;
        let r = r % p;
        if r == 0 {
            return 1.0;
        }
        let sum: f64 = self
            .buckets
            .iter()
            .enumerate()
            .map(|(c, w)| w * self.sin_sq[((c as u64 * r) % p) as usize])
            .sum();
        -2.0 / (p as f64 * p as f64) * sum
    }
}

/// Double-precision cotangent sum; `O(p²)`, meant for cross-checks at small `p`.
pub fn sigma_cotangent(p: u64, q: u64, r: u64) -> Result<f64> {
    Ok(CotangentKernel::new(p, q)?.sigma(r))
}

/// Nearest odd integer; errors if `x` is more than `1e-2` away from it.
pub fn round_to_odd(x: f64) -> Result<i64> {
    let n = 2.0 * ((x - 1.0) / 2.0).round() + 1.0;
    let distance = (x - n).abs();
    if !distance.is_finite() || distance > 1e-2 {
        return Err(Error::CotangentRounding { value: x, distance });
    }
    Ok(n as i64)
}

/// `I(p, q)` together with every `σ(p², q, r)`, `r = 1..p-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaSpectrum {
    pub values: BTreeSet<i64>,
    /// `per_r[r - 1] = σ(p², q, r)`.
    pub per_r: Vec<i64>,
}

impl SigmaSpectrum {
    pub fn sum(&self) -> i64 {
        self.per_r.iter().sum()
    }

    pub fn within_unit(&self) -> bool {
        self.values.iter().all(|v| *v == 1 || *v == -1)
    }
}

impl SigmaEvaluator {
    /// Evaluates `r = 1..=(p-1)/2` and mirrors by `σ(r) = σ(p-r)`.
    pub fn spectrum(&self) -> Result<SigmaSpectrum> {
        let p = self.p as usize;
        let mut per_r = vec![0i64; p - 1];
        for r in 1..=(p - 1) / 2 {
            let s = self.sigma(r as u64)?;
            per_r[r - 1] = s;
            per_r[p - r - 1] = s;
        }
        let values = per_r.iter().copied().collect();
        Ok(SigmaSpectrum { values, per_r })
    }
}

pub fn spectrum(p: u64, q: u64) -> Result<SigmaSpectrum> {
    validate_pair(p, q)?;
    SigmaEvaluator::new(p, q)?.spectrum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_examples() {
        let e = expand_eisenstein(5, 4).unwrap();
        assert_eq!(e.a, vec![6, 4]);
        assert_eq!(e.q_seq, vec![25, 4, 1]);
        let e = expand_eisenstein(9, 14).unwrap();
        assert_eq!(e.a, vec![5, 1, 3, 1, 2]);
        assert_eq!(e.q_seq, vec![81, 14, 11, 3, 2, 1]);
        // 121 = 2·46 + 29, 46 = 29 + 17, 29 = 17 + 12, 17 = 12 + 5,
        // 12 = 2·5 + 2, 5 = 2·2 + 1, 2 = 2·1.
        let e = expand_eisenstein(11, 46).unwrap();
        assert_eq!(e.a, vec![2, 1, 1, 1, 2, 2, 2]);
        assert_eq!(e.q_seq, vec![121, 46, 29, 17, 12, 5, 2, 1]);
        assert!(matches!(
            expand_eisenstein(5, 10),
            Err(Error::NotCoprime { .. })
        ));
        assert!(expand_eisenstein(5, 25).is_err());
    }

    #[test]
    fn recurrence_invariant() {
        for (p, q) in [(5, 4), (9, 14), (11, 46), (31, 500), (101, 7776)] {
            let e = expand_eisenstein(p, q).unwrap();
            assert_eq!(e.q_seq[0], p * p);
            assert_eq!(e.q_seq[1], q);
            assert_eq!(*e.q_seq.last().unwrap(), 1);
            for i in 1..=e.len() {
                let next = e.q_seq.get(i + 1).copied().unwrap_or(0);
                assert_eq!(e.q_seq[i - 1], e.a[i - 1] * e.q_seq[i] + next);
                assert!(next < e.q_seq[i]);
            }
        }
    }

    #[test]
    fn raw_examples() {
        let raw = |p, q, r| sigma_contfrac_raw(&expand_eisenstein(p, q).unwrap(), p, r);
        assert_eq!(raw(5, 4, 1).abs(), ExactRational::one());
        assert_eq!(raw(11, 46, 2).abs(), ExactRational::one());
        for r in 1..9 {
            let v = raw(9, 14, r).to_i64().unwrap().abs();
            assert!(v == 1 || v == 3);
            assert_eq!(v, sigma_by_count(9, 14, r).unwrap().abs());
        }
    }

    #[test]
    fn calibration_examples() {
        for (p, q, r1) in [(5, 4, -1), (5, 18, 1), (11, 46, -1)] {
            let cal = calibrate_sign(p, q).unwrap();
            assert_eq!(cal.calibrated_at_r, 1);
            let raw = sigma_contfrac_raw(&expand_eisenstein(p, q).unwrap(), p, 1);
            assert_eq!(
                ExactRational::from(cal.global_sign as i64) * raw,
                ExactRational::from(r1)
            );
        }
    }

    #[test]
    fn contfrac_examples() {
        let eval = |p, q, r| {
            let exp = expand_eisenstein(p, q).unwrap();
            let cal = calibrate_sign(p, q).unwrap();
            sigma_contfrac(p, q, r, &cal, &exp).unwrap()
        };
        assert_eq!(eval(5, 4, 1), -1);
        assert_eq!(eval(11, 46, 2), 1);
        assert_eq!(eval(9, 22, 4), 3);
    }

    #[test]
    fn fast_path_matches_literal() {
        for p in (3..=25).step_by(2) {
            for q in 2..p * p {
                let Ok(ev) = SigmaEvaluator::new(p, q) else {
                    continue;
                };
                let cal = ev.calibration();
                for r in 1..2 * p {
                    let literal = sigma_contfrac(p, q, r, &cal, ev.expansion());
                    assert_eq!(ev.sigma(r).unwrap(), literal.unwrap(), "({p},{q},{r})");
                }
            }
        }
    }

    #[test]
    fn cotangent_examples() {
        assert!((sigma_cotangent(5, 18, 1).unwrap() - 1.0).abs() < 1e-6);
        assert!((sigma_cotangent(5, 4, 1).unwrap() + 1.0).abs() < 1e-6);
        let k = CotangentKernel::new(9, 14).unwrap();
        for r in 1..9 {
            assert!((k.sigma(r) - sigma_by_count(9, 14, r).unwrap() as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to_odd(0.9999).unwrap(), 1);
        assert_eq!(round_to_odd(-3.001).unwrap(), -3);
        assert_eq!(round_to_odd(-0.995).unwrap(), -1);
        assert!(round_to_odd(2.0).is_err());
        assert!(round_to_odd(1.05).is_err());
        assert!(round_to_odd(f64::NAN).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(11, 46).unwrap();
        assert!(s.within_unit());
        assert_eq!(spectrum(9, 14).unwrap().values, [-3, -1].into());
        let s = spectrum(5, 4).unwrap();
        let by_count: BTreeSet<i64> = (1..5).map(|r| sigma_by_count(5, 4, r).unwrap()).collect();
        assert_eq!(s.values, by_count);
        assert!(s.values == [-1].into() || s.values == [-1, 1].into());
        assert_eq!(s.per_r.len(), 4);
        assert!(spectrum(9, 15).is_err());
    }
}
