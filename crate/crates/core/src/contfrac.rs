//! Signed continued fractions and the parameterized words whose values
//! `p²/q` give family members.
//!
//! Nesting is `[c₁, …, c_n] = c₁ + 1/(c₂ + 1/(⋯ + 1/c_n))`.
//! Membership is decided by generating words over a bounded parameter grid
//! and normalizing their values, never by recognizing the form of a given
//! fraction.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactRational;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedCF {
    entries: Vec<i64>,
}

impl SignedCF {
    /// Rejects empty words and zero entries.
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Arity {
                kind: "signed continued fraction",
                expected: "at least 1",
                got: 0,
            });
        }
        if let Some(position) = entries.iter().position(|&c| c == 0) {
            return Err(Error::ZeroEntry {
                position: position + 1,
            });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }
}

impl fmt::Display for SignedCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for SignedCF {
    type Err = Error;

    /// Comma-separated signed integers, optionally bracketed: `6,-4,-2,2`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let entries = body
            .split(',')
            .map(|t| {
                t.trim().parse::<i64>().map_err(|_| Error::Parse {
                    what: "continued fraction word",
                    input: s.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

/// Exact value of the word; errors on a zero denominator while nesting.
pub fn eval_signed_cf(cf: &SignedCF) -> Result<ExactRational> {
    let entries = cf.entries();
    let n = entries.len();
    let mut x = ExactRational::from(entries[n - 1]);
    for (idx, &c) in entries[..n - 1].iter().enumerate().rev() {
        let inv = x
            .recip()
            .ok_or(Error::ZeroDenominator { position: idx + 2 })?;
        x = ExactRational::from(c) + inv;
    }
    Ok(x)
}

/// `i128` evaluation for the generator's hot loop; `None` on overflow or a
/// zero denominator.
fn eval_fast(entries: &[i64]) -> Option<(i128, i128)> {
    let n = entries.len();
    let (mut num, mut den) = (entries[n - 1] as i128, 1i128);
    for &c in entries[..n - 1].iter().rev() {
        if num == 0 {
            return None;
        }
        // c + den/num
        let new_num = (c as i128).checked_mul(num)?.checked_add(den)?;
        den = num;
        num = new_num;
    }
    if den < 0 {
        num = -num;
        den = -den;
    }
    let g = num.gcd(&den);
    Some((num / g, den / g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Transform {
    Negate,
    Reverse,
}

pub fn transform_word(cf: &SignedCF, op: Transform) -> SignedCF {
    let entries = match op {
        Transform::Negate => cf.entries.iter().map(|c| -c).collect(),
        Transform::Reverse => cf.entries.iter().rev().copied().collect(),
    };
    SignedCF { entries }
}

/// One of the four words reachable by negation and reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    Identity,
    Negate,
    Reverse,
    NegateReverse,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Identity,
        Variant::Negate,
        Variant::Reverse,
        Variant::NegateReverse,
    ];

    pub fn apply(self, cf: &SignedCF) -> SignedCF {
        match self {
            Variant::Identity => cf.clone(),
            Variant::Negate => transform_word(cf, Transform::Negate),
            Variant::Reverse => transform_word(cf, Transform::Reverse),
            Variant::NegateReverse => {
                transform_word(&transform_word(cf, Transform::Reverse), Transform::Negate)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FormKind {
    /// `[a₁..a_k, ±1, -a_k..-a₁]`, `aᵢ > 0`.
    CgPalindrome,
    /// `[2a, 2, 2b, -2, -2a, 2b]`.
    CgEvenA,
    /// `[2a, 2, 2b, 2a, 2, 2b]`.
    CgEvenB,
    C1,
    C2,
    C3,
    C4,
    C5,
    /// `[6, -4, -2, 2]`.
    Sporadic,
}

impl FormKind {
    pub const CG: [FormKind; 3] = [FormKind::CgPalindrome, FormKind::CgEvenA, FormKind::CgEvenB];
    pub const MINUS_THREE_ONE: [FormKind; 6] = [
        FormKind::C1,
        FormKind::C2,
        FormKind::C3,
        FormKind::C4,
        FormKind::C5,
        FormKind::Sporadic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormKind::CgPalindrome => "cg-palindrome",
            FormKind::CgEvenA => "cg-even-a",
            FormKind::CgEvenB => "cg-even-b",
            FormKind::C1 => "c1",
            FormKind::C2 => "c2",
            FormKind::C3 => "c3",
            FormKind::C4 => "c4",
            FormKind::C5 => "c5",
            FormKind::Sporadic => "sporadic",
        }
    }

    pub fn is_cg(self) -> bool {
        Self::CG.contains(&self)
    }

    /// Negation/reversal variants applied when generating pairs.
    ///
    /// Casson–Gordon words use all four. For the `{-3,-1}` words, a lone
    /// reversal of an even-length word sends `q` to `q'` with
    /// `q·q' ≡ -1 (mod p²)`, which negates σ; those variants land in the
    /// mirror `{1,3}` families and are left out here.
    pub fn default_variants(self) -> &'static [Variant] {
        if self.is_cg() {
            &Variant::ALL
        } else {
            &[Variant::Identity, Variant::NegateReverse]
        }
    }

    /// Parses a single kind, or the groups `cg` and `c` (C1–C5 and sporadic).
    pub fn parse_list(s: &str) -> Result<Vec<FormKind>> {
        let mut out = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token.to_ascii_lowercase().as_str() {
                "cg" => out.extend(Self::CG),
                "c" => out.extend(Self::MINUS_THREE_ONE),
                other => out.push(other.parse()?),
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for FormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [Self::CG.as_slice(), Self::MINUS_THREE_ONE.as_slice()].concat();
        all.into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse {
                what: "form kind",
                input: s.to_string(),
            })
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FormFamily {
    pub kind: FormKind,
    /// Palindrome: `a₁..a_k` followed by the middle sign. Even forms: `a, b`.
    /// C1–C5: `a`. Sporadic: none.
    pub params: Vec<i64>,
}

impl FormFamily {
    pub fn new(kind: FormKind, params: Vec<i64>) -> Self {
        Self { kind, params }
    }
}

impl fmt::Display for FormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind)?;
        for (i, v) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

fn arity(kind: FormKind, expected: &'static str, got: usize) -> Error {
    Error::Arity {
        kind: kind.name(),
        expected,
        got,
    }
}

fn constraint(kind: FormKind, value: i64, constraint: &'static str) -> Error {
    Error::Parameter {
        kind: kind.name(),
        value,
        constraint,
    }
}

/// The literal word of a parameterized family.
pub fn word_for(family: &FormFamily) -> Result<SignedCF> {
    let kind = family.kind;
    let ps = &family.params;
    let one = |ps: &[i64]| -> Result<i64> {
        match ps {
            [a] if *a > 0 => Ok(*a),
            [a] => Err(constraint(kind, *a, "a > 0")),
            _ => Err(arity(kind, "1", ps.len())),
        }
    };
    let two = |ps: &[i64]| -> Result<(i64, i64)> {
        match ps {
            [a, b] => {
                for v in [*a, *b] {
                    if v == 0 {
                        return Err(constraint(kind, v, "a, b != 0"));
                    }
                }
                Ok((*a, *b))
            }
            _ => Err(arity(kind, "2", ps.len())),
        }
    };
    let entries = match kind {
        FormKind::CgPalindrome => {
            let Some((&s, prefix)) = ps.split_last() else {
                return Err(arity(kind, "k >= 1 entries plus a middle sign", 0));
            };
            if prefix.is_empty() {
                return Err(arity(kind, "k >= 1 entries plus a middle sign", ps.len()));
            }
            if s != 1 && s != -1 {
                return Err(constraint(kind, s, "middle entry is +1 or -1"));
            }
            if let Some(&bad) = prefix.iter().find(|&&a| a <= 0) {
                return Err(constraint(kind, bad, "a_i > 0"));
            }
            let mut w = prefix.to_vec();
            w.push(s);
            w.extend(prefix.iter().rev().map(|a| -a));
            w
        }
        FormKind::CgEvenA => {
            let (a, b) = two(ps)?;
            vec![2 * a, 2, 2 * b, -2, -2 * a, 2 * b]
        }
        FormKind::CgEvenB => {
            let (a, b) = two(ps)?;
            vec![2 * a, 2, 2 * b, 2 * a, 2, 2 * b]
        }
        FormKind::C1 => {
            let a = one(ps)?;
            vec![2 * a, -8, -2 * a, 2]
        }
        FormKind::C2 => {
            let a = one(ps)?;
            vec![2, 2 * a, -2, 2, -2 * a, -6]
        }
        FormKind::C3 => {
            let a = one(ps)?;
            vec![6, 2 * a, -2, 2, 2 * a, -2]
        }
        FormKind::C4 => {
            let a = one(ps)?;
            vec![2 * a, 2, -2, 2, -2, 2, -2, 2, -2 * a - 2, 2]
        }
        FormKind::C5 => {
            let a = one(ps)?;
            vec![2 * a, 2, -2, 2, -2, 2 * a + 2, -2, 2, -2, 2]
        }
        FormKind::Sporadic => {
            if !ps.is_empty() {
                return Err(arity(kind, "0", ps.len()));
            }
            vec![6, -4, -2, 2]
        }
    };
    SignedCF::new(entries)
}

/// `(p, q)` when `x = p²/q` in lowest terms with `p` odd, `q` even,
/// `1 < q < p²` and `gcd(p, q) = 1`.
pub fn fraction_to_pair(x: &ExactRational) -> Option<(u64, u64)> {
    let (n, d) = (x.numer(), x.denom());
    if !n.is_positive() {
        return None;
    }
    let p = n.sqrt();
    if &(&p * &p) != n {
        return None;
    }
    pair_from_parts(p.to_u64()?, d.to_u64()?)
}

fn pair_from_parts(p: u64, d: u64) -> Option<(u64, u64)> {
    if p > crate::MAX_P || p.is_multiple_of(2) || d % 2 == 1 || d <= 1 || d >= p * p {
        return None;
    }
    (p.gcd(&d) == 1).then_some((p, d))
}

fn fast_pair(num: i128, den: i128) -> Option<(u64, u64)> {
    if num <= 0 || den > u64::MAX as i128 {
        return None;
    }
    let p = (num as u128).sqrt();
    if p * p != num as u128 || p > u64::MAX as u128 {
        return None;
    }
    pair_from_parts(p as u64, den as u64)
}

/// Parameter grid for [`generate_form_hits`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepBounds {
    /// Keep pairs with `p ≤ p_max`.
    pub p_max: u64,
    /// `|parameter| ≤ param_max`; palindrome entries `≤ param_max`.
    pub param_max: i64,
    /// Longest palindrome prefix `a₁..a_k`.
    pub prefix_len_max: usize,
    /// Overrides [`FormKind::default_variants`] when set.
    pub variants: Option<Vec<Variant>>,
}

impl SweepBounds {
    pub fn new(p_max: u64) -> Self {
        Self {
            p_max,
            param_max: p_max.min(i64::MAX as u64) as i64,
            prefix_len_max: 4,
            variants: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FormHit {
    pub p: u64,
    pub q: u64,
    pub family: FormFamily,
    pub variant: Variant,
}

/// Continuant `K(a₁..a_k)`, the numerator of `[a₁..a_k]`.
fn continuant(prefix: &[i64]) -> i128 {
    let (mut prev, mut cur) = (1i128, 0i128);
    for (i, &a) in prefix.iter().enumerate() {
        let next = if i == 0 {
            a as i128
        } else {
            a as i128 * cur + prev
        };
        if i > 0 {
            prev = cur;
        }
        cur = next;
    }
    cur
}

/// Palindrome prefixes with positive entries and `K(prefix) ≤ bound`.
/// The numerator of `[a₁..a_k, ±1, -a_k..-a₁]` is `K(a₁..a_k)²`, so this
/// bounds `p` exactly.
fn palindrome_prefixes(bound: i128, entry_max: i64, len_max: usize) -> Vec<Vec<i64>> {
    fn walk(
        prefix: &mut Vec<i64>,
        bound: i128,
        entry_max: i64,
        len_max: usize,
        out: &mut Vec<Vec<i64>>,
    ) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == len_max {
            return;
        }
        for a in 1..=entry_max {
            prefix.push(a);
            // The continuant is increasing in every entry.
            if continuant(prefix) > bound {
                prefix.pop();
                break;
            }
            walk(prefix, bound, entry_max, len_max, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    walk(&mut Vec::new(), bound, entry_max, len_max, &mut out);
    out
}

fn families_for(kind: FormKind, bounds: &SweepBounds) -> Vec<FormFamily> {
    let m = bounds.param_max.max(0);
    let nonzero = || (-m..=m).filter(|v| *v != 0);
    match kind {
        FormKind::CgPalindrome => {
            palindrome_prefixes(bounds.p_max as i128, m, bounds.prefix_len_max)
                .into_iter()
                .flat_map(|prefix| {
                    [1, -1].into_iter().map(move |s| {
                        let mut params = prefix.clone();
                        params.push(s);
                        FormFamily::new(kind, params)
                    })
                })
                .collect()
        }
        FormKind::CgEvenA | FormKind::CgEvenB => nonzero()
            .flat_map(|a| nonzero().map(move |b| FormFamily::new(kind, vec![a, b])))
            .collect(),
        FormKind::Sporadic => vec![FormFamily::new(kind, vec![])],
        _ => (1..=m).map(|a| FormFamily::new(kind, vec![a])).collect(),
    }
}

fn hits_for_word(family: &FormFamily, variants: &[Variant], p_max: u64, out: &mut Vec<FormHit>) {
    let Ok(word) = word_for(family) else { return };
    for &variant in variants {
        let w = variant.apply(&word);
        let pair = match eval_fast(w.entries()) {
            Some((num, den)) => fast_pair(num, den),
            None => eval_signed_cf(&w).ok().and_then(|x| fraction_to_pair(&x)),
        };
        if let Some((p, q)) = pair {
            if p <= p_max {
                out.push(FormHit {
                    p,
                    q,
                    family: family.clone(),
                    variant,
                });
            }
        }
    }
}

/// Every word of the given kinds within `bounds`, under each kind's variants,
/// whose value normalizes to a valid pair with `p ≤ p_max`. Sorted.
pub fn generate_form_hits(kinds: &[FormKind], bounds: &SweepBounds) -> Vec<FormHit> {
    let mut out = Vec::new();
    for &kind in kinds {
        let variants = bounds
            .variants
            .as_deref()
            .unwrap_or_else(|| kind.default_variants());
        for family in families_for(kind, bounds) {
            hits_for_word(&family, variants, bounds.p_max, &mut out);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Pairs generated by [`generate_form_hits`] with default bounds for `p_max`.
pub fn generate_form_pairs(kinds: &[FormKind], p_max: u64) -> BTreeSet<(u64, u64)> {
    generate_form_hits(kinds, &SweepBounds::new(p_max))
        .into_iter()
        .map(|h| (h.p, h.q))
        .collect()
}

/// `[a₁..a_k]` evaluated back to `p²/q`.
pub fn positive_word(a: &[u64]) -> Result<SignedCF> {
    SignedCF::new(
        a.iter()
            .map(|&x| {
                i64::try_from(x).map_err(|_| Error::Parse {
                    what: "partial quotient",
                    input: x.to_string(),
                })
            })
            .collect::<Result<_>>()?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::classify;
    use crate::sigma::{expand_eisenstein, spectrum};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn cf(v: &[i64]) -> SignedCF {
        SignedCF::new(v.to_vec()).unwrap()
    }

    fn fam(kind: FormKind, params: &[i64]) -> FormFamily {
        FormFamily::new(kind, params.to_vec())
    }

    #[test]
    fn eval_examples() {
        assert_eq!(
            eval_signed_cf(&cf(&[5, 1, -5])).unwrap(),
            ExactRational::new(25, 4)
        );
        assert_eq!(
            eval_signed_cf(&cf(&[6, -4, -2, 2])).unwrap(),
            ExactRational::new(81, 14)
        );
        assert_eq!(
            eval_signed_cf(&cf(&[2, 2, 2, -2, -2, 2])).unwrap(),
            ExactRational::new(81, 34)
        );
        assert!(matches!(
            eval_signed_cf(&cf(&[1, 1, -1])),
            Err(Error::ZeroDenominator { position: 2 })
        ));
        assert!(matches!(
            SignedCF::new(vec![1, 0]),
            Err(Error::ZeroEntry { position: 2 })
        ));
        assert!(SignedCF::new(vec![]).is_err());
    }

    #[test]
    fn word_examples() {
        assert_eq!(
            word_for(&fam(FormKind::C1, &[1])).unwrap(),
            cf(&[2, -8, -2, 2])
        );
        assert_eq!(
            word_for(&fam(FormKind::CgPalindrome, &[5, 1])).unwrap(),
            cf(&[5, 1, -5])
        );
        assert_eq!(
            word_for(&fam(FormKind::Sporadic, &[])).unwrap(),
            cf(&[6, -4, -2, 2])
        );
        assert_eq!(
            word_for(&fam(FormKind::CgEvenA, &[1, 1])).unwrap(),
            cf(&[2, 2, 2, -2, -2, 2])
        );
        assert_eq!(
            word_for(&fam(FormKind::C4, &[1])).unwrap(),
            cf(&[2, 2, -2, 2, -2, 2, -2, 2, -4, 2])
        );
        assert_eq!(
            word_for(&fam(FormKind::C5, &[1])).unwrap(),
            cf(&[2, 2, -2, 2, -2, 4, -2, 2, -2, 2])
        );
        assert!(matches!(
            word_for(&fam(FormKind::C1, &[1, 2])),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            word_for(&fam(FormKind::Sporadic, &[1])),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            word_for(&fam(FormKind::C3, &[0])),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            word_for(&fam(FormKind::CgEvenB, &[1, 0])),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            word_for(&fam(FormKind::CgPalindrome, &[3, 2])),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            word_for(&fam(FormKind::CgPalindrome, &[1])),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn fraction_to_pair_examples() {
        assert_eq!(fraction_to_pair(&ExactRational::new(25, 4)), Some((5, 4)));
        assert_eq!(fraction_to_pair(&ExactRational::new(81, 14)), Some((9, 14)));
        assert_eq!(fraction_to_pair(&ExactRational::new(7, 3)), None);
        assert_eq!(fraction_to_pair(&ExactRational::new(-81, 14)), None);
        assert_eq!(fraction_to_pair(&ExactRational::new(49, 3)), None);
        assert_eq!(fraction_to_pair(&ExactRational::new(36, 5)), None);
        assert_eq!(fraction_to_pair(&ExactRational::new(25, 26)), None);
    }

    #[test]
    fn transform_examples() {
        assert_eq!(
            transform_word(&cf(&[5, 1, -5]), Transform::Negate),
            cf(&[-5, -1, 5])
        );
        assert_eq!(
            transform_word(&cf(&[6, -4, -2, 2]), Transform::Reverse),
            cf(&[2, -2, -4, 6])
        );
        assert_eq!(
            Variant::NegateReverse.apply(&cf(&[2, 2, 2, -2, -2, 2])),
            cf(&[-2, 2, 2, -2, -2, -2])
        );
    }

    #[test]
    fn generate_examples() {
        let cg = generate_form_pairs(&FormKind::CG, 9);
        assert!(cg.contains(&(5, 4)) && cg.contains(&(9, 34)));
        assert_eq!(
            generate_form_pairs(&[FormKind::Sporadic], 9),
            [(9, 14)].into()
        );
        for (p, q) in generate_form_pairs(&[FormKind::C1], 40) {
            assert_eq!(spectrum(p, q).unwrap().values, [-3, -1].into(), "({p},{q})");
        }
    }

    #[test]
    fn mirror_variants_give_one_three() {
        let bounds = SweepBounds {
            variants: Some(vec![Variant::Reverse]),
            ..SweepBounds::new(9)
        };
        let hits = generate_form_hits(&[FormKind::Sporadic], &bounds);
        assert_eq!(hits.len(), 1);
        assert_eq!((hits[0].p, hits[0].q), (9, 52));
        assert_eq!(spectrum(9, 52).unwrap().values, [1, 3].into());
    }

    #[test]
    fn palindrome_numerator_is_continuant_squared() {
        // Exhaustive over prefixes of length <= 4 with entries <= 5, no pruning.
        for len in 1..=4u32 {
            for code in 0..5i64.pow(len) {
                let mut prefix = Vec::new();
                let mut c = code;
                for _ in 0..len {
                    prefix.push(c % 5 + 1);
                    c /= 5;
                }
                for s in [1, -1] {
                    let mut params = prefix.clone();
                    params.push(s);
                    let w = word_for(&fam(FormKind::CgPalindrome, &params)).unwrap();
                    let Ok(x) = eval_signed_cf(&w) else { continue };
                    let k = BigInt::from(continuant(&prefix));
                    assert_eq!(x.numer().abs(), &k * &k, "{w}");
                }
            }
        }
    }

    #[test]
    fn positive_word_inverts_expansion() {
        for (p, q) in [(5, 4), (9, 14), (11, 46), (13, 60), (21, 100)] {
            let e = expand_eisenstein(p, q).unwrap();
            let x = eval_signed_cf(&positive_word(&e.a).unwrap()).unwrap();
            assert_eq!(x, ExactRational::new(p * p, q));
        }
    }

    #[test]
    fn cg_generated_pairs_classify_small() {
        for (p, q) in generate_form_pairs(&FormKind::CG, 31) {
            assert!(classify(p, q).unwrap().is_member(), "({p},{q})");
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(FormKind::parse_list("cg").unwrap(), FormKind::CG.to_vec());
        assert_eq!(FormKind::parse_list("c").unwrap().len(), 6);
        assert_eq!(
            FormKind::parse_list("C1, sporadic").unwrap(),
            vec![FormKind::C1, FormKind::Sporadic]
        );
        assert!(FormKind::parse_list("c9").is_err());
        assert_eq!(
            "6,-4,-2,2".parse::<SignedCF>().unwrap(),
            cf(&[6, -4, -2, 2])
        );
        assert_eq!("[5, 1, -5]".parse::<SignedCF>().unwrap(), cf(&[5, 1, -5]));
        assert!("6,,2".parse::<SignedCF>().is_err());
    }

    fn word() -> impl Strategy<Value = SignedCF> {
        prop::collection::vec((1i64..20, any::<bool>()), 1..8).prop_map(|v| {
            cf(&v
                .into_iter()
                .map(|(c, neg)| if neg { -c } else { c })
                .collect::<Vec<_>>())
        })
    }

    proptest! {
        #[test]
        fn transforms_are_involutions(w in word()) {
            for op in [Transform::Negate, Transform::Reverse] {
                prop_assert_eq!(transform_word(&transform_word(&w, op), op), w.clone());
            }
        }

        #[test]
        fn negation_negates_value(w in word()) {
            if let Ok(x) = eval_signed_cf(&w) {
                let y = eval_signed_cf(&transform_word(&w, Transform::Negate)).unwrap();
                prop_assert_eq!(y, -x);
            }
        }

        #[test]
        fn fast_eval_agrees_with_exact(w in word()) {
            match (eval_fast(w.entries()), eval_signed_cf(&w)) {
                (Some((n, d)), Ok(x)) => prop_assert_eq!(ExactRational::new(n, d), x),
                (None, Err(_)) => {}
                (fast, exact) => prop_assert!(false, "fast {:?} vs exact {:?}", fast, exact),
            }
        }
    }
}
