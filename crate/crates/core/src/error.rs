use std::path::PathBuf;

use thiserror::Error;

/// A violated hypothesis on a `(p, q)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("p = {0} must be odd")]
    PNotOdd(u64),
    #[error("p = {0} must be at least 3")]
    PTooSmall(u64),
    #[error("p = {0} exceeds the supported maximum {max}", max = crate::MAX_P)]
    PTooLarge(u64),
    #[error("q = {0} must be even")]
    QNotEven(u64),
    #[error("q = {q} must satisfy 1 < q < p^2 = {p_sq}")]
    QOutOfRange { q: u64, p_sq: u64 },
    #[error("gcd(p, q) = gcd({p}, {q}) = {gcd}, expected 1")]
    NotCoprime { p: u64, q: u64, gcd: u64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pair: {0}")]
    Pair(#[from] PairError),

    #[error("{name} must be positive")]
    NonPositive { name: &'static str },

    #[error("p = {0} exceeds the supported maximum {max}", max = crate::MAX_P)]
    PTooLarge(u64),

    #[error("gcd({a}, {b}) = {gcd}, expected 1")]
    NotCoprime { a: i64, b: u64, gcd: u64 },

    #[error("q = {q} has no reduction 2kp^2 ± q' with 1 < q' < p^2 (q ≡ 0 mod 2p^2)")]
    NoReduction { q: u64 },

    #[error("zero denominator while nesting the continued fraction at entry {position}")]
    ZeroDenominator { position: usize },

    #[error("continued fraction entry {position} is zero")]
    ZeroEntry { position: usize },

    #[error("{kind} expects {expected} parameter(s), got {got}")]
    Arity {
        kind: &'static str,
        expected: &'static str,
        got: usize,
    },

    #[error("{kind} parameter {value} violates its constraint ({constraint})")]
    Parameter {
        kind: &'static str,
        value: i64,
        constraint: &'static str,
    },

    #[error(
        "continued-fraction evaluation of sigma({p}^2, {q}, {r}) is not an odd integer: {value}"
    )]
    NonIntegral {
        p: u64,
        q: u64,
        r: u64,
        value: String,
    },

    #[error(
        "sign calibration failed at ({p}, {q}, r = {r}): |raw| = {raw} but count gives {count}"
    )]
    Calibration {
        p: u64,
        q: u64,
        r: u64,
        raw: String,
        count: i64,
    },

    #[error("cotangent sum {value} is {distance:.3e} away from the nearest odd integer")]
    CotangentRounding { value: f64, distance: f64 },

    #[error("Fourier-Dedekind sum s_{n}({a1},{a2};{b}) could not be reconstructed: {detail}")]
    Reconstruction {
        n: i64,
        a1: i64,
        a2: i64,
        b: u64,
        detail: String,
    },

    #[error("{formula} gives {formula_value} but the lattice census gives {census_value} at (p, q, t) = ({p}, {q}, {t})")]
    FormulaMismatch {
        formula: &'static str,
        p: u64,
        q: u64,
        t: u64,
        formula_value: String,
        census_value: String,
    },

    #[error("checkpoint {path}: line {line}: cannot parse {content:?}")]
    Checkpoint {
        path: PathBuf,
        line: usize,
        content: String,
    },

    #[error("results file {path}: line {line}: {detail}")]
    Results {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
