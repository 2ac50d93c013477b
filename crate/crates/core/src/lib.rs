//! Lattice-point counts in the triangles `rΔ(p, q)` and the signature-type
//! invariant σ derived from them, with the tooling to search for pairs where
//! σ stays within `{-3, -1, 1}`.

pub mod cli;
pub mod contfrac;
pub mod dedekind;
pub mod error;
pub mod exact;
pub mod families;
pub mod lattice;
pub mod report;
pub mod search;
pub mod sigma;

pub use error::{Error, PairError, Result};

/// Largest `p` accepted anywhere; keeps `p²` and `q·r` products inside `u64`.
pub const MAX_P: u64 = (1 << 31) - 1;
