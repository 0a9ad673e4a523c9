//! Exact-arithmetic computation of graded decomposition matrices `d(q)` and
//! graded Cartan matrices `c(q)` for blocks of cyclotomic q-Schur algebras.
//!
//! The computation runs through Kazhdan-Lusztig combinatorics of the affine
//! symmetric group: multipartition labels are turned into weights, weights
//! into minimal coset representatives, and the matrix entries come from
//! (inverse, parabolic) Kazhdan-Lusztig polynomials over `Z[q, q^-1]`.
//!
//! Everything is exact; there is no floating point anywhere in this crate.

pub mod cli;
pub mod coxeter;
pub mod decomp;
pub mod error;
pub mod hecke;
pub mod laurent;
pub mod multipartitions;
pub mod selftest;
pub mod weights;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
