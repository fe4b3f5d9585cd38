//! Exact lower bounds on the positive semidefinite rank and nonnegative rank
//! of nonnegative matrices.
//!
//! - [`exact`]: rationals, multi-quadratic fields, matrices and subspaces.
//! - [`pattern`]: support patterns, triangular rank, Boolean rank.
//! - [`embed`]: subspace embeddings and their conversions.
//! - [`psd`]: psd factorizations, square-root certificates, rank reduction.
//! - [`cutpoly`]: cut/clique slack matrices and disjointness graphs.
//! - [`io`]: text and JSON formats.

pub mod cutpoly;
pub mod embed;
pub mod error;
pub mod exact;
pub mod io;
pub mod pattern;
pub mod psd;

pub use error::{Error, Result};
