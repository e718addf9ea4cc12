//! Exact-enumeration association tests for single rare variants with a
//! binary outcome.
//!
//! A variant is summarised by a 2x2 carrier table ([`stats::Counts2x2`]).
//! Because a rare variant's data are just two carrier counts, every dataset
//! that could have been observed can be enumerated. That gives exact Type I
//! error rates for any test ([`engine::t1er`]), exact permutation p-values
//! ([`engine::perm_pvalue`]) and approximate unconditional p-values
//! ([`engine::au_pvalue`]), with tail truncation that bounds the omitted
//! probability by a fixed `epsilon`.

pub mod batch;
pub mod dist;
pub mod engine;
mod error;
pub mod stats;

pub use engine::{Method, NullModel, DEFAULT_EPSILON};
pub use error::{Error, Result};
pub use stats::{Counts2x2, TestKind};
