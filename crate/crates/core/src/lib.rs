//! Exact-arithmetic toolkit for classical and p-adic modular forms as
//! truncated q-expansions over Z/p^N: Hecke operators, valuation-aware
//! linear algebra, the ordinary projector, companion-pair detection and the
//! weight-one combiner with its classicality certificate.
//!
//! Everything is exact; there is no tolerance parameter anywhere. Precision
//! loss (from dividing by non-unit pivots) is tracked explicitly and carried
//! into every certificate.

pub mod arith;
pub mod companion;
pub mod error;
pub mod family;
pub mod fixtures;
pub mod formats;
pub mod linalg;
pub mod overconv;
pub mod qseries;
pub mod spaces;

pub use error::{Error, Result};
