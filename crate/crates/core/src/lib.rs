//! Exact and numeric tools for trigonometric R-matrices, spin chains,
//! q-characters, cluster seeds and stable envelopes.

pub mod chain;
pub mod cluster;
pub mod error;
pub mod field;
pub mod qchar;
pub mod rmatrix;
pub mod stab;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{Status, Verdict};
