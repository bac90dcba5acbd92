//! Scalar tower and matrices: rationals, polynomials, rational functions,
//! truncated series, dense matrices in exact and numeric mode.

pub mod dense;
pub mod exact_linalg;
pub mod gcd;
pub mod numeric;
pub mod parse;
pub mod poly;
pub mod ratfun;
pub mod rfmatrix;
pub mod scalar;
pub mod series;
pub mod var;

pub use dense::Dense;
pub use poly::{rat, rat_int, MPoly, Rational};
pub use ratfun::RatFun;
pub use rfmatrix::{Basis, RfMatrix};
pub use scalar::Scalar;
pub use series::{leading_form_ratio, Degeneration, TruncSeries2};
pub use var::Var;
