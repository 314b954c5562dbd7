//! Exact-arithmetic toolkit for Newton polygons of L-functions of
//! exponential sums over finite fields.
//!
//! Two independent computation paths are provided and cross-validated:
//! a brute-force oracle over cyclotomic integers (`oracle`) and a p-adic
//! Gauss-sum route (`gauss`, `congruence`, `slopes`, `tables`). The `cli`
//! module wraps everything behind a command-line surface with exact JSON
//! and CSV output.

pub mod arith;
pub mod cli;
pub mod congruence;
pub mod cyclotomic;
pub mod error;
pub mod ffield;
pub mod gauss;
pub mod newton;
pub mod oracle;
pub mod poly;
pub mod slopes;
pub mod tables;

pub use error::{Error, Result};
