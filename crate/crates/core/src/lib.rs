//! Exact engine for matrix-valued noncommutative rational expressions.
pub mod algebra;
pub mod decide;
pub mod diffcalc;
pub mod error;
pub mod eval;
pub mod expr;
pub mod oracle;
pub mod realize;
pub mod sample;
pub mod selftest;
pub mod series;
pub use error::{Error, Result};
