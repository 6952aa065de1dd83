//! Exact scalar and matrix arithmetic over the rationals.
//!
//! Everything downstream (evaluation, series, realizations, the calculus)
//! works with [`Mat`] values whose entries are arbitrary-precision
//! [`Rational`]s, so every identity can be checked by plain equality.

mod linalg;
mod mat;
mod word;

pub use linalg::{column_basis, det, inverse, rank, row_basis, solve_left, solve_right};
pub use mat::{commutation_matrix, commutation_perm, kron, parse_rational, Mat};
pub use word::{word_concat, word_reverse, words_up_to, Word};

use num_bigint::BigInt;

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`.
pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
