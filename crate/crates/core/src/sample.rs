//! Seeded random matrices and evaluation points with small integer entries.

use rand::Rng;

use crate::algebra::{q, Mat, Rational};
use crate::eval::EvalPoint;

/// Uniform integer in `-bound..=bound`, as a rational.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    q(rng.gen_range(-bound..=bound))
}

pub fn random_mat<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| random_rational(rng, bound))
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize, bound: i64) -> EvalPoint {
    EvalPoint::new((0..d).map(|_| random_mat(rng, n, n, bound)).collect()).expect("square mats of one size")
}

/// A point of strictly upper triangular matrices. Every expression regular at
/// zero is defined there, since all inverted values are unipotent shifts of
/// their constant terms.
pub fn random_nilpotent_point<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize, bound: i64) -> EvalPoint {
    let mats = (0..d)
        .map(|_| Mat::from_fn(n, n, |i, j| if j > i { random_rational(rng, bound) } else { q(0) }))
        .collect();
    EvalPoint::new(mats).expect("square mats of one size")
}

/// `d` direction matrices of shape `rows x cols`.
pub fn random_directions<R: Rng + ?Sized>(rng: &mut R, d: usize, rows: usize, cols: usize, bound: i64) -> Vec<Mat> {
    (0..d).map(|_| random_mat(rng, rows, cols, bound)).collect()
}
