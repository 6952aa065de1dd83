//! Exact elimination routines.
//!
//! Rank and determinant use fraction-free (Bareiss) elimination on an
//! integer copy of the matrix; solves and bases use Gauss-Jordan over ℚ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Mat, Rational};

/// Scales each row to integers; returns the integer rows and the product of
/// the scale factors.
fn integerize(m: &Mat) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale_total = BigInt::one();
    let rows = (0..m.rows())
        .map(|i| {
            let lcm = (0..m.cols()).fold(BigInt::one(), |acc, j| acc.lcm(m.get(i, j).denom()));
            scale_total *= &lcm;
            (0..m.cols())
                .map(|j| {
                    let x = m.get(i, j);
                    x.numer() * (&lcm / x.denom())
                })
                .collect()
        })
        .collect();
    (rows, scale_total)
}

/// Fraction-free row echelon form. Returns `(rank, sign of row swaps)` and
/// leaves the last pivot in `a[rank-1][last pivot col]`.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, bool, BigInt) {
    let rows = a.len();
    let mut r = 0;
    let mut prev = BigInt::one();
    let mut negate = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if piv != r {
            a.swap(piv, r);
            negate = !negate;
        }
        for i in r + 1..rows {
            for k in c + 1..cols {
                let v = (&a[r][c] * &a[i][k] - &a[i][c] * &a[r][k]) / &prev;
                a[i][k] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, negate, prev)
}

pub fn rank(m: &Mat) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let (mut a, _) = integerize(m);
    bareiss(&mut a, m.cols()).0
}

pub fn det(m: &Mat) -> Rational {
    assert!(m.is_square(), "det of non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }
    let (mut a, scale) = integerize(m);
    let (r, negate, last) = bareiss(&mut a, n);
    if r < n {
        return Rational::zero();
    }
    let d = Rational::new(last, scale);
    if negate {
        -d
    } else {
        d
    }
}

/// Reduced row echelon form over ℚ, with the pivot column of each nonzero row.
fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                let t = a.get(piv, j).clone();
                a.set(piv, j, a.get(r, j).clone());
                a.set(r, j, t);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..cols {
                let v = a.get(i, j) - &f * a.get(r, j);
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Exact inverse, or `None` when singular.
pub fn inverse(m: &Mat) -> Option<Mat> {
    assert!(m.is_square(), "inverse of non-square matrix");
    let n = m.rows();
    let aug = Mat::hstack(&[m.clone(), Mat::identity(n)]);
    let (red, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.submatrix(0, n, n, n))
}

/// Columns of `m` forming a basis of its column space, with their indices.
pub fn column_basis(m: &Mat) -> (Mat, Vec<usize>) {
    let (_, pivots) = rref(m);
    (m.select_cols(&pivots), pivots)
}

/// Rows of `m` forming a basis of its row space, with their indices.
pub fn row_basis(m: &Mat) -> (Mat, Vec<usize>) {
    let (_, pivots) = rref(&m.transpose());
    (m.select_rows(&pivots), pivots)
}

/// Solves `a x = b`; `None` when inconsistent. Free variables are set to zero.
pub fn solve_left(a: &Mat, b: &Mat) -> Option<Mat> {
    assert_eq!(a.rows(), b.rows(), "solve: row mismatch");
    let n = a.cols();
    let aug = Mat::hstack(&[a.clone(), b.clone()]);
    let (red, pivots) = rref(&aug);
    if pivots.iter().any(|&c| c >= n) {
        return None;
    }
    let mut x = Mat::zeros(n, b.cols());
    for (r, &c) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x.set(c, j, red.get(r, n + j).clone());
        }
    }
    Some(x)
}

/// Solves `x a = b`.
pub fn solve_right(a: &Mat, b: &Mat) -> Option<Mat> {
    solve_left(&a.transpose(), &b.transpose()).map(|x| x.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qf};

    #[test]
    fn det_and_inverse_small() {
        let m = Mat::from_ints(&[&[2, 1], &[7, 4]]);
        assert_eq!(det(&m), q(1));
        let inv = inverse(&m).unwrap();
        assert!((&m * &inv).is_identity());
        let singular = Mat::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(det(&singular), q(0));
        assert!(inverse(&singular).is_none());
    }

    #[test]
    fn det_with_fractions_and_swaps() {
        let m = Mat::new(3, 3, vec![q(0), qf(1, 2), q(1), q(2), q(0), qf(-1, 3), q(1), q(1), q(1)]);
        // cofactor expansion by hand: 0*(0+1/3) - 1/2*(2+1/3) + 1*(2-0)
        assert_eq!(det(&m), qf(5, 6));
    }

    #[test]
    fn rank_of_rectangular() {
        let m = Mat::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1], &[1, 2, 4]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&Mat::zeros(3, 2)), 0);
        assert_eq!(rank(&Mat::identity(4)), 4);
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = Mat::from_ints(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = Mat::from_ints(&[&[2], &[3], &[5]]);
        assert_eq!(solve_left(&a, &b).unwrap(), Mat::from_ints(&[&[2], &[3]]));
        let bad = Mat::from_ints(&[&[2], &[3], &[6]]);
        assert!(solve_left(&a, &bad).is_none());
    }

    #[test]
    fn bases_pick_independent_lines() {
        let m = Mat::from_ints(&[&[1, 2, 0], &[2, 4, 1]]);
        let (basis, idx) = column_basis(&m);
        assert_eq!(idx, vec![0, 2]);
        assert_eq!(basis.cols(), 2);
        let (rb, ridx) = row_basis(&Mat::from_ints(&[&[1, 1], &[2, 2], &[0, 1]]));
        assert_eq!(ridx, vec![0, 2]);
        assert_eq!(rb.rows(), 2);
    }
}
