use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{q, Rational};

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        Mat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// `c * I_n`.
    pub fn scalar(n: usize, c: Rational) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from integer rows; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| q(x)));
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Rational) -> Mat {
        if c.is_zero() {
            return Mat::zeros(self.rows, self.cols);
        }
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Mat {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "submatrix out of range");
        Mat::from_fn(nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hstack(parts: &[Mat]) -> Mat {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(rows, cols);
        let mut c0 = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        out
    }

    pub fn vstack(parts: &[Mat]) -> Mat {
        let cols = parts.first().map_or(0, |m| m.cols);
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Mat::zeros(rows, cols);
        let mut r0 = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            out.set_block(r0, 0, m);
            r0 += m.rows;
        }
        out
    }

    /// Assembles a block matrix from a rectangular grid of conformable blocks.
    pub fn block(grid: &[Vec<Mat>]) -> Mat {
        let rows: Vec<Mat> = grid.iter().map(|row| Mat::hstack(row)).collect();
        Mat::vstack(&rows)
    }

    pub fn direct_sum(a: &Mat, b: &Mat) -> Mat {
        let mut out = Mat::zeros(a.rows + b.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(a.rows, a.cols, b);
        out
    }

    /// Row `r` of the result is row `perm[r]` of `self`, i.e. `P * self`
    /// for the permutation matrix with a one at `(r, perm[r])`.
    pub fn permute_rows(&self, perm: &[usize]) -> Mat {
        assert_eq!(perm.len(), self.rows);
        self.select_rows(perm)
    }

    /// Column `c` of the result is column `perm[c]` of `self`, i.e.
    /// `self * P^T` for the permutation matrix with a one at `(c, perm[c])`.
    pub fn permute_cols(&self, perm: &[usize]) -> Mat {
        assert_eq!(perm.len(), self.cols);
        self.select_cols(perm)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn pow(&self, k: usize) -> Mat {
        assert!(self.is_square());
        let mut out = Mat::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "mul: inner dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] += a * b;
                }
            }
        }
        out
    }
}

impl Add for Mat {
    type Output = Mat;
    fn add(self, rhs: Mat) -> Mat {
        &self + &rhs
    }
}

impl Sub for Mat {
    type Output = Mat;
    fn sub(self, rhs: Mat) -> Mat {
        &self - &rhs
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, rhs: Mat) -> Mat {
        &self * &rhs
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl Neg for Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        -&self
    }
}

/// Parses `"int"` or `"num/den"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().ok()?;
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<num_bigint::BigInt>().ok().map(Rational::from_integer),
    }
}

// JSON form: array of rows, entries "num/den" or "int" strings (bare
// integers are accepted on input).
impl serde::Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect();
        rows.serialize(ser)
    }
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum Entry {
    Text(String),
    Int(i64),
}

impl<'de> serde::Deserialize<'de> for Mat {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rows: Vec<Vec<Entry>> = Vec::deserialize(de)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(D::Error::custom("ragged matrix rows"));
            }
            for e in row {
                let v = match e {
                    Entry::Int(i) => q(i),
                    Entry::Text(t) => parse_rational(&t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}")))?,
                };
                data.push(v);
            }
        }
        Ok(Mat { rows: r, cols: c, data })
    }
}

/// Kronecker product: the `(i, j)` block of the result is `a[i, j] * b`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Mat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    let y = b.get(k, l);
                    if y.is_zero() {
                        continue;
                    }
                    out.set(i * br + k, j * bc + l, x * y);
                }
            }
        }
    }
    out
}

/// Index form of `P(p, n)`: row `r` has its single one in column `perm[r]`.
///
/// `P(p, n)` is the `p x n` grid of blocks `E_ij^T` with `E_ij` the
/// `p x n` matrix unit, so row `i*n + j` carries its one at column `j*p + i`.
pub fn commutation_perm(p: usize, n: usize) -> Vec<usize> {
    let mut perm = vec![0; p * n];
    for i in 0..p {
        for j in 0..n {
            perm[i * n + j] = j * p + i;
        }
    }
    perm
}

/// The `pn x pn` commutation matrix `P(p, n)`, satisfying
/// `A ⊗ B = P(n, p) (B ⊗ A) P(m, q)^T` for `A: n x m`, `B: p x q`.
pub fn commutation_matrix(p: usize, n: usize) -> Mat {
    let perm = commutation_perm(p, n);
    let mut m = Mat::zeros(p * n, p * n);
    for (r, &c) in perm.iter().enumerate() {
        m.set(r, c, Rational::one());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(kron(&Mat::identity(2), &Mat::identity(3)), Mat::identity(6));
    }

    #[test]
    fn kron_with_scalar_scales() {
        let b = Mat::from_ints(&[&[1, -2], &[3, 4]]);
        assert_eq!(kron(&Mat::from_ints(&[&[2]]), &b), b.scale(&q(2)));
    }

    #[test]
    fn commutation_trivial_and_swap() {
        assert_eq!(commutation_matrix(1, 4), Mat::identity(4));
        let swap = Mat::from_ints(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]);
        assert_eq!(commutation_matrix(2, 2), swap);
    }

    #[test]
    fn commutation_reorders_kron_factors() {
        let a = Mat::from_ints(&[&[1, 2, 3], &[4, 5, 6]]);
        let b = Mat::from_ints(&[&[7, -1], &[0, 2]]);
        let lhs = kron(&a, &b);
        let rhs = &(&commutation_matrix(2, 2) * &kron(&b, &a)) * &commutation_matrix(3, 2).transpose();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutation_is_orthogonal_permutation() {
        for (p, n) in [(2, 3), (3, 2), (1, 5), (4, 4)] {
            let m = commutation_matrix(p, n);
            assert_eq!(m.transpose(), commutation_matrix(n, p));
            assert!((&m * &m.transpose()).is_identity());
        }
    }

    #[test]
    fn permute_matches_dense_product() {
        let m = Mat::from_fn(6, 6, |i, j| q((i * 7 + j * 3) as i64 % 5 - 2));
        let p = commutation_matrix(2, 3);
        let dense = &(&p * &m) * &p.transpose();
        let perm = commutation_perm(2, 3);
        assert_eq!(m.permute_rows(&perm).permute_cols(&perm), dense);
    }
}
