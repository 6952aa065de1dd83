use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{kron, Mat, Rational, Word};

/// Matrix-valued noncommutative polynomial `Σ_w P_w z^w`.
///
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatPoly {
    d: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<Word, Mat>,
}

impl MatPoly {
    pub fn zero(d: usize, rows: usize, cols: usize) -> Self {
        MatPoly { d, rows, cols, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: Mat) -> Self {
        let mut p = MatPoly::zero(d, c.rows(), c.cols());
        p.add_term(Word::empty(), c);
        p
    }

    pub fn scalar(d: usize, c: Rational) -> Self {
        MatPoly::constant(d, Mat::new(1, 1, vec![c]))
    }

    /// The scalar monomial `z^w`.
    pub fn monomial(d: usize, w: Word) -> Self {
        let mut p = MatPoly::zero(d, 1, 1);
        p.add_term(w, Mat::identity(1));
        p
    }

    /// The scalar coordinate `z_j`.
    pub fn var(d: usize, j: usize) -> Self {
        MatPoly::monomial(d, Word::letter(j))
    }

    pub fn from_terms(d: usize, rows: usize, cols: usize, terms: impl IntoIterator<Item = (Word, Mat)>) -> Self {
        let mut p = MatPoly::zero(d, rows, cols);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn terms(&self) -> &BTreeMap<Word, Mat> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> Mat {
        self.terms.get(w).cloned().unwrap_or_else(|| Mat::zeros(self.rows, self.cols))
    }

    pub fn constant_term(&self) -> Mat {
        self.coeff(&Word::empty())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Word::is_empty)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn add_term(&mut self, w: Word, c: Mat) {
        assert_eq!(c.shape(), (self.rows, self.cols), "coefficient shape mismatch");
        assert!(w.max_letter() <= self.d, "letter out of range");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&w) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(w, s);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, other: &MatPoly) -> MatPoly {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MatPoly {
        self.scale(&-Rational::from_integer(1.into()))
    }

    pub fn scale(&self, c: &Rational) -> MatPoly {
        if c.is_zero() {
            return MatPoly::zero(self.d, self.rows, self.cols);
        }
        MatPoly { d: self.d, rows: self.rows, cols: self.cols, terms: self.terms.iter().map(|(w, m)| (w.clone(), m.scale(c))).collect() }
    }

    pub fn mul(&self, other: &MatPoly) -> MatPoly {
        assert_eq!(self.cols, other.rows, "poly mul: inner dimension mismatch");
        let mut out = MatPoly::zero(self.d.max(other.d), self.rows, other.cols);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    /// Assembles a grid of equally shaped polynomials into one polynomial.
    pub fn block(grid: &[Vec<MatPoly>]) -> MatPoly {
        let d = grid[0][0].d;
        let (br, bc) = (grid[0][0].rows, grid[0][0].cols);
        let (gr, gc) = (grid.len(), grid[0].len());
        let mut words: Vec<Word> = grid.iter().flatten().flat_map(|p| p.terms.keys().cloned()).collect();
        words.sort();
        words.dedup();
        let mut out = MatPoly::zero(d, br * gr, bc * gc);
        for w in words {
            let blocks: Vec<Vec<Mat>> = grid.iter().map(|row| row.iter().map(|p| p.coeff(&w)).collect()).collect();
            out.add_term(w, Mat::block(&blocks));
        }
        out
    }

    /// Scalar entry `(i, j)` as a `1 x 1` polynomial.
    pub fn entry(&self, i: usize, j: usize) -> MatPoly {
        let mut out = MatPoly::zero(self.d, 1, 1);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), Mat::new(1, 1, vec![c.get(i, j).clone()]));
        }
        out
    }

    /// Coefficient-first evaluation `Σ_w P_w ⊗ Z^w` at a tuple of `n x n`
    /// matrices.
    pub fn eval(&self, z: &[Mat]) -> Mat {
        let n = z.first().map_or(1, Mat::rows);
        let mut out = Mat::zeros(self.rows * n, self.cols * n);
        let mut powers: BTreeMap<Word, Mat> = BTreeMap::new();
        powers.insert(Word::empty(), Mat::identity(n));
        for (w, c) in &self.terms {
            let zw = power(&mut powers, w, z);
            out = &out + &kron(c, &zw);
        }
        out
    }
}

fn power(cache: &mut BTreeMap<Word, Mat>, w: &Word, z: &[Mat]) -> Mat {
    if let Some(m) = cache.get(w) {
        return m.clone();
    }
    let k = w.len();
    let head = power(cache, &w.prefix(k - 1), z);
    let m = &head * &z[w.letters()[k - 1] - 1];
    cache.insert(w.clone(), m.clone());
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    #[test]
    fn commutator_terms() {
        let z1 = MatPoly::var(2, 1);
        let z2 = MatPoly::var(2, 2);
        let c = z1.mul(&z2).add(&z2.mul(&z1).neg());
        assert_eq!(c.terms().len(), 2);
        assert_eq!(c.coeff(&Word::new(vec![1, 2])), Mat::from_ints(&[&[1]]));
        assert_eq!(c.coeff(&Word::new(vec![2, 1])), Mat::from_ints(&[&[-1]]));
        assert_eq!(c.degree(), Some(2));
    }

    #[test]
    fn cancellation_drops_terms() {
        let z1 = MatPoly::var(1, 1);
        assert!(z1.add(&z1.neg()).is_zero());
    }

    #[test]
    fn eval_is_coefficient_first() {
        let p = MatPoly::from_terms(1, 2, 1, [(Word::letter(1), Mat::from_ints(&[&[1], &[2]]))]);
        let z = Mat::from_ints(&[&[0, 1], &[3, 4]]);
        let v = p.eval(std::slice::from_ref(&z));
        assert_eq!(v, Mat::vstack(&[z.clone(), z.scale(&q(2))]));
    }

    #[test]
    fn eval_respects_word_order() {
        let p = MatPoly::monomial(2, Word::new(vec![1, 2]));
        let a = Mat::from_ints(&[&[1, 1], &[0, 1]]);
        let b = Mat::from_ints(&[&[1, 0], &[1, 1]]);
        assert_eq!(p.eval(&[a.clone(), b.clone()]), &a * &b);
    }
}
