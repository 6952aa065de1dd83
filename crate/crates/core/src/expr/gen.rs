//! Seeded random expressions, used to drive the property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ast::{find_witness, Witness};
use super::{MatPoly, RatExpr};
use crate::algebra::{det, q, Mat, Word};
use crate::error::{Error, Result};
use crate::eval::{evaluate_multi, EvalPoint};
use crate::sample::random_mat;

const CANDIDATES: usize = 4;
const ATTEMPTS_PER_CANDIDATE: usize = 16;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub d: usize,
    pub depth: usize,
    pub rows: usize,
    pub cols: usize,
    /// Keep every inverted subexpression invertible at the zero point.
    pub regular_at_zero: bool,
    /// Largest inner dimension introduced by products and blocks.
    pub max_dim: usize,
    pub max_leaf_degree: usize,
    pub coeff_bound: i64,
}

impl GenConfig {
    pub fn new(d: usize, depth: usize, (rows, cols): (usize, usize)) -> Self {
        GenConfig { d, depth, rows, cols, regular_at_zero: false, max_dim: 2, max_leaf_degree: 2, coeff_bound: 3 }
    }

    pub fn regular(mut self) -> Self {
        self.regular_at_zero = true;
        self
    }
}

/// A random expression of the given depth and shape, deterministic in `seed`.
pub fn random_expr(seed: u64, d: usize, depth: usize, shape: (usize, usize)) -> Result<RatExpr> {
    random_expr_with(seed, &GenConfig::new(d, depth, shape))
}

pub fn random_expr_with(seed: u64, cfg: &GenConfig) -> Result<RatExpr> {
    if cfg.d == 0 || cfg.rows == 0 || cfg.cols == 0 {
        return Err(Error::GenerationFailed("letter count and shape must be positive".into()));
    }
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), cfg };
    g.expr(cfg.depth, cfg.rows, cfg.cols)
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GenConfig,
}

impl Gen<'_> {
    fn leaf(&mut self, rows: usize, cols: usize) -> RatExpr {
        let d = self.cfg.d;
        let mut p = MatPoly::zero(d, rows, cols);
        let terms = self.rng.gen_range(1..=3);
        for _ in 0..terms {
            let len = self.rng.gen_range(0..=self.cfg.max_leaf_degree);
            let w = Word::new((0..len).map(|_| self.rng.gen_range(1..=d)).collect());
            let c = random_mat(&mut self.rng, rows, cols, self.cfg.coeff_bound);
            p.add_term(w, c);
        }
        RatExpr::from_poly(p)
    }

    fn expr(&mut self, depth: usize, rows: usize, cols: usize) -> Result<RatExpr> {
        if depth == 0 {
            return Ok(self.leaf(rows, cols));
        }
        let mut kinds = vec![0, 1, 1, 4];
        if rows == cols {
            kinds.extend([2, 2]);
        }
        if rows.is_multiple_of(2) || cols.is_multiple_of(2) {
            kinds.push(3);
        }
        match *kinds.choose(&mut self.rng).expect("nonempty") {
            0 => {
                let a = self.expr(depth - 1, rows, cols)?;
                let b = self.expr(depth - 1, rows, cols)?;
                RatExpr::add(&a, &b)
            }
            1 => {
                let k = self.rng.gen_range(1..=self.cfg.max_dim);
                let a = self.expr(depth - 1, rows, k)?;
                let b = self.expr(depth - 1, k, cols)?;
                RatExpr::mul(&a, &b)
            }
            2 => self.inverse(depth, rows),
            3 => {
                let gr = if rows.is_multiple_of(2) { 2 } else { 1 };
                let gc = if cols.is_multiple_of(2) { 2 } else { 1 };
                let (br, bc) = (rows / gr, cols / gc);
                let mut grid = Vec::with_capacity(gr);
                for _ in 0..gr {
                    let mut row = Vec::with_capacity(gc);
                    for _ in 0..gc {
                        row.push(self.expr(depth - 1, br, bc)?);
                    }
                    grid.push(row);
                }
                RatExpr::block(grid)
            }
            _ => Ok(self.leaf(rows, cols)),
        }
    }

    fn inverse(&mut self, depth: usize, n: usize) -> Result<RatExpr> {
        let mut last = None;
        for _ in 0..CANDIDATES {
            let inner = self.expr(depth - 1, n, n)?;
            if self.cfg.regular_at_zero {
                let zero = vec![EvalPoint::zeros(self.cfg.d, 1)];
                let c0 = evaluate_multi(&inner, &zero).map(|v| v.data);
                match c0 {
                    Ok(c) if det(&c) != q(0) => return Ok(RatExpr::inv_unchecked(&inner, Witness::new(zero))),
                    Ok(c) => last = Some((inner, c)),
                    Err(_) => {}
                }
            } else {
                let seed = self.rng.gen();
                if let Ok(w) = find_witness(&inner, seed, ATTEMPTS_PER_CANDIDATE) {
                    return Ok(RatExpr::inv_unchecked(&inner, w));
                }
            }
        }
        // regular mode: shift the last candidate by a multiple of the identity
        // so its constant term becomes invertible
        if let Some((inner, c0)) = last {
            for s in 1..=(n as i64 + 1) {
                if det(&(&c0 + &Mat::scalar(n, q(s)))) != q(0) {
                    let shifted = RatExpr::add(&RatExpr::constant(1, self.cfg.d, Mat::scalar(n, q(s))), &inner)?;
                    let zero = vec![EvalPoint::zeros(self.cfg.d, 1)];
                    return Ok(RatExpr::inv_unchecked(&shifted, Witness::new(zero)));
                }
            }
        }
        Err(Error::GenerationFailed(format!("no invertible {n} x {n} inner expression in {} candidates", CANDIDATES)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    #[test]
    fn depth_zero_is_leaf() {
        let e = random_expr(5, 2, 0, (2, 1)).unwrap();
        assert!(matches!(e.node(), Node::Poly { .. }));
        assert_eq!(e.shape(), (2, 1));
    }

    #[test]
    fn deterministic() {
        for seed in 0..20 {
            let a = random_expr(seed, 2, 3, (2, 2)).unwrap();
            let b = random_expr(seed, 2, 3, (2, 2)).unwrap();
            assert_eq!(crate::expr::format(&a), crate::expr::format(&b));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn regular_mode_is_defined_at_zero() {
        for seed in 0..30 {
            let cfg = GenConfig::new(2, 3, (1, 1)).regular();
            let e = random_expr_with(seed, &cfg).unwrap();
            assert!(crate::eval::evaluate(&e, &EvalPoint::zeros(2, 1)).is_ok(), "{e:?}");
        }
    }
}
