#![allow(dead_code)]

use ncrat_core::algebra::Mat;
use ncrat_core::eval::{evaluate, evaluate_multi, EvalPoint};
use ncrat_core::expr::{random_expr_with, GenConfig, RatExpr};
use ncrat_core::sample::random_point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random expression in two letters; retries generation with fresh seeds.
pub fn expr(rng: &mut ChaCha8Rng, depth: usize, shape: (usize, usize), regular: bool) -> RatExpr {
    let mut cfg = GenConfig::new(2, depth, shape);
    cfg.regular_at_zero = regular;
    loop {
        if let Ok(e) = random_expr_with(rng.gen(), &cfg) {
            return e;
        }
    }
}

pub fn shape(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.gen_range(1..=2), rng.gen_range(1..=2))
}

pub fn point_in(rng: &mut ChaCha8Rng, es: &[&RatExpr], n: usize) -> Option<EvalPoint> {
    (0..50).map(|_| random_point(rng, 2, n, 5)).find(|z| es.iter().all(|e| evaluate(e, z).is_ok()))
}

pub fn points_in(rng: &mut ChaCha8Rng, e: &RatExpr, sizes: &[usize]) -> Option<Vec<EvalPoint>> {
    (0..50)
        .map(|_| sizes.iter().map(|&n| random_point(rng, 2, n, 5)).collect::<Vec<_>>())
        .find(|pts| evaluate_multi(e, pts).is_ok())
}

pub fn ints(rows: &[&[i64]]) -> Mat {
    Mat::from_ints(rows)
}
