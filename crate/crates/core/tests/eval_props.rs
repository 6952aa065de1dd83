use ncrat_core::algebra::{commutation_perm, inverse, Mat};
use ncrat_core::eval::{contract, evaluate, evaluate_multi, EvalPoint, TensorValue};
use ncrat_core::expr::RatExpr;
use ncrat_core::sample::{random_directions, random_mat};
use proptest::prelude::*;
use rand::Rng;

mod common;

proptest! {
    #[test]
    fn evaluation_is_a_homomorphism(seed: u64) {
        let mut rng = common::rng(seed);
        let (p, r, s) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
        let a = common::expr(&mut rng, 2, (p, r), false);
        let a2 = common::expr(&mut rng, 2, (p, r), false);
        let b = common::expr(&mut rng, 2, (r, s), false);
        let n = rng.gen_range(1..=3);
        let z = common::point_in(&mut rng, &[&a, &a2, &b], n);
        prop_assume!(z.is_some());
        let z = z.unwrap();
        let v = |e: &RatExpr| evaluate(e, &z).unwrap();
        prop_assert_eq!(v(&RatExpr::add(&a, &a2).unwrap()), &v(&a) + &v(&a2));
        prop_assert_eq!(v(&RatExpr::mul(&a, &b).unwrap()), &v(&a) * &v(&b));
        let grid = RatExpr::block(vec![vec![a.clone(), a2.clone()]]).unwrap();
        prop_assert_eq!(v(&grid), Mat::hstack(&[v(&a), v(&a2)]));
        if p == r {
            if let Some(inv_a) = inverse(&v(&a)) {
                let e = RatExpr::inv(&a).unwrap();
                prop_assert_eq!(v(&e), inv_a);
            }
        }
    }

    #[test]
    fn contract_is_linear(seed: u64) {
        let mut rng = common::rng(seed);
        let sizes = vec![rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2)];
        let (p, q) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let nn: usize = sizes.iter().product();
        let v1 = random_mat(&mut rng, p * nn, q * nn, 4);
        let v2 = random_mat(&mut rng, p * nn, q * nn, 4);
        let h1 = random_mat(&mut rng, sizes[0], sizes[1], 4);
        let h1b = random_mat(&mut rng, sizes[0], sizes[1], 4);
        let h2 = random_mat(&mut rng, sizes[1], sizes[2], 4);
        let tv = |d: Mat| TensorValue { rows: p, cols: q, sizes: sizes.clone(), data: d };
        let c = |d: Mat, a: &Mat| contract(&tv(d), &[a.clone(), h2.clone()]).unwrap();
        prop_assert_eq!(c(&v1 + &v2, &h1), &c(v1.clone(), &h1) + &c(v2.clone(), &h1));
        prop_assert_eq!(c(v1.clone(), &(&h1 + &h1b)), &c(v1.clone(), &h1) + &c(v1, &h1b));
    }

    #[test]
    fn direct_sum_point_gives_direct_sum(seed: u64) {
        let mut rng = common::rng(seed);
        let sh = common::shape(&mut rng);
        let e = common::expr(&mut rng, 3, sh, false);
        let (n, np) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let z = common::point_in(&mut rng, &[&e], n);
        let zp = common::point_in(&mut rng, &[&e], np);
        prop_assume!(z.is_some() && zp.is_some());
        let (z, zp) = (z.unwrap(), zp.unwrap());
        let zero = random_directions(&mut rng, 2, n, np, 0);
        let sum = EvalPoint::block_upper(&z, &zp, &zero).unwrap();
        let v = evaluate(&e, &sum).unwrap();
        let (p, q) = e.shape();
        let big = n + np;
        let vx = v.permute_rows(&commutation_perm(big, p)).permute_cols(&commutation_perm(big, q));
        let vz = evaluate(&e, &z).unwrap().permute_rows(&commutation_perm(n, p)).permute_cols(&commutation_perm(n, q));
        let vzp = evaluate(&e, &zp).unwrap().permute_rows(&commutation_perm(np, p)).permute_cols(&commutation_perm(np, q));
        prop_assert_eq!(vx, Mat::direct_sum(&vz, &vzp));
    }
}

#[test]
fn tensor_value_layout_is_coefficient_first() {
    let z1 = RatExpr::var(1, 1);
    let c = RatExpr::constant(1, 1, common::ints(&[&[1, 2]]));
    let t = RatExpr::tensor(&c, &z1).unwrap();
    let a = EvalPoint::new(vec![common::ints(&[&[3, 0], &[0, 4]])]).unwrap();
    let b = EvalPoint::new(vec![common::ints(&[&[5]])]).unwrap();
    let v = evaluate_multi(&t, &[a, b]).unwrap();
    // index order (coefficient, tuple 1, tuple 2): c ⊗ I_2 ⊗ 5
    assert_eq!(v.data, common::ints(&[&[5, 0, 10, 0], &[0, 5, 0, 10]]));
}
