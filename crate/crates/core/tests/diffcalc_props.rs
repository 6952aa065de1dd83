use ncrat_core::algebra::{inverse, kron, Mat, Word};
use ncrat_core::diffcalc::{
    delta, delta_numeric, delta_numeric_multi, delta_symbolic_value, delta_symbolic_value_multi, delta_word, directional_derivative,
    hessian, hessian_symbolic, iota, lower_iota,
};
use ncrat_core::eval::{evaluate, evaluate_multi, EvalPoint};
use ncrat_core::expr::{parse, MatPoly, RatExpr};
use ncrat_core::oracle::{jet_eval, poly_delta_word_value};
use ncrat_core::realize::{minimize, realize, transfer_expr};
use ncrat_core::sample::{random_directions, random_mat, random_point};
use ncrat_core::selftest::{R1, R2_SCHUR, R3};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

mod common;

fn pair_in(rng: &mut ChaCha8Rng, es: &[&RatExpr]) -> Option<(EvalPoint, EvalPoint)> {
    let (n, np) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
    Some((common::point_in(rng, es, n)?, common::point_in(rng, es, np)?))
}

fn one_direction(j: usize, w: &Mat) -> Vec<Mat> {
    (1..=2).map(|i| if i == j { w.clone() } else { Mat::zeros(w.rows(), w.cols()) }).collect()
}

fn ev(e: &str, z: &EvalPoint) -> Mat {
    evaluate(&parse(e, 2).unwrap(), z).unwrap()
}

fn inv(m: &Mat) -> Mat {
    inverse(m).expect("invertible")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbolic_and_numeric_routes_agree(seed: u64) {
        let mut rng = common::rng(seed);
        let sh = common::shape(&mut rng);
        let regular = rng.gen_bool(0.5);
        let e = common::expr(&mut rng, 3, sh, regular);
        let Some((z, zp)) = pair_in(&mut rng, &[&e]) else { return Ok(()) };
        let w = random_directions(&mut rng, 2, z.n(), zp.n(), 4);
        prop_assert_eq!(delta_symbolic_value(&e, &z, &zp, &w).unwrap(), delta_numeric(&e, &z, &zp, &w).unwrap());
        let zero = random_directions(&mut rng, 2, z.n(), zp.n(), 0);
        prop_assert!(delta_numeric(&e, &z, &zp, &zero).unwrap().is_zero());
        prop_assert!(delta_symbolic_value(&e, &z, &zp, &zero).unwrap().is_zero());
    }

    #[test]
    fn second_differences_agree_across_routes(seed: u64) {
        let mut rng = common::rng(seed);
        let e = common::expr(&mut rng, 2, (1, 1), true);
        let d1 = delta(&e, rng.gen_range(1..=2));
        let Some(pts) = common::points_in(&mut rng, &d1, &[2, 1]) else { return Ok(()) };
        let Some(zpp) = common::point_in(&mut rng, &[&e], 2) else { return Ok(()) };
        let w = random_directions(&mut rng, 2, 1, 2, 4);
        prop_assert_eq!(
            delta_symbolic_value_multi(&d1, &pts[..1], &pts[1], &zpp, &w).unwrap(),
            delta_numeric_multi(&d1, &pts[..1], &pts[1], &zpp, &w).unwrap()
        );
    }

    #[test]
    fn equivalent_expressions_have_equal_differences(seed: u64) {
        let mut rng = common::rng(seed);
        let e = common::expr(&mut rng, 2, (1, 1), true);
        let t = transfer_expr(&minimize(&realize(&e).unwrap()));
        let mut checked = 0;
        for _ in 0..50 {
            let Some((z, zp)) = pair_in(&mut rng, &[&e, &t]) else { continue };
            let j = rng.gen_range(1..=2);
            let w = one_direction(j, &random_mat(&mut rng, z.n(), zp.n(), 4));
            prop_assert_eq!(delta_symbolic_value(&e, &z, &zp, &w).unwrap(), delta_symbolic_value(&t, &z, &zp, &w).unwrap());
            checked += 1;
        }
        prop_assert!(checked > 0);
    }

    #[test]
    fn leibniz_rules(seed: u64) {
        let mut rng = common::rng(seed);
        let e1 = common::expr(&mut rng, 2, (1, 1), false);
        let e2 = common::expr(&mut rng, 2, (1, 1), false);
        let prod = RatExpr::mul(&e1, &e2).unwrap();
        let sum = RatExpr::add(&e1, &e2).unwrap();
        let Some((z, zp)) = pair_in(&mut rng, &[&e1, &e2]) else { return Ok(()) };
        let w = random_directions(&mut rng, 2, z.n(), zp.n(), 4);
        let d = |e: &RatExpr| delta_symbolic_value(e, &z, &zp, &w).unwrap();
        prop_assert_eq!(d(&sum), &d(&e1) + &d(&e2));
        let expect = &(&d(&e1) * &evaluate(&e2, &zp).unwrap()) + &(&evaluate(&e1, &z).unwrap() * &d(&e2));
        prop_assert_eq!(d(&prod), expect);
        if let Ok(i) = RatExpr::inv(&e1) {
            if let (Some(a), Some(b)) = (inverse(&evaluate(&e1, &z).unwrap()), inverse(&evaluate(&e1, &zp).unwrap())) {
                prop_assert_eq!(d(&i), -&(&(&a * &d(&e1)) * &b));
            }
        }
    }

    #[test]
    fn iota_respects_products_and_inverses(seed: u64) {
        let mut rng = common::rng(seed);
        let e1 = common::expr(&mut rng, 2, (1, 1), true);
        let e2 = common::expr(&mut rng, 2, (1, 1), true);
        let prod = RatExpr::mul(&e1, &e2).unwrap();
        let Some(pts) = common::points_in(&mut rng, &iota(&prod), &[2, 2]) else { return Ok(()) };
        let at = |e: &RatExpr| evaluate_multi(e, &pts).unwrap().data;
        prop_assert_eq!(at(&iota(&prod)), at(&RatExpr::mul(&iota(&e1), &iota(&e2)).unwrap()));
        prop_assert_eq!(at(&lower_iota(&prod)), at(&iota(&prod)));
        // inflation: the first tuple only contributes an identity factor
        prop_assert_eq!(at(&iota(&e1)), kron(&Mat::identity(pts[0].n()), &evaluate(&e1, &pts[1]).unwrap()));
        if let Ok(i) = RatExpr::inv(&e1) {
            if let Ok(v) = evaluate_multi(&iota(&i), &pts) {
                prop_assert_eq!(v.data, at(&RatExpr::inv(&iota(&e1)).unwrap()));
            }
        }
    }

    #[test]
    fn word_differences_of_polynomials_split_words(seed: u64) {
        let mut rng = common::rng(seed);
        let terms: Vec<(Word, Mat)> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let len = rng.gen_range(0..=4);
                (Word::new((0..len).map(|_| rng.gen_range(1..=2)).collect()), random_mat(&mut rng, 1, 2, 3))
            })
            .collect();
        let p = MatPoly::from_terms(2, 1, 2, terms);
        let deg = p.degree().unwrap_or(0);
        let len = rng.gen_range(0..=deg);
        let w = Word::new((0..len).map(|_| rng.gen_range(1..=2)).collect());
        let pts: Vec<EvalPoint> = (0..=len).map(|_| { let n = rng.gen_range(1..=2); random_point(&mut rng, 2, n, 4) }).collect();
        let e = RatExpr::from_poly(p.clone());
        prop_assert_eq!(evaluate_multi(&delta_word(&e, &w), &pts).unwrap().data, poly_delta_word_value(&p, &w, &pts));
    }

    #[test]
    fn empty_word_difference_is_the_expression(seed: u64) {
        let mut rng = common::rng(seed);
        let e = common::expr(&mut rng, 3, (1, 2), false);
        let Some(z) = common::point_in(&mut rng, &[&e], 2) else { return Ok(()) };
        prop_assert_eq!(evaluate(&delta_word(&e, &Word::empty()), &z).unwrap(), evaluate(&e, &z).unwrap());
    }

    #[test]
    fn derivatives_match_jets(seed: u64) {
        let mut rng = common::rng(seed);
        let sh = common::shape(&mut rng);
        let e = common::expr(&mut rng, 3, sh, false);
        let Some(z) = common::point_in(&mut rng, &[&e], 2) else { return Ok(()) };
        let w = random_directions(&mut rng, 2, 2, 2, 4);
        let Ok(jet) = jet_eval(&e, &z, &w) else { return Ok(()) };
        prop_assert_eq!(directional_derivative(&e, &z, &w).unwrap(), jet.0[1].clone());
        let h = hessian(&e, &z, &w).unwrap();
        prop_assert_eq!(&h, &jet.0[2].scale(&ncrat_core::algebra::q(2)));
        prop_assert_eq!(hessian_symbolic(&e, &z, &w).unwrap(), h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn realization_form_difference(seed: u64) {
        let mut rng = common::rng(seed);
        let m = rng.gen_range(1..=3);
        let a: Vec<Mat> = (0..2).map(|_| random_mat(&mut rng, m, m, 2)).collect();
        let (b, c) = (random_mat(&mut rng, m, 1, 3), random_mat(&mut rng, 1, m, 3));
        let mut pencil = MatPoly::constant(2, Mat::identity(m));
        for (j, aj) in a.iter().enumerate() {
            pencil.add_term(Word::letter(j + 1), -aj);
        }
        let pe = RatExpr::from_poly(pencil);
        let r = RatExpr::mul(&RatExpr::mul(&RatExpr::constant(1, 2, c.clone()), &RatExpr::inv(&pe).unwrap()).unwrap(), &RatExpr::constant(1, 2, b.clone())).unwrap();
        let Some((z, zp)) = pair_in(&mut rng, &[&r]) else { return Ok(()) };
        let j = rng.gen_range(1..=2);
        let wj = random_mat(&mut rng, z.n(), zp.n(), 4);
        let (n, np) = (z.n(), zp.n());
        let expect = &(&(&kron(&c, &Mat::identity(n)) * &inv(&evaluate(&pe, &z).unwrap())) * &kron(&a[j - 1], &wj))
            * &(&inv(&evaluate(&pe, &zp).unwrap()) * &kron(&b, &Mat::identity(np)));
        prop_assert_eq!(delta_symbolic_value(&r, &z, &zp, &one_direction(j, &wj)).unwrap(), expect);
    }

    #[test]
    fn worked_rational_differences(seed: u64) {
        let mut rng = common::rng(seed);
        let es: Vec<RatExpr> = [R1, R2_SCHUR, R3].iter().map(|s| parse(s, 2).unwrap()).collect();
        let Some((z, zp)) = pair_in(&mut rng, &es.iter().collect::<Vec<_>>()) else { return Ok(()) };
        let w = random_mat(&mut rng, z.n(), zp.n(), 4);
        let d = |e: &RatExpr, j: usize| delta_symbolic_value(e, &z, &zp, &one_direction(j, &w)).unwrap();
        let (n, np) = (z.n(), zp.n());
        let i2 = Mat::identity(2);
        let swap = Mat::from_ints(&[&[0, 1], &[1, 0]]);

        let m = "[[1 - z1, -z2], [-z2, 1 - z1]]";
        let left = &kron(&Mat::from_ints(&[&[1, 0]]), &Mat::identity(n)) * &inv(&ev(m, &z));
        let right = &inv(&ev(m, &zp)) * &kron(&Mat::from_ints(&[&[1], &[0]]), &Mat::identity(np));
        prop_assert_eq!(d(&es[0], 1), &(&left * &kron(&i2, &w)) * &right);
        prop_assert_eq!(d(&es[0], 2), &(&left * &kron(&swap, &w)) * &right);

        let (r2, r2p) = (ev(R2_SCHUR, &z), ev(R2_SCHUR, &zp));
        let g = ev("z2*inv(1 - z1)", &z);
        let gp = ev("inv(1 - z1)*z2", &zp);
        prop_assert_eq!(d(&es[1], 1), &(&r2 * &(&w + &(&(&g * &w) * &gp))) * &r2p);
        prop_assert_eq!(d(&es[1], 2), &(&r2 * &(&(&w * &gp) + &(&g * &w))) * &r2p);

        let s = "inv(z2 - (1 - z1)*inv(z2)*(1 - z1))";
        let (sz, szp) = (ev(s, &z), ev(s, &zp));
        let z2i = ev("inv(z2)", &z);
        let h = ev("inv(z2)*(1 - z1)", &z);
        let k = ev("(1 - z1)*inv(z2)", &z);
        let hp = ev("inv(z2)*(1 - z1)", &zp);
        let z2ip = ev("inv(z2)", &zp);
        let one_minus_p = ev("1 - z1", &zp);
        let d1 = &(&(&z2i * &w) * &szp) + &(&(&(&h * &sz) * &(&(&w * &hp) + &(&k * &w))) * &szp);
        prop_assert_eq!(d(&es[2], 1), d1);
        let d2 = &(&(&(&(&z2i * &w) * &z2ip) * &one_minus_p) * &szp) + &(&(&(&h * &sz) * &(&w + &(&(&k * &w) * &hp))) * &szp);
        prop_assert_eq!(d(&es[2], 2), d2);
    }
}

#[test]
fn difference_of_inverse_in_the_other_letter() {
    let e = parse("inv(z1)", 2).unwrap();
    let d2 = delta(&e, 2);
    let z = EvalPoint::new(vec![Mat::from_ints(&[&[1, 1], &[0, 1]]), Mat::from_ints(&[&[3, 0], &[1, 2]])]).unwrap();
    let zp = EvalPoint::new(vec![Mat::from_ints(&[&[2]]), Mat::from_ints(&[&[5]])]).unwrap();
    let v = evaluate_multi(&d2, &[z.clone(), zp.clone()]).unwrap();
    assert!(v.data.is_zero());
    let singular = EvalPoint::new(vec![Mat::from_ints(&[&[1, 1], &[1, 1]]), Mat::identity(2)]).unwrap();
    let singular1 = EvalPoint::new(vec![Mat::from_ints(&[&[0]]), Mat::identity(1)]).unwrap();
    assert!(evaluate_multi(&d2, &[singular, zp]).is_err());
    assert!(evaluate_multi(&d2, &[z, singular1]).is_err());
}
