use ncrat_core::expr::{format, format_nce, parse, parse_nce, MatPoly, Node, RatExpr};
use ncrat_core::algebra::Word;
use ncrat_core::sample::{random_mat, random_point};
use proptest::prelude::*;
use rand::Rng;

mod common;

fn check_shapes(e: &RatExpr) -> Result<(), String> {
    let (p, q) = e.shape();
    match e.node() {
        Node::Poly { poly, .. } => (poly.rows(), poly.cols()) == (p, q),
        Node::Add(a, b) => a.shape() == (p, q) && b.shape() == (p, q),
        Node::Mul(a, b) => a.rows() == p && a.cols() == b.rows() && b.cols() == q,
        Node::Inv { inner, .. } => inner.shape() == (p, q) && p == q,
        Node::Block { grid_rows, grid_cols, entries } => {
            let (br, bc) = entries[0].shape();
            entries.iter().all(|x| x.shape() == (br, bc)) && br * grid_rows == p && bc * grid_cols == q
        }
        Node::Tensor(a, b) => (a.rows() * b.rows(), a.cols() * b.cols()) == (p, q),
        Node::Iota(a) => a.shape() == (p, q),
    }
    .then_some(())
    .ok_or_else(|| format!("bad shape at {e:?}"))?;
    e.children().into_iter().try_for_each(check_shapes)
}

fn random_poly(rng: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize) -> MatPoly {
    let mut p = MatPoly::zero(2, rows, cols);
    for _ in 0..rng.gen_range(0..=4) {
        let len = rng.gen_range(0..=3);
        p.add_term(Word::new((0..len).map(|_| rng.gen_range(1..=2)).collect()), random_mat(rng, rows, cols, 4));
    }
    p
}

proptest! {
    #[test]
    fn generated_expressions_are_well_shaped(seed: u64, depth in 0usize..=4) {
        let mut rng = common::rng(seed);
        let sh = common::shape(&mut rng);
        let e = common::expr(&mut rng, depth, sh, false);
        prop_assert_eq!(e.shape(), sh);
        prop_assert!(check_shapes(&e).is_ok());
    }

    #[test]
    fn parse_inverts_format(seed: u64, depth in 0usize..=4) {
        let mut rng = common::rng(seed);
        let sh = common::shape(&mut rng);
        let e = common::expr(&mut rng, depth, sh, false);
        let text = format(&e);
        let back = parse(&text, 2).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back.normalize(), e.normalize(), "{}", text);
        let (d, again) = parse_nce(&format_nce(&e)).unwrap();
        prop_assert_eq!(d, 2);
        prop_assert_eq!(again.normalize(), e.normalize());
    }

    #[test]
    fn polynomial_arithmetic_agrees_with_evaluation(seed: u64) {
        let mut rng = common::rng(seed);
        let (p, r, s) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
        let a = random_poly(&mut rng, p, r);
        let a2 = random_poly(&mut rng, p, r);
        let b = random_poly(&mut rng, r, s);
        let z = random_point(&mut rng, 2, 2, 5);
        prop_assert_eq!(a.mul(&b).eval(z.mats()), &a.eval(z.mats()) * &b.eval(z.mats()));
        prop_assert_eq!(a.add(&a2).eval(z.mats()), &a.eval(z.mats()) + &a2.eval(z.mats()));
    }
}

#[test]
fn polynomial_subtrees_collapse() {
    let e = parse("(1 - z1)*(1 + z1) + z2*z1", 2).unwrap();
    assert!(e.as_poly().is_some());
    let e = parse("inv(1 - z1) + z2", 2).unwrap();
    assert!(matches!(e.node(), Node::Add(..)));
}

#[test]
fn inverse_of_nowhere_invertible_is_rejected() {
    assert!(parse("inv(z1*z2 - z1*z2)", 2).is_err());
    assert!(parse("inv([[z1, z1], [z1, z1]])", 2).is_err());
}
