use ncrat_core::algebra::{commutation_matrix, commutation_perm, inverse, kron, q, qf, Mat, Rational};
use ncrat_core::sample::random_mat;
use proptest::prelude::*;

mod common;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=20).prop_map(|(a, b)| qf(a, b))
}

proptest! {
    #[test]
    fn rational_arithmetic_is_exact(a in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &c) - &c, a.clone());
        if c != q(0) {
            prop_assert_eq!(&(&a * &c) / &c, a);
        }
    }

    #[test]
    fn kron_is_associative(seed: u64, dims in proptest::collection::vec(1usize..=3, 6)) {
        let mut rng = common::rng(seed);
        let a = random_mat(&mut rng, dims[0], dims[1], 4);
        let b = random_mat(&mut rng, dims[2], dims[3], 4);
        let c = random_mat(&mut rng, dims[4], dims[5], 4);
        prop_assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
    }

    #[test]
    fn commutation_matrix_is_orthogonal_permutation(p in 1usize..=5, n in 1usize..=5) {
        let m = commutation_matrix(p, n);
        for i in 0..p * n {
            let ones_row = (0..p * n).filter(|&j| m.get(i, j) == &q(1)).count();
            let ones_col = (0..p * n).filter(|&j| m.get(j, i) == &q(1)).count();
            prop_assert_eq!((ones_row, ones_col), (1, 1));
        }
        prop_assert_eq!(inverse(&m).unwrap(), m.transpose());
        prop_assert_eq!(m.transpose(), commutation_matrix(n, p));
        let perm = commutation_perm(p, n);
        prop_assert_eq!(Mat::identity(p * n).permute_rows(&perm), m);
    }

    #[test]
    fn commutation_swaps_kron_factors(seed: u64, dims in proptest::collection::vec(1usize..=3, 4)) {
        let mut rng = common::rng(seed);
        let a = random_mat(&mut rng, dims[0], dims[1], 4);
        let b = random_mat(&mut rng, dims[2], dims[3], 4);
        let lhs = kron(&a, &b);
        let rhs = &(&commutation_matrix(dims[2], dims[0]).transpose() * &kron(&b, &a)) * &commutation_matrix(dims[3], dims[1]);
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kron_mixed_product(seed: u64, dims in proptest::collection::vec(1usize..=3, 6)) {
        let mut rng = common::rng(seed);
        let (m, n, k, p, r, s) = (dims[0], dims[1], dims[2], dims[3], dims[4], dims[5]);
        let a = random_mat(&mut rng, m, n, 4);
        let c = random_mat(&mut rng, n, k, 4);
        let b = random_mat(&mut rng, p, r, 4);
        let d = random_mat(&mut rng, r, s, 4);
        prop_assert_eq!(&kron(&a, &b) * &kron(&c, &d), kron(&(&a * &c), &(&b * &d)));
    }
}
