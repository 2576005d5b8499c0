use proptest::prelude::*;
use selfsim::ff::{kernel_basis, mat_inv, solve_linear, subspace_leq, FpMatrix, PrimeField, Subspace};
use selfsim::Error;

fn matrix(p: u32, rows: usize, cols: usize) -> impl Strategy<Value = FpMatrix> {
    prop::collection::vec(0..p, rows * cols)
        .prop_map(move |data| FpMatrix::from_data(PrimeField::new(p as u64).unwrap(), rows, cols, data).unwrap())
}

fn any_matrix() -> impl Strategy<Value = FpMatrix> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..=8, 1usize..=8).prop_flat_map(|(p, r, c)| matrix(p, r, c))
}

fn square(p: u32) -> impl Strategy<Value = FpMatrix> {
    (1usize..=8).prop_flat_map(move |n| matrix(p, n, n))
}

/// Three random subspaces of one ambient space with u ≤ v ≤ w by construction,
/// plus an unrelated one.
fn chain() -> impl Strategy<Value = (Subspace, Subspace, Subspace, Subspace)> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..=6).prop_flat_map(|(p, dim)| {
        (matrix(p, 2, dim), matrix(p, 2, dim), matrix(p, 2, dim), matrix(p, 3, dim)).prop_map(move |(a, b, c, x)| {
            let field = a.field();
            let u = Subspace::span(&a);
            let v = Subspace::span(&FpMatrix::vstack(field, dim, &[&a, &b]).unwrap());
            let w = Subspace::span(&FpMatrix::vstack(field, dim, &[&a, &b, &c]).unwrap());
            (u, v, w, Subspace::span(&x))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_is_an_involution(m in prop::sample::select(vec![2u32, 3, 5]).prop_flat_map(square)) {
        match mat_inv(&m) {
            Ok(inv) => {
                prop_assert_eq!(mat_inv(&inv).unwrap(), m.clone());
                prop_assert_eq!(m.mul(&inv).unwrap(), FpMatrix::identity(m.field(), m.rows()));
            }
            Err(Error::Singular) => prop_assert!(m.rank() < m.rows()),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn rank_nullity(m in any_matrix()) {
        let k = kernel_basis(&m);
        prop_assert_eq!(m.rank() + k.dim(), m.cols());
        for v in k.basis().row_iter() {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn subspace_order((u, v, w, x) in chain()) {
        prop_assert!(subspace_leq(&u, &u).unwrap());
        prop_assert!(subspace_leq(&u, &v).unwrap());
        prop_assert!(subspace_leq(&v, &w).unwrap());
        prop_assert!(subspace_leq(&u, &w).unwrap());
        // transitivity on an arbitrary triple
        if subspace_leq(&x, &u).unwrap() && subspace_leq(&u, &w).unwrap() {
            prop_assert!(subspace_leq(&x, &w).unwrap());
        }
        if subspace_leq(&w, &u).unwrap() {
            prop_assert_eq!(u.dim(), w.dim());
        }
    }

    #[test]
    fn solve_satisfies_the_system(
        (a, b) in (prop::sample::select(vec![2u32, 3, 5]), 1usize..=8, 1usize..=8, 1usize..=3)
            .prop_flat_map(|(p, r, c, k)| (matrix(p, r, c), matrix(p, r, k)))
    ) {
        match solve_linear(&a, &b) {
            Ok(x) => prop_assert_eq!(a.mul(&x).unwrap(), b),
            Err(Error::Inconsistent { .. }) => {
                let aug = FpMatrix::from_data(
                    a.field(),
                    a.rows(),
                    a.cols() + b.cols(),
                    (0..a.rows()).flat_map(|i| a.row(i).iter().chain(b.row(i)).copied().collect::<Vec<_>>()).collect(),
                ).unwrap();
                prop_assert!(aug.rank() > a.rank());
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn consistent_systems_are_solved(
        (a, x) in (prop::sample::select(vec![2u32, 3, 5]), 1usize..=8, 1usize..=8, 1usize..=3)
            .prop_flat_map(|(p, r, c, k)| (matrix(p, r, c), matrix(p, c, k)))
    ) {
        let b = a.mul(&x).unwrap();
        let y = solve_linear(&a, &b).unwrap();
        prop_assert_eq!(a.mul(&y).unwrap(), b);
    }
}
