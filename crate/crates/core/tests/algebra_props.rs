//! Property suites over the exact-algebra layer: structural invariants that
//! must hold for arbitrary matrices, not just the fixtures the solvers use.

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netgap_core::algebra::{FieldCtx, FieldElement, Matrix};

fn small_field() -> impl Strategy<Value = Arc<FieldCtx>> {
    prop_oneof![
        Just((2u64, 1usize)),
        Just((2, 2)),
        Just((2, 3)),
        Just((3, 1)),
        Just((5, 1)),
        Just((3, 2)),
    ]
    .prop_map(|(p, m)| FieldCtx::new(p, m).unwrap())
}

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (small_field(), 1..=max_dim, 1..=max_dim).prop_flat_map(|(f, r, c)| {
        proptest::collection::vec(0u64..f.order(), r * c).prop_map(move |entries| {
            Matrix::from_encodings(&f, r, c, &entries).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn rank_equals_transpose_rank(m in matrix_strategy(6)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rref_is_idempotent(m in matrix_strategy(6)) {
        let (r1, p1) = m.rref();
        let (r2, p2) = r1.rref();
        prop_assert_eq!(&r1, &r2);
        prop_assert_eq!(p1, p2);
        // row space preserved
        prop_assert_eq!(Matrix::vstack(&[&m, &r1]).rank(), m.rank());
    }

    #[test]
    fn mul_distributes_over_add(
        f in small_field(),
        entries in proptest::collection::vec(0u64..32, 3 * 48),
    ) {
        let take = |k: usize| -> Matrix {
            let e: Vec<u64> = entries[k * 16..(k + 1) * 16]
                .iter()
                .map(|&x| x % f.order())
                .collect();
            Matrix::from_encodings(&f, 4, 4, &e).unwrap()
        };
        let (a, b, c) = (take(0), take(1), take(2));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn completion_reaches_min_rank(m in matrix_strategy(6)) {
        let n = m.cols();
        let rank = m.rank();
        for k in 0..=n {
            match m.complete_to_full_rank(k) {
                Ok(rows) => {
                    prop_assert!(rank + k >= n);
                    prop_assert_eq!(rows.rows(), k);
                    let stacked = Matrix::vstack(&[&m, &rows]);
                    prop_assert_eq!(stacked.rank(), (rank + k).min(n));
                }
                Err(_) => prop_assert!(rank + k < n),
            }
        }
    }
}

#[test]
fn solve_roundtrip_1000_random_invertible_systems() {
    let fields = [
        FieldCtx::new(2, 1).unwrap(),
        FieldCtx::new(2, 2).unwrap(),
        FieldCtx::new(3, 1).unwrap(),
        FieldCtx::new(2, 4).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    while done < 1000 {
        let f = &fields[rng.gen_range(0..fields.len())];
        let n = rng.gen_range(1..=5);
        let a = Matrix::from_fn(f, n, n, |_, _| FieldElement(rng.gen_range(0..f.order())));
        if a.rank() != n {
            continue;
        }
        let x = Matrix::from_fn(f, n, 1, |_, _| FieldElement(rng.gen_range(0..f.order())));
        let b = a.mul(&x);
        let solved = a.solve(&b).expect("invertible");
        assert_eq!(solved, x);
        done += 1;
    }
}

#[test]
fn rank_agrees_with_span_counting_oracle() {
    // independent oracle: |row span| = q^rank, counted by enumerating all
    // row combinations (no elimination involved)
    let f = FieldCtx::prime(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=5);
        let m = Matrix::from_fn(&f, rows, cols, |_, _| {
            FieldElement(rng.gen_range(0..2))
        });
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << rows) {
            let mut v = vec![0u64; cols];
            for i in 0..rows {
                if mask & (1 << i) != 0 {
                    for (j, slot) in v.iter_mut().enumerate() {
                        *slot ^= m.get(i, j).0;
                    }
                }
            }
            span.insert(v);
        }
        let rank_from_count = (span.len() as f64).log2().round() as usize;
        assert_eq!(m.rank(), rank_from_count);
    }
}

#[test]
fn null_space_annihilates_and_has_right_dimension() {
    let f = FieldCtx::new(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=6);
        let m = Matrix::from_fn(&f, rows, cols, |_, _| {
            FieldElement(rng.gen_range(0..4))
        });
        let ns = m.null_space_basis();
        assert_eq!(ns.rows(), cols - m.rank());
        if ns.rows() > 0 {
            assert!(m.mul(&ns.transpose()).is_zero());
            assert_eq!(ns.rank(), ns.rows());
        }
    }
}
