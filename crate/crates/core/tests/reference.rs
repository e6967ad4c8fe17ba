//! Sanity checks of the test-only reference implementations, and
//! library-vs-reference agreement on seeded inputs.

mod common;

use common::*;
use negcurv::order::{build1_order, build2_order};
use negcurv::{
    seek, ExactOracle, Pair, Permutation, SeekerConfig, SelectionOrder, DEFAULT_EIG_TOL,
};

#[test]
fn jacobi_reference_examples() {
    let e = jacobi_eigenvalues(&vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    let e = jacobi_eigenvalues(&vec![
        vec![1.0, -2.0, 0.0],
        vec![-2.0, 1.0, 0.0],
        vec![0.0, 0.0, 5.0],
    ]);
    assert!((e[0] + 1.0).abs() < 1e-13 && (e[2] - 5.0).abs() < 1e-13);
}

#[test]
fn library_eigenvalues_agree_with_jacobi() {
    let mut r = rng(1);
    for n in 1..=12 {
        let a = random_symmetric(&mut r, n);
        let lib = to_sym(&a).eigenvalues(DEFAULT_EIG_TOL).unwrap();
        for (x, y) in lib.iter().zip(jacobi_eigenvalues(&a)) {
            assert!((x - y).abs() < 1e-10, "n={n}: {x} vs {y}");
        }
    }
}

#[test]
fn reference_builds_match_library() {
    for p in permutations(&[0usize, 1, 2, 3, 4]) {
        let perm = Permutation::new(p.clone()).unwrap();
        let pairs = |o: SelectionOrder| o.iter().collect::<Vec<_>>();
        let want = |v: Vec<(usize, usize)>| {
            v.into_iter()
                .map(|(a, b)| Pair::new(a, b))
                .collect::<Vec<_>>()
        };
        assert_eq!(pairs(build1_order(&perm)), want(reference_build1(&p)));
        assert_eq!(pairs(build2_order(&perm)), want(reference_build2(&p)));
    }
}

#[test]
fn seek_matches_reference_detector() {
    let mut r = rng(2);
    for trial in 0..60 {
        let n = 2 + trial % 6;
        let mut a = random_symmetric(&mut r, n);
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = row[i].abs() + 0.3;
        }
        let p: Vec<usize> = (0..n).collect();
        let order = reference_build2(&p);
        let sel =
            SelectionOrder::new(n, order.iter().map(|&(x, y)| Pair::new(x, y)).collect()).unwrap();
        let m = to_sym(&a);
        let got = seek(&mut ExactOracle::new(&m), &sel, &SeekerConfig::default()).unwrap();
        let (it, lambda, _) = brute_force_seek(&a, &order, 0.0);
        assert_eq!(got.iterations, it, "trial {trial}");
        assert!((got.lambda - lambda).abs() < 1e-10, "trial {trial}");
    }
}
