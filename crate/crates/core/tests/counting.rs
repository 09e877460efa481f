use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use treedepth::counting::{count_elim_trees_with, EngineOptions};
use treedepth::graph::{dfs_elimination_forest, separator_elimination_forest, Graph};
use treedepth::oracle::{brute_count_sensible, brute_count_sensible_by_root, random_connected};
use treedepth::{count_elim_forests, count_elim_trees, CoefficientRing, RootedForest};

/// A connected graph and one of three elimination trees of it.
fn instance(max_n: usize) -> impl Strategy<Value = (Graph, RootedForest)> {
    (1..=max_n, 0usize..8, any::<u64>(), 0u8..3, Just(())).prop_map(|(n, extra, seed, kind, _)| {
        let g = random_connected(n, extra, seed);
        let t = match kind {
            0 => dfs_elimination_forest(&g),
            1 => separator_elimination_forest(&g),
            _ => {
                let mut order: Vec<usize> = (0..n).collect();
                order.rotate_left(seed as usize % n);
                RootedForest::chain(&order)
            }
        };
        (g, t)
    })
}

fn exact(g: &Graph, t: &RootedForest, d: usize) -> BigInt {
    count_elim_trees(g, t, d, &CoefficientRing::Exact, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_brute_force((g, t) in instance(6), d in 1usize..=6) {
        let want = brute_count_sensible(&g, &t, d).unwrap();
        prop_assert_eq!(exact(&g, &t, d), BigInt::from(want));
    }

    #[test]
    fn pruned_matches_reference((g, t) in instance(4), d in 1usize..=4) {
        let full = EngineOptions::unpruned(Some(g.n() + 1));
        let r = count_elim_trees_with(&g, &t, d, &CoefficientRing::Exact, None, &full).unwrap();
        prop_assert_eq!(exact(&g, &t, d), r);
    }

    #[test]
    fn free_term_ignores_cap((g, t) in instance(4), d in 1usize..=4) {
        let ring = CoefficientRing::Exact;
        let dk = EngineOptions::unpruned(None);
        let big = EngineOptions::unpruned(Some(g.n() + 1));
        prop_assert_eq!(
            count_elim_trees_with(&g, &t, d, &ring, None, &dk).unwrap(),
            count_elim_trees_with(&g, &t, d, &ring, None, &big).unwrap()
        );
    }

    #[test]
    fn reduction_commutes_with_counting(
        (g, t) in instance(6),
        d in 1usize..=6,
        m in 2u64..1_000_000,
    ) {
        let ring = CoefficientRing::modular(m);
        let got = count_elim_trees(&g, &t, d, &ring, None).unwrap();
        prop_assert_eq!(got, ring.reduce(&exact(&g, &t, d)));

        let huge = CoefficientRing::Modular(BigUint::from(u64::MAX) * 3u32 + 1u32);
        let got = count_elim_trees(&g, &t, d, &huge, None).unwrap();
        prop_assert_eq!(got, huge.reduce(&exact(&g, &t, d)));
    }

    #[test]
    fn weights_split_by_root(
        (g, t) in instance(5),
        d in 1usize..=5,
        w in prop::collection::vec(-5i64..6, 5),
    ) {
        let w: Vec<BigInt> = w[..g.n()].iter().map(|&x| BigInt::from(x)).collect();
        let per_root = brute_count_sensible_by_root(&g, &t, d).unwrap();
        let want: BigInt = per_root.iter().zip(&w).map(|(&c, x)| BigInt::from(c) * x).sum();
        let got = count_elim_trees(&g, &t, d, &CoefficientRing::Exact, Some(&w)).unwrap();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn forests_multiply((a, ta) in instance(4), (b, tb) in instance(4), d in 1usize..=4) {
        let g = a.disjoint_union(&b);
        let mut parents: Vec<Option<usize>> = ta.parents().to_vec();
        parents.extend(tb.parents().iter().map(|p| p.map(|x| x + a.n())));
        let t = RootedForest::from_parents(parents).unwrap();
        let got = count_elim_forests(&g, &t, d, &CoefficientRing::Exact, None).unwrap();
        prop_assert_eq!(got, exact(&a, &ta, d) * exact(&b, &tb, d));
    }
}

#[test]
fn larger_budget_never_counts_less() {
    for seed in 0..20 {
        let g = random_connected(6, seed as usize % 5, seed);
        let t = dfs_elimination_forest(&g);
        let counts: Vec<BigInt> = (1..=6).map(|d| exact(&g, &t, d)).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }
}

#[test]
fn rejects_bad_auxiliary_forests() {
    let g = random_connected(4, 2, 9);
    let wrong = RootedForest::from_parents(vec![None, None, None, None]).unwrap();
    assert!(count_elim_trees(&g, &wrong, 3, &CoefficientRing::Exact, None).is_err());
    let short = RootedForest::chain(&[0, 1, 2]);
    assert!(count_elim_trees(&g, &short, 3, &CoefficientRing::Exact, None).is_err());
}
