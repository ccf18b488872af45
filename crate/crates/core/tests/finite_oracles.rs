use std::collections::{BTreeSet, HashSet};

use commfiber::caps::Caps;
use commfiber::finite::{
    brute_force_fibers, builtin, character_product_residual, enumerate_group, finite_pr, frobenius_fiber, BUILTIN_NAMES,
};
use commfiber::perm::Perm;
use num_rational::Rational64;
use proptest::prelude::*;

/// Closure by repeated multiplication of everything found so far.
fn naive_closure(gens: &[Perm]) -> BTreeSet<Vec<u32>> {
    let degree = gens[0].degree();
    let mut set: HashSet<Perm> = HashSet::from([Perm::identity(degree)]);
    loop {
        let current: Vec<Perm> = set.iter().cloned().collect();
        let before = set.len();
        for a in &current {
            for g in gens {
                set.insert(a.compose(g));
            }
        }
        if set.len() == before {
            break;
        }
    }
    set.into_iter().map(|p| p.images().to_vec()).collect()
}

/// Commutator fiber sizes from permutations directly, keyed by images.
fn naive_fibers(elements: &[Perm]) -> std::collections::HashMap<Vec<u32>, u64> {
    let mut counts = std::collections::HashMap::new();
    for x in elements {
        for y in elements {
            *counts.entry(x.commutator(y).images().to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

#[test]
fn builtins_match_naive_closure() {
    let orders = [("S3", 6), ("S4", 24), ("A4", 12), ("D4", 8), ("Q8", 8), ("Z2", 2), ("Z4", 4)];
    for (name, order) in orders {
        let g = builtin(name).unwrap();
        assert_eq!(g.order(), order, "{name}");
        let naive = naive_closure(g.generators());
        let ours: BTreeSet<Vec<u32>> = g.elements().iter().map(|p| p.images().to_vec()).collect();
        assert_eq!(naive, ours, "{name}");
        let sorted: Vec<&Perm> = g.elements().iter().collect();
        assert!(sorted.windows(2).all(|w| w[0] < w[1]), "{name} elements are sorted");
    }
}

#[test]
fn class_sizes_match_full_orbits() {
    for name in BUILTIN_NAMES {
        let g = builtin(name).unwrap();
        for class in g.conjugacy_classes() {
            let rep = g.element(class.representative);
            let orbit: BTreeSet<Vec<u32>> = g
                .elements()
                .iter()
                .map(|z| z.compose(rep).compose(&z.inverse()).images().to_vec())
                .collect();
            assert_eq!(orbit.len(), class.size(), "{name}");
            assert_eq!(class.representative, *class.members.iter().min().unwrap());
            assert_eq!(g.order() % class.size(), 0);
        }
    }
    let s3: Vec<usize> = builtin("S3").unwrap().conjugacy_classes().iter().map(|c| c.size()).collect();
    assert_eq!(s3, vec![1, 3, 2]);
    let mut q8: Vec<usize> = builtin("Q8").unwrap().conjugacy_classes().iter().map(|c| c.size()).collect();
    q8.sort();
    assert_eq!(q8, vec![1, 1, 2, 2, 2]);
}

#[test]
fn frobenius_matches_naive_fibers_everywhere() {
    for name in BUILTIN_NAMES {
        let g = builtin(name).unwrap();
        let naive = naive_fibers(g.elements());
        for (i, p) in g.elements().iter().enumerate() {
            let expected = naive.get(&p.images().to_vec()).copied().unwrap_or(0);
            assert_eq!(frobenius_fiber(&g, i).unwrap(), expected, "{name} at {p}");
        }
    }
}

#[test]
fn character_tables_are_orthonormal() {
    for name in BUILTIN_NAMES {
        let g = builtin(name).unwrap();
        let t = g.character_table().unwrap();
        assert_eq!(t.len(), g.conjugacy_classes().len());
        assert_eq!(t.degrees().iter().map(|d| d * d).sum::<u64>(), g.order() as u64);
        assert!(t.row_orthogonality_error() < 1e-8, "{name}");
        assert!(t.column_orthogonality_error() < 1e-8, "{name}");
        assert_eq!(t.degree(0), 1);
    }
    let degrees = |n: &str| builtin(n).unwrap().character_table().unwrap().degrees().to_vec();
    assert_eq!(degrees("S3"), vec![1, 1, 2]);
    assert_eq!(degrees("S4"), vec![1, 1, 2, 3, 3]);
    assert_eq!(degrees("Q8"), vec![1, 1, 1, 1, 2]);
}

#[test]
fn character_product_identity_holds_exhaustively() {
    for name in ["S3", "Q8", "D4"] {
        let g = builtin(name).unwrap();
        let t = g.character_table().unwrap();
        for row in 0..t.len() {
            for a in 0..g.order() {
                for b in 0..g.order() {
                    assert!(character_product_residual(&g, t, row, a, b) < 1e-8);
                }
            }
        }
    }
}

#[test]
fn commuting_probabilities() {
    let caps = Caps::default();
    let s3 = builtin("S3").unwrap();
    assert_eq!(finite_pr(&s3, s3.identity(), &caps).unwrap(), Rational64::new(1, 2));
    let q8 = builtin("Q8").unwrap();
    assert_eq!(finite_pr(&q8, q8.identity(), &caps).unwrap(), Rational64::new(5, 8));
    let z4 = builtin("Z4").unwrap();
    assert_eq!(finite_pr(&z4, z4.identity(), &caps).unwrap(), Rational64::from_integer(1));
}

fn perm_strategy(degree: usize) -> impl Strategy<Value = Perm> {
    Just((0..degree as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|images| Perm::from_images(images).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_groups_satisfy_fiber_invariants(gens in (2usize..=5).prop_flat_map(|d| prop::collection::vec(perm_strategy(d), 1..=2))) {
        let g = enumerate_group(&gens, &Caps::default()).unwrap();
        let fibers = brute_force_fibers(&g, &Caps::default()).unwrap();
        let n = g.order() as u64;
        prop_assert_eq!(fibers.iter().sum::<u64>(), n * n);
        for class in g.conjugacy_classes() {
            let f = fibers[class.representative];
            for &m in &class.members {
                prop_assert_eq!(fibers[m], f);
            }
            prop_assert_eq!(frobenius_fiber(&g, class.representative).unwrap(), f);
        }
        prop_assert_eq!(fibers[g.identity()], n * g.conjugacy_classes().len() as u64);
    }
}
