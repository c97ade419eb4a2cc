//! Tree enumeration against brute force and the tree expansion of cumulant
//! derivatives at moderate depth.

use num::rational::BigRational;
use planc_core::{
    brute_force_trees, effective_action, enumerate_admissible, random_centered_regular, seeded_rng,
    tree_expansion, tree_expansion_to, univariate_tree_table, verify_theorem, CoreError, Scalar,
    Series, Word,
};

type Q = BigRational;

fn qi(v: i64) -> Q {
    <Q as Scalar>::from_int(v)
}

#[test]
fn enumeration_matches_brute_force_through_six_marks() {
    let expected = [1usize, 1, 3, 11, 45];
    for (i, n) in (2..=6usize).enumerate() {
        let fast = enumerate_admissible(n).unwrap();
        // brute force builds all ordered trees with >= 2-ary internal nodes
        let brute = brute_force_trees(n - 1);
        assert_eq!(fast.len(), expected[i], "count at n={n}");
        assert_eq!(brute.len(), fast.len(), "count vs brute force at n={n}");
        for (a, b) in fast.iter().zip(brute.iter()) {
            assert_eq!(a.root, *b, "canonical order at n={n}");
        }
    }
}

#[test]
fn expansion_matches_derivatives_at_moderate_depth() {
    let mut rng = seeded_rng(501);
    let k1 = random_centered_regular(&mut rng, 1, 8);
    let action1 = effective_action(&k1).unwrap();
    for report in verify_theorem(&action1, 5, 3, 0.0).unwrap() {
        assert!(
            report.passed(),
            "{}: {:?}",
            report.identity,
            report.violations.first()
        );
    }

    let k2 = random_centered_regular(&mut rng, 2, 7);
    let action2 = effective_action(&k2).unwrap();
    for report in verify_theorem(&action2, 4, 3, 0.0).unwrap() {
        assert!(
            report.passed(),
            "{}: {:?}",
            report.identity,
            report.violations.first()
        );
    }
}

#[test]
fn expansion_holds_for_constant_cumulant_sequence() {
    // all cumulants equal: a free-Poisson-style input
    let lam = 2i64;
    let entries: Vec<(Word, Q)> = (2..=8usize)
        .map(|p| (Word::repeated(1, p), qi(lam)))
        .collect();
    let k = Series::from_entries(1, 8, entries).unwrap();
    let action = effective_action(&k).unwrap();
    for report in verify_theorem(&action, 4, 4, 0.0).unwrap() {
        assert!(
            report.passed(),
            "{}: {:?}",
            report.identity,
            report.violations.first()
        );
    }
}

#[test]
fn semicircle_expansion_vanishes_beyond_the_second_derivative() {
    let k = Series::monomial(2, 6, Word::from_letters(vec![1, 1]), qi(1)).add(&Series::monomial(
        2,
        6,
        Word::from_letters(vec![2, 2]),
        qi(1),
    ));
    let action = effective_action(&k).unwrap();
    for w in [vec![1, 1, 1], vec![1, 2, 1], vec![1, 1, 2, 2]] {
        let expansion = tree_expansion(&action, &Word::from_letters(w.clone())).unwrap();
        assert!(expansion.is_zero(), "expansion for {w:?}");
    }
    for report in verify_theorem(&action, 4, 2, 0.0).unwrap() {
        assert!(report.passed(), "{}", report.identity);
    }
}

#[test]
fn capped_expansion_agrees_with_the_full_one() {
    let mut rng = seeded_rng(502);
    let k = random_centered_regular(&mut rng, 2, 6);
    let action = effective_action(&k).unwrap();
    for w in [vec![1, 2], vec![2, 1, 1], vec![1, 2, 2, 1]] {
        let word = Word::from_letters(w);
        let full = tree_expansion(&action, &word).unwrap();
        for cap in 0..=3usize {
            let capped = tree_expansion_to(&action, &word, cap).unwrap();
            assert_eq!(capped, full.truncate(cap));
        }
    }
}

#[test]
fn table_multiplicities_count_all_trees_with_signs() {
    let rows = univariate_tree_table(7).unwrap();
    // |multiplicities| at one order add up to the number of trees
    let schroeder = [1i64, 1, 3, 11, 45, 197];
    for (i, order) in (2..=7usize).enumerate() {
        let total: i64 = rows
            .iter()
            .filter(|r| r.order == order)
            .map(|r| r.multiplicity.abs())
            .sum();
        assert_eq!(total, schroeder[i], "order {order}");
    }
    assert!(matches!(
        univariate_tree_table(1),
        Err(CoreError::UnsupportedOrder { .. })
    ));
}
