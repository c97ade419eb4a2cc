//! Shifted-composition algebra and derivative-rule laws on seeded random data.

use num::rational::BigRational;
use planc_core::{
    bullet, bullet_inverse, moments_from_cumulants, prec, prelie, random_constant_free,
    random_series, random_unital, seeded_rng, succ, suite, Scalar, Series, SuiteConfig, Word,
};
use rand::Rng;

type Q = BigRational;

fn assert_same(tag: &str, lhs: &Series<Q>, rhs: &Series<Q>) {
    let (_, violations) = lhs.agree_up_to(rhs, 0.0);
    assert!(violations.is_empty(), "{tag}: {:?}", violations.first());
}

#[test]
fn products_suite_passes_across_sizes() {
    // keep the third letter at low degree: the change-of-variables checks
    // grow with alphabet^degree
    for (alphabet, degree) in [(1u8, 6usize), (2, 6), (3, 4)] {
        for seed in [1u64, 7] {
            let cfg = SuiteConfig {
                alphabet,
                degree,
                seed,
            };
            let reports = suite("products").unwrap().run(&cfg).unwrap();
            for r in &reports {
                assert!(
                    r.passed(),
                    "products n={alphabet} d={degree} seed={seed}: {} failed: {:?}",
                    r.identity,
                    r.violations.first()
                );
            }
        }
    }
}

#[test]
fn shifted_composition_is_a_group_on_unital_series() {
    let mut rng = seeded_rng(201);
    for rep in 0..10 {
        let n = rng.gen_range(1..=3u8);
        let f = random_unital(&mut rng, n, 6);
        let g = random_unital(&mut rng, n, 6);
        let h = random_unital(&mut rng, n, 6);
        assert_same(
            &format!("assoc[{rep}]"),
            &bullet(&bullet(&f, &g).unwrap(), &h).unwrap(),
            &bullet(&f, &bullet(&g, &h).unwrap()).unwrap(),
        );
        let one = Series::<Q>::one(n, 6);
        assert_same(&format!("unit[{rep}]"), &bullet(&f, &one).unwrap(), &f);
        assert_same(&format!("unit'[{rep}]"), &bullet(&one, &f).unwrap(), &f);
        let inv = bullet_inverse(&f).unwrap();
        assert_same(&format!("inv[{rep}]"), &bullet(&f, &inv).unwrap(), &one);
        assert_same(&format!("inv'[{rep}]"), &bullet(&inv, &f).unwrap(), &one);
    }
}

#[test]
fn half_products_decompose_the_group_product() {
    let mut rng = seeded_rng(202);
    for rep in 0..10 {
        let n = rng.gen_range(1..=3u8);
        let f = random_series(&mut rng, n, 6, 0);
        let g = random_unital(&mut rng, n, 6);
        let h = random_unital(&mut rng, n, 6);
        assert_same(
            &format!("split[{rep}]"),
            &bullet(&f, &g).unwrap(),
            &prec(&f, &g).unwrap().add(&succ(&f, &g).unwrap()),
        );
        assert_same(
            &format!("module[{rep}]"),
            &prec(&prec(&f, &g).unwrap(), &h).unwrap(),
            &prec(&f, &bullet(&g, &h).unwrap()).unwrap(),
        );
    }
}

#[test]
fn prelie_identity_and_bracket_jacobi_hold() {
    let mut rng = seeded_rng(203);
    for rep in 0..10 {
        let n = rng.gen_range(1..=3u8);
        let a = random_constant_free(&mut rng, n, 6);
        let b = random_constant_free(&mut rng, n, 6);
        let c = random_constant_free(&mut rng, n, 6);
        let lhs = prelie(&a, &prelie(&b, &c).unwrap())
            .unwrap()
            .sub(&prelie(&prelie(&a, &b).unwrap(), &c).unwrap());
        let rhs = prelie(&a, &prelie(&c, &b).unwrap())
            .unwrap()
            .sub(&prelie(&prelie(&a, &c).unwrap(), &b).unwrap());
        assert_same(&format!("prelie[{rep}]"), &lhs, &rhs);

        let br = |x: &Series<Q>, y: &Series<Q>| prelie(x, y).unwrap().sub(&prelie(y, x).unwrap());
        let jacobi = br(&br(&a, &b), &c)
            .add(&br(&br(&b, &c), &a))
            .add(&br(&br(&c, &a), &b));
        assert!(jacobi.is_zero(), "jacobi[{rep}]");
    }
}

#[test]
fn univariate_bracket_of_powers_is_frozen() {
    // [x^p, x^q] = (p - q) x^{p+q} for the pre-Lie commutator bracket
    for p in 1..=3usize {
        for q in 1..=3usize {
            let d = p + q;
            let xp = Series::<Q>::monomial(1, d, Word::repeated(1, p), <Q as Scalar>::one());
            let xq = Series::<Q>::monomial(1, d, Word::repeated(1, q), <Q as Scalar>::one());
            let bracket = prelie(&xp, &xq).unwrap().sub(&prelie(&xq, &xp).unwrap());
            let expect = Series::<Q>::monomial(
                1,
                d,
                Word::repeated(1, p + q),
                <Q as Scalar>::from_int(p as i64 - q as i64),
            );
            assert_same(&format!("bracket[{p},{q}]"), &bracket, &expect);
        }
    }
}

#[test]
fn derivative_rules_hold_on_random_data() {
    let mut rng = seeded_rng(204);
    for rep in 0..10 {
        let n = rng.gen_range(1..=3u8);
        let f = random_series(&mut rng, n, 6, 0);
        let g = random_series(&mut rng, n, 6, 0);
        let u = random_unital(&mut rng, n, 6);
        for letter in 1..=n {
            assert_same(
                &format!("leibniz[{rep},{letter}]"),
                &f.cauchy(&g).left_derivative(letter),
                &f.left_derivative(letter)
                    .cauchy(&g)
                    .add(&g.left_derivative(letter).scale(&f.constant_term())),
            );
            assert_same(
                &format!("prec-derivative[{rep},{letter}]"),
                &prec(&f, &u).unwrap().left_derivative(letter),
                &bullet(&f.left_derivative(letter), &u).unwrap(),
            );
        }
    }
}

#[test]
fn moment_series_solves_the_fixed_point_equation() {
    let mut rng = seeded_rng(205);
    for rep in 0..10 {
        let n = rng.gen_range(1..=3u8);
        let k = random_constant_free(&mut rng, n, 6);
        let m = moments_from_cumulants(&k).unwrap();
        let residual = m.sub(&Series::one(n, 6)).sub(&prec(&k, &m).unwrap());
        assert!(
            residual.is_zero(),
            "residual[{rep}] {:?}",
            residual.support().next()
        );
        for letter in 1..=n {
            assert_same(
                &format!("moment-derivative[{rep},{letter}]"),
                &m.left_derivative(letter),
                &bullet(&k.left_derivative(letter), &m).unwrap(),
            );
        }
    }
}

#[test]
fn half_products_require_unital_right_factor() {
    let mut rng = seeded_rng(206);
    let f = random_series(&mut rng, 2, 4, 0);
    let g0 = random_constant_free(&mut rng, 2, 4);
    assert!(prec(&f, &g0).is_err());
    assert!(succ(&f, &g0).is_err());
    assert!(bullet(&f, &g0).is_err());
    assert!(bullet_inverse(&g0).is_err());
}
