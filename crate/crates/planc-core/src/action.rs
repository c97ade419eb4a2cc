//! Effective action of a centered cumulant series.
//!
//! For a centered K over y with invertible covariance (the n x n matrix of
//! degree-2 coefficients), the conjugate field is Phi = (d_1 K, ..., d_n K).
//! Its compositional inverse Psi expresses the y variables in the phi
//! variables, and the effective action is the series
//!     L = sum_i phi_i * Psi_i          (letter i on the left)
//! over the phi alphabet, so that d_i L = Psi_i by construction. The
//! verifiers below check the Legendre-transform identities that tie L and K
//! together; every identity is compared in the single y alphabet by
//! composing phi-side factors with Phi first.

use crate::error::CoreError;
use crate::field::{differential_field, invert_field, Field};
use crate::matrix::SquareMatrix;
use crate::report::VerifyReport;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::word::{Letter, Word};

#[derive(Clone, Debug)]
pub struct EffectiveAction<S: Scalar> {
    /// The input cumulant series K, read in the y alphabet.
    pub cumulants: Series<S>,
    /// Phi = (d_1 K, ..., d_n K), components over y, precision D - 1.
    pub conjugate: Field<S>,
    /// Psi = Phi^{-1}, components over phi, precision D - 1.
    pub inverse: Field<S>,
    /// L = sum_i phi_i Psi_i over the phi alphabet, precision D.
    pub ell: Series<S>,
    /// Degree-2 coefficient matrix of K: entry (i, j) = k_{ij}.
    pub covariance: SquareMatrix<S>,
    /// Inverse covariance; equals the degree-2 coefficient matrix of L.
    pub covariance_inverse: SquareMatrix<S>,
}

fn require_centered<S: Scalar>(k: &Series<S>) -> Result<(), CoreError> {
    if !k.in_g0() {
        return Err(CoreError::NotConstantFree {
            found: k.constant_term().render(),
        });
    }
    for i in 1..=k.alphabet() {
        let c = k.coefficient(&Word::single(i));
        if !c.is_zero() {
            return Err(CoreError::NotCentered {
                letter: i,
                found: c.render(),
            });
        }
    }
    Ok(())
}

/// The conjugate field Phi = (d_1 K, ..., d_n K). Requires K centered.
pub fn conjugate_field<S: Scalar>(k: &Series<S>) -> Result<Field<S>, CoreError> {
    require_centered(k)?;
    Ok(differential_field(k))
}

/// The matrix of degree-2 coefficients k_{ij}.
pub fn covariance_matrix<S: Scalar>(k: &Series<S>) -> SquareMatrix<S> {
    let n = k.alphabet() as usize;
    SquareMatrix::from_fn(n, |i, j| {
        k.coefficient(&Word::from_letters(vec![
            (i + 1) as Letter,
            (j + 1) as Letter,
        ]))
    })
}

/// Regularity: centered with invertible covariance. Float covariance must
/// also be well-conditioned.
pub fn is_regular<S: Scalar>(k: &Series<S>) -> bool {
    require_centered(k).is_ok() && covariance_matrix(k).invert().is_ok()
}

/// Builds the full effective-action bundle. Errors on a non-centered K or a
/// singular (or, for floats, ill-conditioned) covariance.
pub fn effective_action<S: Scalar>(k: &Series<S>) -> Result<EffectiveAction<S>, CoreError> {
    require_centered(k)?;
    if k.max_degree() < 2 {
        return Err(CoreError::PrecisionTooLow {
            needed: 2,
            have: k.max_degree(),
        });
    }
    let covariance = covariance_matrix(k);
    let covariance_inverse = covariance.invert().map_err(|e| match e {
        CoreError::SingularMatrix => CoreError::SingularCovariance,
        other => other,
    })?;
    let conjugate = differential_field(k);
    let inverse = invert_field(&conjugate)?;
    let n = k.alphabet();
    let mut ell = Series::zero(n, k.max_degree());
    for i in 1..=n {
        ell = ell.add(&inverse.component(i).letter_mul(i));
    }
    Ok(EffectiveAction {
        cumulants: k.clone(),
        conjugate,
        inverse,
        ell,
        covariance,
        covariance_inverse,
    })
}

/// Coefficient of L at a word of phi letters; the iterated left derivative
/// of L at 0.
pub fn l_coefficient<S: Scalar>(action: &EffectiveAction<S>, w: &Word) -> S {
    action.ell.coefficient(w)
}

/// Legendre inversion identities plus the construction identities:
///   dL o dK = y,  dK o dL = phi,  K = sum_i y_i phi_i,
///   L o Phi + K = sum_i (phi_i y_i + y_i phi_i).
pub fn verify_legendre<S: Scalar>(
    action: &EffectiveAction<S>,
    tol: f64,
) -> Result<Vec<VerifyReport>, CoreError> {
    let n = action.cumulants.alphabet();
    let d = action.cumulants.max_degree();
    let mut reports = Vec::new();

    let letters = Field::letters(n, d.saturating_sub(1));
    let psi_of_phi = action.inverse.compose(&action.conjugate)?;
    for i in 1..=n {
        reports.push(VerifyReport::compare_series(
            format!("legendre_dL_o_dK_is_y[i={i}]"),
            psi_of_phi.component(i),
            letters.component(i),
            tol,
        ));
    }
    let phi_of_psi = action.conjugate.compose(&action.inverse)?;
    for i in 1..=n {
        reports.push(VerifyReport::compare_series(
            format!("legendre_dK_o_dL_is_phi[i={i}]"),
            phi_of_psi.component(i),
            letters.component(i),
            tol,
        ));
    }

    // K = sum_i y_i phi_i, exact at full precision D.
    let mut sum = Series::zero(n, d);
    for i in 1..=n {
        sum = sum.add(&action.conjugate.component(i).letter_mul(i));
    }
    reports.push(VerifyReport::compare_series(
        "cumulants_equal_sum_y_i_phi_i",
        &action.cumulants,
        &sum,
        tol,
    ));

    // L o Phi + K = sum_i (phi_i y_i + y_i phi_i).
    let l_of_phi = action.ell.compose(&action.conjugate)?;
    let lhs = l_of_phi.add(&action.cumulants);
    let mut rhs = Series::zero(n, d.saturating_sub(1));
    for i in 1..=n {
        let phi_i = action.conjugate.component(i);
        let letter = Series::letter(n, phi_i.max_degree(), i);
        rhs = rhs.add(&phi_i.cauchy(&letter)).add(&letter.cauchy(phi_i));
    }
    reports.push(VerifyReport::compare_series(
        "action_plus_cumulants_equal_mixed_sum",
        &lhs,
        &rhs,
        tol,
    ));

    Ok(reports)
}

/// Matrix identities between second derivatives:
///   sum_l (L_{phi_l phi_j} o Phi) * K_{y_i y_l} = delta_{ji}
///   sum_l K_{y_l y_j} * (L_{phi_i phi_l} o Phi) = delta_{ji}
/// plus the degree-0 statement that L's quadratic coefficient matrix is the
/// inverse covariance.
pub fn verify_two_point<S: Scalar>(
    action: &EffectiveAction<S>,
    tol: f64,
) -> Result<Vec<VerifyReport>, CoreError> {
    let n = action.cumulants.alphabet();
    let d = action.cumulants.max_degree();
    if d < 2 {
        return Err(CoreError::PrecisionTooLow { needed: 2, have: d });
    }
    let mut reports = Vec::new();

    // Second-derivative caches in both variables.
    let mut l_phi = vec![vec![None; n as usize]; n as usize];
    let mut k_yy = vec![vec![None; n as usize]; n as usize];
    for a in 1..=n {
        for b in 1..=n {
            let lw = action
                .ell
                .iterated_derivative(&Word::from_letters(vec![a, b]));
            l_phi[(a - 1) as usize][(b - 1) as usize] = Some(lw.compose(&action.conjugate)?);
            k_yy[(a - 1) as usize][(b - 1) as usize] = Some(
                action
                    .cumulants
                    .iterated_derivative(&Word::from_letters(vec![a, b])),
            );
        }
    }
    let l_phi = |a: Letter, b: Letter| l_phi[(a - 1) as usize][(b - 1) as usize].clone().unwrap();
    let k_yy = |a: Letter, b: Letter| k_yy[(a - 1) as usize][(b - 1) as usize].clone().unwrap();

    for j in 1..=n {
        for i in 1..=n {
            let delta = if i == j { S::one() } else { S::zero() };
            let expect = Series::constant(n, d - 2, delta.clone());

            let mut lhs1 = Series::zero(n, d - 2);
            for l in 1..=n {
                lhs1 = lhs1.add(&l_phi(l, j).cauchy(&k_yy(i, l)));
            }
            reports.push(VerifyReport::compare_series(
                format!("two_point_matrix1[j={j},i={i}]"),
                &lhs1,
                &expect,
                tol,
            ));

            let mut lhs2 = Series::zero(n, d - 2);
            for l in 1..=n {
                lhs2 = lhs2.add(&k_yy(l, j).cauchy(&l_phi(i, l)));
            }
            reports.push(VerifyReport::compare_series(
                format!("two_point_matrix2[j={j},i={i}]"),
                &lhs2,
                &expect,
                tol,
            ));
        }
    }

    for l in 1..=n {
        for j in 1..=n {
            let coeff = action.ell.coefficient(&Word::from_letters(vec![l, j]));
            reports.push(VerifyReport::compare_scalars(
                format!("two_point_quadratic_is_inverse_covariance[l={l},j={j}]"),
                &Word::from_letters(vec![l, j]),
                &coeff,
                action
                    .covariance_inverse
                    .get((l - 1) as usize, (j - 1) as usize),
                tol,
            ));
        }
    }

    Ok(reports)
}

/// Third-derivative identity: for all p, j, k,
///   d(K_{y_p y_j}) / d phi_k = - sum_{l,i} K(0)_{y_l y_j}
///                                * (L_{phi_i phi_l phi_k} o Phi) * K_{y_p y_i}
/// where the left side applies the operator
///   d/d phi_k = sum_m (L_{phi_m phi_k} o Phi) * d/d y_m.
pub fn verify_three_point<S: Scalar>(
    action: &EffectiveAction<S>,
    tol: f64,
) -> Result<Vec<VerifyReport>, CoreError> {
    let n = action.cumulants.alphabet();
    let d = action.cumulants.max_degree();
    if d < 3 {
        return Err(CoreError::PrecisionTooLow { needed: 3, have: d });
    }
    let mut reports = Vec::new();

    let k_yy = |a: Letter, b: Letter| {
        action
            .cumulants
            .iterated_derivative(&Word::from_letters(vec![a, b]))
    };

    for p in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let mut lhs = Series::zero(n, d - 3);
                for m in 1..=n {
                    let coefficient = action
                        .ell
                        .iterated_derivative(&Word::from_letters(vec![m, k]))
                        .compose(&action.conjugate)?;
                    let dk = k_yy(p, j).left_derivative(m);
                    lhs = lhs.add(&coefficient.cauchy(&dk));
                }

                let mut rhs = Series::zero(n, d - 3);
                for l in 1..=n {
                    let k0 = action
                        .cumulants
                        .coefficient(&Word::from_letters(vec![l, j]));
                    if k0.is_zero() {
                        continue;
                    }
                    for i in 1..=n {
                        let l3 = action
                            .ell
                            .iterated_derivative(&Word::from_letters(vec![i, l, k]))
                            .compose(&action.conjugate)?;
                        let term = l3.cauchy(&k_yy(p, i)).scale(&k0);
                        rhs = rhs.add(&term);
                    }
                }
                let rhs = rhs.neg();

                reports.push(VerifyReport::compare_series(
                    format!("three_point[p={p},j={j},k={k}]"),
                    &lhs,
                    &rhs,
                    tol,
                ));
            }
        }
    }

    Ok(reports)
}

/// Evaluates one printed univariate relation between k-coefficients and
/// 1PI coefficients, exactly as printed (orders 2..6), and reports both
/// sides verbatim. The relation text is embedded in the identity name.
pub fn univariate_relation_check<S: Scalar>(
    k: &Series<S>,
    order: usize,
    tol: f64,
) -> Result<VerifyReport, CoreError> {
    if k.alphabet() != 1 {
        return Err(CoreError::NotUnivariate {
            alphabet: k.alphabet(),
        });
    }
    if !(2..=6).contains(&order) {
        return Err(CoreError::UnsupportedOrder { order });
    }
    if k.max_degree() < order {
        return Err(CoreError::PrecisionTooLow {
            needed: order,
            have: k.max_degree(),
        });
    }
    let action = effective_action(k)?;
    let kk = |d: usize| k.coefficient(&Word::repeated(1, d));
    let ll = |d: usize| action.ell.coefficient(&Word::repeated(1, d));
    let k2 = kk(2);
    let k2_inv = k2.recip().map_err(|_| CoreError::SingularCovariance)?;

    let mut k2_inv_pow = S::one();
    for _ in 0..order {
        k2_inv_pow = k2_inv_pow.times(&k2_inv);
    }
    let lhs = kk(order).times(&k2_inv_pow);

    let (formula, rhs) = match order {
        2 => ("l2 = k2^-1".to_string(), ll(2)),
        3 => ("k3*k2^-3 = -l3".to_string(), ll(3).negated()),
        4 => (
            "k4*k2^-4 = -l4 + 2*l3*k2*l3".to_string(),
            ll(4)
                .negated()
                .plus(&S::from_int(2).times(&ll(3)).times(&k2).times(&ll(3))),
        ),
        5 => (
            "k5*k2^-5 = -l5 - 5*l4*k2*l3".to_string(),
            ll(5)
                .negated()
                .minus(&S::from_int(5).times(&ll(4)).times(&k2).times(&ll(3))),
        ),
        6 => (
            "k6*k2^-6 = -l6 + 6*l5*k2*l3 + 6*l4*k2*l4 - 14*l3*k2*l3*k2*l3".to_string(),
            {
                let t1 = ll(6).negated();
                let t2 = S::from_int(6).times(&ll(5)).times(&k2).times(&ll(3));
                let t3 = S::from_int(6).times(&ll(4)).times(&k2).times(&ll(4));
                let t4 = S::from_int(14)
                    .times(&ll(3))
                    .times(&k2)
                    .times(&ll(3))
                    .times(&k2)
                    .times(&ll(3));
                t1.plus(&t2).plus(&t3).minus(&t4)
            },
        ),
        _ => unreachable!(),
    };

    Ok(VerifyReport::compare_scalars(
        format!("univariate_order{order}_as_printed[{formula}]"),
        &Word::repeated(1, order),
        &lhs,
        &rhs,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::BigRational;

    type Q = BigRational;

    fn qi(v: i64) -> Q {
        <Q as Scalar>::from_int(v)
    }

    fn w(letters: &[u8]) -> Word {
        Word::from_slice(letters)
    }

    fn univariate_k(pairs: &[(usize, i64)], d: usize) -> Series<Q> {
        Series::from_entries(
            1,
            d,
            pairs
                .iter()
                .map(|&(deg, v)| (Word::repeated(1, deg), qi(v)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn conjugate_field_strips_one_letter() {
        // K = y^2 + c y^3 -> phi = y + c y^2
        let k = univariate_k(&[(2, 1), (3, 7)], 4);
        let phi = conjugate_field(&k).unwrap();
        let p = phi.component(1);
        assert_eq!(p.coefficient(&w(&[1])), qi(1));
        assert_eq!(p.coefficient(&w(&[1, 1])), qi(7));
        assert_eq!(p.max_degree(), 3);
    }

    #[test]
    fn conjugate_field_requires_centered() {
        let k = univariate_k(&[(1, 1), (2, 1)], 3);
        assert!(matches!(
            conjugate_field(&k),
            Err(CoreError::NotCentered { letter: 1, .. })
        ));
    }

    #[test]
    fn regularity_detects_singular_covariance() {
        assert!(!is_regular(&Series::<Q>::zero(2, 3)));
        let k = Series::from_entries(2, 3, vec![(w(&[1, 1]), qi(1)), (w(&[2, 2]), qi(1))]).unwrap();
        assert!(is_regular(&k));
        assert!(matches!(
            effective_action(&Series::<Q>::zero(2, 3)),
            Err(CoreError::SingularCovariance)
        ));
    }

    #[test]
    fn semicircle_effective_action_is_quadratic() {
        let k = univariate_k(&[(2, 1)], 5);
        let a = effective_action(&k).unwrap();
        assert_eq!(a.ell.coefficient(&w(&[1, 1])), qi(1));
        assert_eq!(a.ell.support_len(), 1, "L = phi^2 exactly: {:?}", a.ell);
    }

    #[test]
    fn cubic_and_quartic_l_coefficients() {
        // k2 = 1, k3 = c -> l3 = -c; adding k4 = d -> l4 = 2c^2 - d.
        let c = 3i64;
        let d = -2i64;
        let k = univariate_k(&[(2, 1), (3, c), (4, d)], 5);
        let a = effective_action(&k).unwrap();
        assert_eq!(l_coefficient(&a, &Word::repeated(1, 3)), qi(-c));
        assert_eq!(l_coefficient(&a, &Word::repeated(1, 4)), qi(2 * c * c - d));
        assert!(l_coefficient(&a, &Word::empty()).is_zero());
    }

    #[test]
    fn legendre_identities_hold_univariate() {
        let k = univariate_k(&[(2, 1), (3, 2), (4, -1), (5, 3)], 5);
        let a = effective_action(&k).unwrap();
        for r in verify_legendre(&a, 0.0).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.identity, r.violations);
        }
    }

    #[test]
    fn two_point_identities_hold() {
        let k = Series::from_entries(
            2,
            4,
            vec![
                (w(&[1, 1]), qi(1)),
                (w(&[1, 2]), qi(1)),
                (w(&[2, 1]), qi(-1)),
                (w(&[2, 2]), qi(2)),
                (w(&[1, 2, 1]), qi(3)),
                (w(&[2, 2, 2]), qi(1)),
            ],
        )
        .unwrap();
        let a = effective_action(&k).unwrap();
        for r in verify_two_point(&a, 0.0).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.identity, r.violations);
        }
    }

    #[test]
    fn three_point_univariate_value_is_k3() {
        // k2 = 1, k3 = c: at y = 0 both sides must equal c.
        let c = 5i64;
        let k = univariate_k(&[(2, 1), (3, c)], 4);
        let a = effective_action(&k).unwrap();
        let reports = verify_three_point(&a, 0.0).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].passed(), "{:?}", reports[0].violations);

        // recompute the left side constant term by hand: it is c
        let l11_phi = a
            .ell
            .iterated_derivative(&w(&[1, 1]))
            .compose(&a.conjugate)
            .unwrap();
        let dk = a
            .cumulants
            .iterated_derivative(&w(&[1, 1]))
            .left_derivative(1);
        let lhs0 = l11_phi.cauchy(&dk).constant_term();
        assert_eq!(lhs0, qi(c));
    }

    #[test]
    fn printed_relations_hold_through_order_four() {
        let k = univariate_k(&[(2, 1), (3, 2), (4, 7), (5, -3), (6, 4)], 6);
        for order in 2..=4 {
            let r = univariate_relation_check(&k, order, 0.0).unwrap();
            assert!(r.passed(), "order {order}: {:?}", r.violations);
        }
    }

    #[test]
    fn printed_relation_order3_halves_example() {
        // k2 = 1, k3 = 1/2: order 3 reads 1/2 = -(-1/2).
        let half = BigRational::new(num::BigInt::from(1), num::BigInt::from(2));
        let k =
            Series::from_entries(1, 3, vec![(w(&[1, 1]), qi(1)), (w(&[1, 1, 1]), half)]).unwrap();
        let r = univariate_relation_check(&k, 3, 0.0).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
    }
}
