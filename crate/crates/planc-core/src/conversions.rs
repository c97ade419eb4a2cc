//! Conversion between moment and cumulant generating series.
//!
//! The two series determine each other through the functional equation
//!     M = 1 + K ≺ M,    i.e.   M(x) = 1 + K(x M(x)).
//! Reading it coefficientwise gives the first-block recursion: for a word
//! w = w_1..w_m, picking the positions 1 = s_1 < s_2 < ... < s_p marked by
//! the letters that come from K,
//!     m_w = sum over subsets S of {2..m}, with positions {1} ∪ S,
//!           k_{w_{s_1} w_{s_2} .. w_{s_p}} * prod_l m_(gap after s_l)
//! where the l-th gap is the word strictly between s_l and s_{l+1} (the last
//! gap runs to the end) and m of the empty word is 1. The p = m term is
//! k_w itself, so the same sum inverts triangularly by degree.
//!
//! Both conversion directions run this recursion; the fixed-point iteration
//! of the functional equation is kept alongside as an independent route and
//! must agree with it (see tests and the verification suites).

use crate::error::CoreError;
use crate::field::{integral_field, invert_field, Field};
use crate::products::prec;
use crate::report::VerifyReport;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::word::{words_up_to, Letter, Word};
use std::collections::BTreeMap;

fn require_g1<S: Scalar>(m: &Series<S>) -> Result<(), CoreError> {
    if !m.in_g1() {
        return Err(CoreError::NotUnital {
            found: m.constant_term().render(),
        });
    }
    Ok(())
}

fn require_g0<S: Scalar>(k: &Series<S>) -> Result<(), CoreError> {
    if !k.in_g0() {
        return Err(CoreError::NotConstantFree {
            found: k.constant_term().render(),
        });
    }
    Ok(())
}

/// One first-block term: k over the marked subsequence times the product of
/// moment values over the gaps. `lookup_m` must already know every word of
/// degree below |w|.
fn first_block_sum<S: Scalar>(
    w: &Word,
    keep_full_block: bool,
    lookup_k: &impl Fn(&Word) -> S,
    lookup_m: &impl Fn(&Word) -> S,
) -> S {
    let letters = w.letters();
    let m = letters.len();
    debug_assert!(m >= 1);
    let mut acc = S::zero();
    // bitmask over positions 2..m; position 1 is always marked
    for mask in 0u64..(1u64 << (m - 1)) {
        let mut marked: Vec<usize> = vec![0];
        for bit in 0..(m - 1) {
            if mask & (1 << bit) != 0 {
                marked.push(bit + 1);
            }
        }
        if !keep_full_block && marked.len() == m {
            continue;
        }
        let block: Vec<Letter> = marked.iter().map(|&p| letters[p]).collect();
        let k_val = lookup_k(&Word::from_letters(block));
        if k_val.is_zero() {
            continue;
        }
        let mut term = k_val;
        for (idx, &s) in marked.iter().enumerate() {
            let gap_end = if idx + 1 < marked.len() {
                marked[idx + 1]
            } else {
                m
            };
            if s + 1 < gap_end {
                let gap = Word::from_slice(&letters[s + 1..gap_end]);
                term = term.times(&lookup_m(&gap));
                if term.is_zero() {
                    break;
                }
            }
        }
        acc = acc.plus(&term);
    }
    acc
}

/// Moments from cumulants: solves M = 1 + K ≺ M degree by degree via the
/// first-block recursion. Requires K constant-free.
pub fn moments_from_cumulants<S: Scalar>(k: &Series<S>) -> Result<Series<S>, CoreError> {
    require_g0(k)?;
    let n = k.alphabet();
    let d = k.max_degree();
    let mut m_values: BTreeMap<Word, S> = BTreeMap::new();
    m_values.insert(Word::empty(), S::one());
    for w in words_up_to(n, d).into_iter().skip(1) {
        let value = first_block_sum(&w, true, &|kw| k.coefficient(kw), &|mw| {
            m_values.get(mw).cloned().unwrap_or_else(S::zero)
        });
        m_values.insert(w, value);
    }
    Ok(Series::from_map(n, d, m_values))
}

/// Cumulants from moments: the same recursion solved for the full block,
///     k_w = m_w - (all first-block terms with a proper subsequence).
/// Requires M unital.
pub fn cumulants_from_moments<S: Scalar>(m: &Series<S>) -> Result<Series<S>, CoreError> {
    require_g1(m)?;
    let n = m.alphabet();
    let d = m.max_degree();
    let mut k_values: BTreeMap<Word, S> = BTreeMap::new();
    for w in words_up_to(n, d).into_iter().skip(1) {
        let lower = first_block_sum(
            &w,
            false,
            &|kw| k_values.get(kw).cloned().unwrap_or_else(S::zero),
            &|mw| m.coefficient(mw),
        );
        k_values.insert(w.clone(), m.coefficient(&w).minus(&lower));
    }
    Ok(Series::from_map(n, d, k_values))
}

/// Moments from cumulants by literally iterating M <- 1 + K ≺ M from M = 1.
/// Each pass is exact one degree further; D passes pin everything. Kept as
/// the independent second route to the same object.
pub fn moments_from_cumulants_fixed_point<S: Scalar>(
    k: &Series<S>,
) -> Result<Series<S>, CoreError> {
    require_g0(k)?;
    let d = k.max_degree();
    let one = Series::one(k.alphabet(), d);
    let mut m = one.clone();
    for _ in 0..d {
        m = one.add(&prec(k, &m)?);
    }
    Ok(m)
}

/// The change-of-variables field y_i = x_i M(x), at precision D + 1.
pub fn y_field<S: Scalar>(m: &Series<S>) -> Result<Field<S>, CoreError> {
    require_g1(m)?;
    Ok(integral_field(m))
}

/// Rewrites f as a series in the variables y_i = x_i M(x): returns f^M with
/// compose(f^M, y_field(M)) = f, computed through the inverse field of y.
pub fn rewrite_in_y<S: Scalar>(f: &Series<S>, m: &Series<S>) -> Result<Series<S>, CoreError> {
    let y = y_field(m)?;
    let x_of_y = invert_field(&y)?;
    f.compose(&x_of_y)
}

/// Independent low-degree oracle: checks the classical displayed relations
///     m_{j1} = k_{j1}
///     m_{j1 j2} = k_{j1} m_{j2} + k_{j1 j2}
///     m_{j1 j2 j3} = k_{j1} m_{j2 j3} + k_{j1 j2} m_{j3}
///                    + k_{j1 j3} m_{j2} + k_{j1 j2 j3}
///     m_{j1 j2 j3 j4} = k_{j1} m_{j2 j3 j4} + k_{j1 j2} m_{j3 j4}
///                    + k_{j1 j3} m_{j2} m_{j4} + k_{j1 j4} m_{j2 j3}
///                    + k_{j1 j2 j3} m_{j4} + k_{j1 j2 j4} m_{j3}
///                    + k_{j1 j3 j4} m_{j2} + k_{j1 j2 j3 j4}
/// for every index tuple over the alphabet, written out literally rather
/// than routed through the solver.
pub fn lowdegree_oracle_check<S: Scalar>(m: &Series<S>, k: &Series<S>, tol: f64) -> VerifyReport {
    assert_eq!(m.alphabet(), k.alphabet(), "alphabet mismatch");
    let n = m.alphabet();
    let depth = 4usize.min(m.max_degree()).min(k.max_degree());
    let mc = |letters: &[Letter]| m.coefficient(&Word::from_slice(letters));
    let kc = |letters: &[Letter]| k.coefficient(&Word::from_slice(letters));

    let mut lhs_rhs: Vec<(Word, S, S)> = Vec::new();
    for w in words_up_to(n, depth).into_iter() {
        let j = w.letters();
        let rhs = match j.len() {
            0 => S::one(),
            1 => kc(&[j[0]]),
            2 => kc(&[j[0]]).times(&mc(&[j[1]])).plus(&kc(&[j[0], j[1]])),
            3 => kc(&[j[0]])
                .times(&mc(&[j[1], j[2]]))
                .plus(&kc(&[j[0], j[1]]).times(&mc(&[j[2]])))
                .plus(&kc(&[j[0], j[2]]).times(&mc(&[j[1]])))
                .plus(&kc(&[j[0], j[1], j[2]])),
            4 => kc(&[j[0]])
                .times(&mc(&[j[1], j[2], j[3]]))
                .plus(&kc(&[j[0], j[1]]).times(&mc(&[j[2], j[3]])))
                .plus(&kc(&[j[0], j[2]]).times(&mc(&[j[1]])).times(&mc(&[j[3]])))
                .plus(&kc(&[j[0], j[3]]).times(&mc(&[j[1], j[2]])))
                .plus(&kc(&[j[0], j[1], j[2]]).times(&mc(&[j[3]])))
                .plus(&kc(&[j[0], j[1], j[3]]).times(&mc(&[j[2]])))
                .plus(&kc(&[j[0], j[2], j[3]]).times(&mc(&[j[1]])))
                .plus(&kc(&[j[0], j[1], j[2], j[3]])),
            _ => unreachable!("depth capped at 4"),
        };
        lhs_rhs.push((w.clone(), m.coefficient(&w), rhs));
    }

    VerifyReport {
        identity: "lowdegree_moment_cumulant_relations".to_string(),
        max_checked_degree: depth,
        violations: lhs_rhs
            .into_iter()
            .filter(|(_, a, b)| !a.approx_eq(b, tol))
            .map(|(w, a, b)| crate::report::Violation {
                word: w.letters().to_vec(),
                lhs: a.render(),
                rhs: b.render(),
            })
            .collect(),
    }
}
