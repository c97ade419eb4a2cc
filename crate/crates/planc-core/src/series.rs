//! Truncated non-commutative formal power series.
//!
//! A `Series` holds finitely many word-indexed coefficients together with a
//! precision `max_degree`: coefficients of every word of degree <= max_degree
//! are exactly the stored values (absent means zero), and nothing is claimed
//! about higher degrees. Operations track precision honestly:
//! - binary operations truncate to the smaller operand precision;
//! - the left derivative lowers precision by one (saturating at zero);
//! - left multiplication by a letter raises it by one.
//!
//! Invariants:
//! - every stored word is valid for the alphabet and has degree <= max_degree;
//! - no stored coefficient is zero (trimmed form), so equality is structural;
//! - 1 <= alphabet <= 255.

use crate::error::CoreError;
use crate::field::Field;
use crate::scalar::Scalar;
use crate::word::{Letter, Word};
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Debug)]
pub struct Series<S: Scalar> {
    alphabet: u8,
    max_degree: usize,
    coeffs: BTreeMap<Word, S>,
}

impl<S: Scalar> Series<S> {
    pub fn zero(alphabet: u8, max_degree: usize) -> Self {
        assert!(alphabet >= 1, "alphabet must be nonempty");
        Series {
            alphabet,
            max_degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(alphabet: u8, max_degree: usize) -> Self {
        Self::constant(alphabet, max_degree, S::one())
    }

    pub fn constant(alphabet: u8, max_degree: usize, c: S) -> Self {
        let mut s = Self::zero(alphabet, max_degree);
        if !c.is_zero() {
            s.coeffs.insert(Word::empty(), c);
        }
        s
    }

    /// The series x_i. If max_degree = 0 the term is beyond precision and
    /// the result stores nothing.
    pub fn letter(alphabet: u8, max_degree: usize, i: Letter) -> Self {
        Self::monomial(alphabet, max_degree, Word::single(i), S::one())
    }

    /// c * x_w; terms beyond max_degree are dropped (truncation semantics).
    pub fn monomial(alphabet: u8, max_degree: usize, w: Word, c: S) -> Self {
        let mut s = Self::zero(alphabet, max_degree);
        w.validate(alphabet)
            .unwrap_or_else(|e| panic!("invalid monomial word: {e}"));
        if !c.is_zero() && w.degree() <= max_degree {
            s.coeffs.insert(w, c);
        }
        s
    }

    /// Builds a series from (word, value) entries. Duplicate words merge
    /// additively; zero results are trimmed. Entries with invalid letters or
    /// degree above max_degree are rejected.
    pub fn from_entries<I>(alphabet: u8, max_degree: usize, entries: I) -> Result<Self, CoreError>
    where
        I: IntoIterator<Item = (Word, S)>,
    {
        assert!(alphabet >= 1, "alphabet must be nonempty");
        let mut coeffs: BTreeMap<Word, S> = BTreeMap::new();
        for (w, v) in entries {
            w.validate(alphabet)?;
            if w.degree() > max_degree {
                return Err(CoreError::EntryAbovePrecision {
                    degree: w.degree(),
                    max_degree,
                });
            }
            match coeffs.entry(w) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = e.get().plus(&v);
                    *e.get_mut() = merged;
                }
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(Series {
            alphabet,
            max_degree,
            coeffs,
        })
    }

    pub(crate) fn from_map(alphabet: u8, max_degree: usize, mut coeffs: BTreeMap<Word, S>) -> Self {
        coeffs.retain(|w, v| w.degree() <= max_degree && !v.is_zero());
        Series {
            alphabet,
            max_degree,
            coeffs,
        }
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// The stored coefficient, or zero if absent. Reads beyond max_degree
    /// also return zero; callers that care about precision must check
    /// `max_degree` themselves.
    pub fn coefficient(&self, w: &Word) -> S {
        self.coeffs.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coefficient(&Word::empty())
    }

    pub fn support(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Membership in G^1: constant term exactly 1.
    pub fn in_g1(&self) -> bool {
        self.constant_term().is_one()
    }

    /// Membership in G^0: constant term exactly 0.
    pub fn in_g0(&self) -> bool {
        self.constant_term().is_zero()
    }

    pub fn max_support_degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().map(Word::degree)
    }

    /// True when the stored support pins the whole series: everything above
    /// the top stored degree is known-zero because the precision extends
    /// strictly beyond it. The zero series is always detected.
    pub fn is_detected_polynomial(&self) -> bool {
        match self.max_support_degree() {
            None => true,
            Some(m) => m < self.max_degree,
        }
    }

    /// Restricts precision to min(max_degree, d) and drops deeper terms.
    /// Never raises precision.
    pub fn truncate(&self, d: usize) -> Self {
        let max_degree = self.max_degree.min(d);
        let mut coeffs = BTreeMap::new();
        for (w, v) in self.coeffs.range(..Word::degree_floor(max_degree + 1)) {
            coeffs.insert(w.clone(), v.clone());
        }
        Series {
            alphabet: self.alphabet,
            max_degree,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, v)| (w.clone(), v.negated()))
            .collect();
        Series {
            alphabet: self.alphabet,
            max_degree: self.max_degree,
            coeffs,
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Series::zero(self.alphabet, self.max_degree);
        }
        let mut coeffs = BTreeMap::new();
        for (w, v) in &self.coeffs {
            let t = v.times(c);
            if !t.is_zero() {
                coeffs.insert(w.clone(), t);
            }
        }
        Series {
            alphabet: self.alphabet,
            max_degree: self.max_degree,
            coeffs,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_same_alphabet(rhs);
        let max_degree = self.max_degree.min(rhs.max_degree);
        let bound = Word::degree_floor(max_degree + 1);
        let mut coeffs: BTreeMap<Word, S> = BTreeMap::new();
        for (w, v) in self.coeffs.range(..bound.clone()) {
            coeffs.insert(w.clone(), v.clone());
        }
        for (w, v) in rhs.coeffs.range(..bound) {
            match coeffs.entry(w.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = e.get().plus(v);
                    if merged.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = merged;
                    }
                }
            }
        }
        Series {
            alphabet: self.alphabet,
            max_degree,
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn add_scalar(&self, c: &S) -> Self {
        let mut out = self.clone();
        let merged = out.constant_term().plus(c);
        if merged.is_zero() {
            out.coeffs.remove(&Word::empty());
        } else {
            out.coeffs.insert(Word::empty(), merged);
        }
        out
    }

    /// Cauchy (concatenation) product, truncated to the smaller precision.
    pub fn cauchy(&self, rhs: &Self) -> Self {
        self.assert_same_alphabet(rhs);
        let prec = self.max_degree.min(rhs.max_degree);
        let mut coeffs: BTreeMap<Word, S> = BTreeMap::new();
        // keys sort by degree first, so the outer loop can stop early
        for (u, a) in self.coeffs.range(..Word::degree_floor(prec + 1)) {
            let budget = prec - u.degree();
            for (v, b) in rhs.coeffs.range(..Word::degree_floor(budget + 1)) {
                let w = u.concat(v);
                let t = a.times(b);
                if t.is_zero() {
                    continue;
                }
                match coeffs.entry(w) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(t);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let merged = e.get().plus(&t);
                        if merged.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = merged;
                        }
                    }
                }
            }
        }
        Series {
            alphabet: self.alphabet,
            max_degree: prec,
            coeffs,
        }
    }

    /// Substitutes component g_i of the field for the letter x_i:
    /// (f o g)(x) = f_0 + sum_w f_w g_{w_1} ... g_{w_k}.
    ///
    /// Requires self.alphabet == number of components. When some component
    /// has a nonzero constant term, self must be a detected polynomial
    /// (see `is_detected_polynomial`); otherwise the substituted sum would
    /// draw on unknown coefficients of self at every output degree.
    ///
    /// Result precision: the field precision when self is a detected
    /// polynomial, min of both precisions otherwise.
    pub fn compose(&self, g: &Field<S>) -> Result<Self, CoreError> {
        assert_eq!(
            self.alphabet as usize,
            g.components().len(),
            "outer alphabet must match the component count of the field",
        );
        let finite = self.is_detected_polynomial();
        if !finite {
            if let Some(i) = g.first_constant_component() {
                return Err(CoreError::ConstantTermInComposition { component: i });
            }
        }
        let prec = if finite {
            g.max_degree()
        } else {
            self.max_degree.min(g.max_degree())
        };
        let out_alphabet = g.alphabet();

        let mut out = Series::constant(out_alphabet, prec, self.constant_term());

        // Walk the support in lexicographic (prefix) order, caching the
        // partial products g_{w_1} ... g_{w_j} on a stack so shared prefixes
        // cost one Cauchy product each.
        let mut words: Vec<(&Word, &S)> =
            self.coeffs.iter().filter(|(w, _)| !w.is_empty()).collect();
        words.sort_by(|(a, _), (b, _)| a.letters().cmp(b.letters()));

        let mut stack: Vec<Series<S>> = Vec::new();
        let mut prev: &[Letter] = &[];
        for (w, c) in words {
            let letters = w.letters();
            let common = prev
                .iter()
                .zip(letters.iter())
                .take_while(|(a, b)| a == b)
                .count();
            stack.truncate(common);
            for &l in &letters[common..] {
                let gi = g.component(l);
                let next = match stack.last() {
                    None => gi.truncate(prec),
                    Some(p) => p.cauchy(gi),
                };
                stack.push(next);
            }
            let term = stack
                .last()
                .expect("nonempty word pushed at least one factor");
            out = out.add(&term.scale(c));
            prev = letters;
        }
        Ok(out)
    }

    /// The planar left derivative with respect to x_i: strips a leading x_i
    /// from every word that has one. Precision drops by one.
    pub fn left_derivative(&self, i: Letter) -> Self {
        assert!(i >= 1 && i <= self.alphabet, "letter out of range");
        let prec = self.max_degree.saturating_sub(1);
        let mut coeffs = BTreeMap::new();
        for (w, v) in &self.coeffs {
            if w.first() == Some(i) && w.degree() <= prec + 1 {
                coeffs.insert(w.suffix_from(1), v.clone());
            }
        }
        Series {
            alphabet: self.alphabet,
            max_degree: prec,
            coeffs,
        }
    }

    /// Iterated left derivative f_{x_{i1},...,x_{ik}}: differentiates by the
    /// letters of w left to right, i.e. strips the prefix w. Evaluated at 0
    /// (the constant term) this is exactly coefficient(f, w).
    pub fn iterated_derivative(&self, w: &Word) -> Self {
        let mut cur = self.clone();
        for &l in w.letters() {
            cur = cur.left_derivative(l);
        }
        cur
    }

    /// Left multiplication by the letter x_i. Every coefficient of
    /// x_i * f at degree <= max_degree + 1 is determined by f at degree
    /// <= max_degree, so precision rises by one.
    pub fn letter_mul(&self, i: Letter) -> Self {
        assert!(i >= 1 && i <= self.alphabet, "letter out of range");
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, v)| (w.prepend(i), v.clone()))
            .collect();
        Series {
            alphabet: self.alphabet,
            max_degree: self.max_degree + 1,
            coeffs,
        }
    }

    /// Compares the two series on every word up to the common precision.
    /// Returns the compared degree and the disagreeing words with both
    /// values. Exact scalars compare exactly; floats use `tol`.
    pub fn agree_up_to(&self, rhs: &Self, tol: f64) -> (usize, Vec<(Word, S, S)>) {
        self.assert_same_alphabet(rhs);
        let checked = self.max_degree.min(rhs.max_degree);
        let bound = Word::degree_floor(checked + 1);
        let mut words: Vec<&Word> = self.coeffs.range(..bound.clone()).map(|(w, _)| w).collect();
        words.extend(rhs.coeffs.range(..bound).map(|(w, _)| w));
        words.sort();
        words.dedup();
        let mut bad = Vec::new();
        for w in words {
            let a = self.coefficient(w);
            let b = rhs.coefficient(w);
            if !a.approx_eq(&b, tol) {
                bad.push((w.clone(), a, b));
            }
        }
        (checked, bad)
    }

    fn assert_same_alphabet(&self, rhs: &Self) {
        assert_eq!(self.alphabet, rhs.alphabet, "alphabet mismatch");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use num::rational::BigRational;

    type Q = BigRational;

    fn qi(v: i64) -> Q {
        <Q as Scalar>::from_int(v)
    }

    fn w(letters: &[Letter]) -> Word {
        Word::from_slice(letters)
    }

    #[test]
    fn from_entries_merges_duplicates_additively() {
        // 2*x1 + x1 = 3*x1
        let s = Series::from_entries(2, 3, vec![(w(&[1]), qi(2)), (w(&[1]), qi(1))]).unwrap();
        assert_eq!(s.coefficient(&w(&[1])), qi(3));
        assert_eq!(s.support_len(), 1);
    }

    #[test]
    fn from_entries_trims_zero_merges() {
        let s = Series::from_entries(1, 3, vec![(w(&[1]), qi(2)), (w(&[1]), qi(-2))]).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn from_entries_rejects_deep_and_invalid_words() {
        let too_deep = Series::<Q>::from_entries(2, 1, vec![(w(&[1, 2]), qi(1))]);
        assert!(matches!(
            too_deep,
            Err(CoreError::EntryAbovePrecision { .. })
        ));
        let bad_letter = Series::<Q>::from_entries(2, 3, vec![(w(&[3]), qi(1))]);
        assert!(matches!(
            bad_letter,
            Err(CoreError::LetterOutOfRange { .. })
        ));
    }

    #[test]
    fn binary_ops_truncate_to_min_precision() {
        let a = Series::from_entries(1, 4, vec![(w(&[1, 1, 1]), qi(1))]).unwrap();
        let b = Series::one(1, 2);
        let sum = a.add(&b);
        assert_eq!(sum.max_degree(), 2);
        assert!(sum.coefficient(&w(&[1, 1, 1])).is_zero());
        let prod = a.cauchy(&b);
        assert_eq!(prod.max_degree(), 2);
        assert!(prod.is_zero());
    }

    #[test]
    fn cauchy_concatenates_words() {
        // (1 + x1) * (1 + x2) = 1 + x1 + x2 + x1 x2
        let a = Series::<Q>::one(2, 3).add(&Series::letter(2, 3, 1));
        let b = Series::<Q>::one(2, 3).add(&Series::letter(2, 3, 2));
        let p = a.cauchy(&b);
        assert_eq!(p.coefficient(&Word::empty()), qi(1));
        assert_eq!(p.coefficient(&w(&[1])), qi(1));
        assert_eq!(p.coefficient(&w(&[2])), qi(1));
        assert_eq!(p.coefficient(&w(&[1, 2])), qi(1));
        assert!(p.coefficient(&w(&[2, 1])).is_zero());
        assert_eq!(p.support_len(), 4);
    }

    #[test]
    fn compose_substitutes_components() {
        // f = 1 + x1 over a 1-letter alphabet; g_1 = x1 + x1 x1, D = 2.
        // f o g = 1 + x + x^2.
        let f = Series::one(1, 2).add(&Series::letter(1, 2, 1));
        let g1 = Series::from_entries(1, 2, vec![(w(&[1]), qi(1)), (w(&[1, 1]), qi(1))]).unwrap();
        let g = Field::new(vec![g1]);
        let r = f.compose(&g).unwrap();
        assert_eq!(r.coefficient(&Word::empty()), qi(1));
        assert_eq!(r.coefficient(&w(&[1])), qi(1));
        assert_eq!(r.coefficient(&w(&[1, 1])), qi(1));
        assert_eq!(r.max_degree(), 2);
    }

    #[test]
    fn compose_rejects_constant_components_unless_polynomial() {
        // g has constant term; f has support at its top degree, so the tail
        // of f is unknown and composition must be refused.
        let f = Series::from_entries(1, 2, vec![(w(&[1, 1]), qi(1))]).unwrap();
        let g = Field::new(vec![Series::one(1, 2).add(&Series::letter(1, 2, 1))]);
        assert!(matches!(
            f.compose(&g),
            Err(CoreError::ConstantTermInComposition { component: 1 })
        ));

        // Same f at higher declared precision is a detected polynomial:
        // (1 + x)^2 evaluated as a finite sum, allowed.
        let f = Series::from_entries(1, 3, vec![(w(&[1, 1]), qi(1))]).unwrap();
        let r = f.compose(&g).unwrap();
        assert_eq!(r.coefficient(&Word::empty()), qi(1));
        assert_eq!(r.coefficient(&w(&[1])), qi(2));
        assert_eq!(r.coefficient(&w(&[1, 1])), qi(1));
    }

    #[test]
    fn left_derivative_strips_leading_letter_and_one_degree() {
        // d_1 (x1 x2 + x2 x1) = x2
        let s = Series::from_entries(2, 2, vec![(w(&[1, 2]), qi(1)), (w(&[2, 1]), qi(1))]).unwrap();
        let d = s.left_derivative(1);
        assert_eq!(d.max_degree(), 1);
        assert_eq!(d.coefficient(&w(&[2])), qi(1));
        assert_eq!(d.support_len(), 1);
    }

    #[test]
    fn iterated_derivative_at_zero_is_coefficient() {
        let s = Series::from_entries(
            2,
            3,
            vec![
                (w(&[1, 2]), qi(5)),
                (w(&[2, 1, 1]), qi(-3)),
                (w(&[1]), qi(7)),
            ],
        )
        .unwrap();
        for target in [w(&[1, 2]), w(&[2, 1, 1]), w(&[1]), w(&[2, 2])] {
            let d = s.iterated_derivative(&target);
            assert_eq!(d.constant_term(), s.coefficient(&target));
        }
        // order matters: x1 x2 differentiated in order [1,2] gives 1,
        // in order [2,1] gives 0.
        let m = Series::monomial(2, 2, w(&[1, 2]), qi(1));
        assert_eq!(m.iterated_derivative(&w(&[1, 2])).constant_term(), qi(1));
        assert!(m.iterated_derivative(&w(&[2, 1])).constant_term().is_zero());
    }

    #[test]
    fn letter_mul_raises_precision() {
        let s = Series::from_entries(2, 1, vec![(w(&[2]), qi(4))]).unwrap();
        let m = s.letter_mul(1);
        assert_eq!(m.max_degree(), 2);
        assert_eq!(m.coefficient(&w(&[1, 2])), qi(4));
    }

    #[test]
    fn truncate_never_raises_precision() {
        let s = Series::<Q>::one(1, 2);
        assert_eq!(s.truncate(5).max_degree(), 2);
        assert_eq!(s.truncate(0).max_degree(), 0);
    }
}
