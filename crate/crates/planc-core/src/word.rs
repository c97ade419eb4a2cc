//! Words over the alphabet {x_1, ..., x_n}.
//!
//! Letters are 1-based and stored as bytes (alphabet sizes up to 255).
//! Words order by (degree, lexicographic); series storage relies on this
//! so that iteration and serialization emit the canonical order for free.

use crate::error::CoreError;
use std::cmp::Ordering;
use std::fmt;

/// 1-based letter index into the alphabet.
pub type Letter = u8;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(i: Letter) -> Self {
        Word(vec![i])
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn from_slice(letters: &[Letter]) -> Self {
        Word(letters.to_vec())
    }

    /// The word i^d (d repetitions of one letter).
    pub fn repeated(i: Letter, d: usize) -> Self {
        Word(vec![i; d])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + rhs.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&rhs.0);
        Word(v)
    }

    pub fn prepend(&self, i: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// The suffix starting at position k (0-based).
    pub fn suffix_from(&self, k: usize) -> Word {
        Word(self.0[k..].to_vec())
    }

    pub fn validate(&self, alphabet: u8) -> Result<(), CoreError> {
        for &l in &self.0 {
            if l == 0 || l > alphabet {
                return Err(CoreError::LetterOutOfRange {
                    letter: l,
                    alphabet,
                });
            }
        }
        Ok(())
    }

    /// The least word of the given degree, [1, 1, ..., 1]; every word of
    /// smaller degree sorts strictly below it. Used as a range bound.
    pub(crate) fn degree_floor(d: usize) -> Word {
        Word(vec![1; d])
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Letters joined with '.', e.g. "1.2.1"; the empty word prints as "".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.0 {
            if !first {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// All words of exactly degree d over [1..=alphabet], in lexicographic order.
pub fn words_of_degree(alphabet: u8, d: usize) -> Vec<Word> {
    assert!(alphabet >= 1, "alphabet must be nonempty");
    if d == 0 {
        return vec![Word::empty()];
    }
    let mut out = Vec::new();
    let mut cur = vec![1u8; d];
    loop {
        out.push(Word(cur.clone()));
        // odometer increment over digits 1..=alphabet
        let mut pos = d;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] < alphabet {
                cur[pos] += 1;
                for digit in cur.iter_mut().skip(pos + 1) {
                    *digit = 1;
                }
                break;
            }
        }
    }
}

/// All words of degree 0..=d, in (degree, lexicographic) order.
pub fn words_up_to(alphabet: u8, d: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for k in 0..=d {
        out.extend(words_of_degree(alphabet, k));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_degree_then_lex() {
        let a = Word::from_letters(vec![2]);
        let b = Word::from_letters(vec![1, 1]);
        let c = Word::from_letters(vec![1, 2]);
        assert!(a < b);
        assert!(b < c);
        assert!(Word::empty() < a);
    }

    #[test]
    fn degree_floor_bounds_lower_degrees() {
        let bound = Word::degree_floor(3);
        assert!(Word::from_letters(vec![3, 3]) < bound);
        assert!(Word::from_letters(vec![1, 1, 1]) >= bound);
    }

    #[test]
    fn enumeration_counts_match_powers() {
        assert_eq!(words_of_degree(3, 2).len(), 9);
        assert_eq!(words_up_to(2, 4).len(), 1 + 2 + 4 + 8 + 16);
        // lexicographic within a degree
        let w = words_of_degree(2, 2);
        let expect: Vec<Word> = vec![
            Word::from_letters(vec![1, 1]),
            Word::from_letters(vec![1, 2]),
            Word::from_letters(vec![2, 1]),
            Word::from_letters(vec![2, 2]),
        ];
        assert_eq!(w, expect);
    }

    #[test]
    fn display_joins_with_dots() {
        assert_eq!(Word::from_letters(vec![1, 2, 1]).to_string(), "1.2.1");
        assert_eq!(Word::empty().to_string(), "");
    }

    #[test]
    fn validate_rejects_out_of_range_letters() {
        assert!(Word::from_letters(vec![1, 3]).validate(2).is_err());
        assert!(Word::from_letters(vec![0]).validate(2).is_err());
        assert!(Word::from_letters(vec![1, 2]).validate(2).is_ok());
    }
}
