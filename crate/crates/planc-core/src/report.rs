//! Identity-check reports shared by all verifiers.
//!
//! A report names one identity, states the degree up to which it was
//! checked, and lists every disagreeing word with both sides rendered
//! canonically. Serialization order is fixed by field order.

use crate::scalar::Scalar;
use crate::series::Series;
use crate::word::Word;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub word: Vec<u8>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub identity: String,
    pub max_checked_degree: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Compares two series up to their common precision.
    pub fn compare_series<S: Scalar>(
        identity: impl Into<String>,
        lhs: &Series<S>,
        rhs: &Series<S>,
        tol: f64,
    ) -> Self {
        let (max_checked_degree, bad) = lhs.agree_up_to(rhs, tol);
        VerifyReport {
            identity: identity.into(),
            max_checked_degree,
            violations: bad
                .into_iter()
                .map(|(w, a, b)| Violation {
                    word: w.letters().to_vec(),
                    lhs: a.render(),
                    rhs: b.render(),
                })
                .collect(),
        }
    }

    /// A scalar-level check attached to a word (degree 0 comparison).
    pub fn compare_scalars<S: Scalar>(
        identity: impl Into<String>,
        word: &Word,
        lhs: &S,
        rhs: &S,
        tol: f64,
    ) -> Self {
        let violations = if lhs.approx_eq(rhs, tol) {
            Vec::new()
        } else {
            vec![Violation {
                word: word.letters().to_vec(),
                lhs: lhs.render(),
                rhs: rhs.render(),
            }]
        };
        VerifyReport {
            identity: identity.into(),
            max_checked_degree: 0,
            violations,
        }
    }
}
