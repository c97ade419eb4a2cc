//! Dense square matrices over a scalar kind, with Gauss-Jordan inversion.
//!
//! Exact kinds pivot on the first nonzero entry and tolerate nothing; the
//! float kind uses partial pivoting and rejects solves whose estimated
//! condition number ||A||_1 * ||A^{-1}||_1 exceeds `FLOAT_COND_LIMIT`.

use crate::error::CoreError;
use crate::scalar::{Scalar, ScalarKind, FLOAT_COND_LIMIT};

#[derive(Clone, PartialEq, Debug)]
pub struct SquareMatrix<S: Scalar> {
    n: usize,
    entries: Vec<S>, // row-major
}

impl<S: Scalar> SquareMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix must be at least 1x1");
        SquareMatrix {
            n,
            entries: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.entries[i * self.n + j] = v;
    }

    /// Maximum column sum of magnitudes.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).magnitude()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse. Exact kinds fail only on true singularity;
    /// the float kind also fails on an estimated condition number above
    /// `FLOAT_COND_LIMIT`.
    pub fn invert(&self) -> Result<SquareMatrix<S>, CoreError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = SquareMatrix::identity(n);
        for col in 0..n {
            let pivot_row = match S::kind() {
                ScalarKind::Rational => (col..n).find(|&r| !a.get(r, col).is_zero()),
                ScalarKind::Float64 => {
                    (col..n)
                        .filter(|&r| !a.get(r, col).is_zero())
                        .max_by(|&r1, &r2| {
                            a.get(r1, col)
                                .magnitude()
                                .total_cmp(&a.get(r2, col).magnitude())
                        })
                }
            };
            let pivot_row = pivot_row.ok_or(CoreError::SingularMatrix)?;
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = a.get(col, col).clone();
            let p_inv = p.recip()?;
            a.scale_row(col, &p_inv);
            inv.scale_row(col, &p_inv);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                a.sub_scaled_row(r, col, &factor);
                inv.sub_scaled_row(r, col, &factor);
            }
        }
        if S::kind() == ScalarKind::Float64 {
            let cond = self.norm1() * inv.norm1();
            if !cond.is_finite() || cond > FLOAT_COND_LIMIT {
                return Err(CoreError::IllConditioned {
                    cond,
                    limit: FLOAT_COND_LIMIT,
                });
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.n {
            self.entries.swap(r1 * self.n + j, r2 * self.n + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &S) {
        for j in 0..self.n {
            let v = self.get(r, j).times(c);
            self.set(r, j, v);
        }
    }

    /// row r -= c * row src
    fn sub_scaled_row(&mut self, r: usize, src: usize, c: &S) {
        for j in 0..self.n {
            let v = self.get(r, j).minus(&self.get(src, j).times(c));
            self.set(r, j, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::BigRational;

    type Q = BigRational;

    fn qi(v: i64) -> Q {
        <Q as Scalar>::from_int(v)
    }

    #[test]
    fn exact_inverse_of_2x2() {
        // [[1, 2], [3, 4]]^-1 = [[-2, 1], [3/2, -1/2]]
        let m = SquareMatrix::from_fn(2, |i, j| qi([[1, 2], [3, 4]][i][j]));
        let inv = m.invert().unwrap();
        assert_eq!(*inv.get(0, 0), qi(-2));
        assert_eq!(*inv.get(0, 1), qi(1));
        assert_eq!(*inv.get(1, 0), qi(3).times(&Scalar::recip(&qi(2)).unwrap()));
        assert_eq!(
            *inv.get(1, 1),
            qi(-1).times(&Scalar::recip(&qi(2)).unwrap())
        );
    }

    #[test]
    fn exact_inverse_needs_row_swap() {
        let m = SquareMatrix::from_fn(2, |i, j| qi([[0, 1], [1, 0]][i][j]));
        let inv = m.invert().unwrap();
        assert_eq!(*inv.get(0, 1), qi(1));
        assert_eq!(*inv.get(1, 0), qi(1));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = SquareMatrix::from_fn(2, |i, j| qi([[1, 2], [2, 4]][i][j]));
        assert!(matches!(m.invert(), Err(CoreError::SingularMatrix)));
    }

    #[test]
    fn float_inverse_and_condition_guard() {
        let m = SquareMatrix::from_fn(2, |i, j| [[2.0, 0.0], [0.0, 4.0]][i][j]);
        let inv = m.invert().unwrap();
        assert!((inv.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((inv.get(1, 1) - 0.25).abs() < 1e-15);

        let bad = SquareMatrix::from_fn(2, |i, j| [[1.0, 1.0], [1.0, 1.0 + 1e-14]][i][j]);
        assert!(matches!(
            bad.invert(),
            Err(CoreError::IllConditioned { .. })
        ));
    }
}
