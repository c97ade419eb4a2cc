//! Fields of series: one component per letter of the alphabet.
//!
//! A `Field` is an n-tuple (g_1, ..., g_n) of series over the same n-letter
//! alphabet, all held at one common precision (the constructor truncates to
//! the minimum). Fields are the substitution targets of `Series::compose`
//! and the carriers of differential / integral calculus.

use crate::error::CoreError;
use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::word::{Letter, Word};

#[derive(Clone, PartialEq, Debug)]
pub struct Field<S: Scalar> {
    components: Vec<Series<S>>,
}

impl<S: Scalar> Field<S> {
    /// Builds a field from components. Panics unless the component count
    /// equals the shared alphabet size (fields are square by contract).
    /// Components are truncated to the common minimum precision.
    pub fn new(components: Vec<Series<S>>) -> Self {
        assert!(!components.is_empty(), "field needs at least one component");
        let alphabet = components[0].alphabet();
        assert!(
            components.iter().all(|c| c.alphabet() == alphabet),
            "field components must share one alphabet"
        );
        assert_eq!(
            components.len(),
            alphabet as usize,
            "field must have one component per letter"
        );
        let prec = components
            .iter()
            .map(Series::max_degree)
            .min()
            .expect("nonempty");
        let components = components.iter().map(|c| c.truncate(prec)).collect();
        Field { components }
    }

    /// The identity field (x_1, ..., x_n).
    pub fn letters(alphabet: u8, max_degree: usize) -> Self {
        let components = (1..=alphabet)
            .map(|i| Series::letter(alphabet, max_degree, i))
            .collect();
        Field { components }
    }

    pub fn alphabet(&self) -> u8 {
        self.components[0].alphabet()
    }

    pub fn max_degree(&self) -> usize {
        self.components[0].max_degree()
    }

    /// Component for letter i (1-based).
    pub fn component(&self, i: Letter) -> &Series<S> {
        &self.components[(i - 1) as usize]
    }

    pub fn components(&self) -> &[Series<S>] {
        &self.components
    }

    pub fn truncate(&self, d: usize) -> Self {
        Field {
            components: self.components.iter().map(|c| c.truncate(d)).collect(),
        }
    }

    /// First component with a nonzero constant term, if any.
    pub fn first_constant_component(&self) -> Option<Letter> {
        self.components
            .iter()
            .position(|c| !c.in_g0())
            .map(|p| (p + 1) as Letter)
    }

    pub fn is_constant_free(&self) -> bool {
        self.first_constant_component().is_none()
    }

    /// Componentwise composition: (f_1 o g, ..., f_n o g).
    pub fn compose(&self, g: &Field<S>) -> Result<Field<S>, CoreError> {
        let components = self
            .components
            .iter()
            .map(|c| c.compose(g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Field::new(components))
    }

    /// Matrix of degree-1 coefficients: entry (i, j) is the coefficient of
    /// x_j in component i.
    pub fn linear_matrix(&self) -> SquareMatrix<S> {
        let n = self.components.len();
        SquareMatrix::from_fn(n, |i, j| {
            self.components[i].coefficient(&Word::single((j + 1) as Letter))
        })
    }

    /// Componentwise degree >= 2 part (drops constant and linear terms).
    pub fn higher_part(&self) -> Field<S> {
        let components = self
            .components
            .iter()
            .map(|c| {
                let entries: Vec<(Word, S)> = c
                    .support()
                    .filter(|(w, _)| w.degree() >= 2)
                    .map(|(w, v)| (w.clone(), v.clone()))
                    .collect();
                Series::from_entries(c.alphabet(), c.max_degree(), entries)
                    .expect("filtered support stays valid")
            })
            .collect();
        Field { components }
    }
}

/// The differential field of f: components are the left derivatives
/// (d_1 f, ..., d_n f), each at precision max_degree - 1.
pub fn differential_field<S: Scalar>(f: &Series<S>) -> Field<S> {
    let components = (1..=f.alphabet()).map(|i| f.left_derivative(i)).collect();
    Field::new(components)
}

/// The integral field of f: components are (x_1 f, ..., x_n f), each at
/// precision max_degree + 1.
pub fn integral_field<S: Scalar>(f: &Series<S>) -> Field<S> {
    let components = (1..=f.alphabet()).map(|i| f.letter_mul(i)).collect();
    Field::new(components)
}

/// Compositional inverse of a constant-free field with invertible linear
/// part: the unique constant-free Psi with g o Psi = identity letters (and
/// then also Psi o g = letters).
///
/// Computed by exactly D fixed-point iterations of
///     Psi <- Lambda^{-1} (letters - higher(g) o Psi)
/// starting from the zero field; each pass is exact one degree further, so D
/// passes pin all coefficients up to the working precision D.
///
/// Errors: a constant-bearing component; a singular linear part; in float
/// mode, an ill-conditioned linear part.
pub fn invert_field<S: Scalar>(g: &Field<S>) -> Result<Field<S>, CoreError> {
    if let Some(i) = g.first_constant_component() {
        return Err(CoreError::NotConstantFree {
            found: format!("component {i}"),
        });
    }
    let n = g.alphabet();
    let d = g.max_degree();
    let lambda_inv = g.linear_matrix().invert()?;
    let letters = Field::letters(n, d);
    let higher = g.higher_part();
    let mut psi = Field::new(vec![Series::zero(n, d); n as usize]);
    for _ in 0..d {
        let substituted = higher.compose(&psi)?;
        let mut next = Vec::with_capacity(n as usize);
        for i in 0..n as usize {
            let mut acc = Series::zero(n, d);
            for j in 0..n as usize {
                let rhs_j = letters.components()[j].sub(&substituted.components()[j]);
                acc = acc.add(&rhs_j.scale(lambda_inv.get(i, j)));
            }
            next.push(acc);
        }
        psi = Field::new(next);
    }
    Ok(psi)
}
