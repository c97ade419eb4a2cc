//! The shifted-composition group product and its relatives.
//!
//! For series f and unital g (constant term 1):
//!   f • g = g(x) * f(x g(x))          (shifted composition)
//!   f ≺ g = f(x g(x))                 (left half)
//!   f ≻ g = (g(x) - 1) * f(x g(x))    (right half)
//! so f • g = f ≺ g + f ≻ g. Substituting x_i g(x) for x_i is composition
//! with the integral field of g, which is always constant-free, so only
//! g's constant term is constrained. Unital series form a group under •
//! with unit 1; `bullet_inverse` solves f • h = 1 degree by degree.
//!
//! The pre-Lie product a ◁ b inserts b into every slot of each word of a:
//!   x_{i1}..x_{im} ◁ x_{j1}..x_{jk} =
//!     sum over cut points c of x_{i1}..x_{ic} x_{j1}..x_{jk} x_{i(c+1)}..x_{im}.

use crate::error::CoreError;
use crate::field::integral_field;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::word::Word;
use std::collections::BTreeMap;

fn require_unital<S: Scalar>(g: &Series<S>) -> Result<(), CoreError> {
    if !g.in_g1() {
        return Err(CoreError::NotUnital {
            found: g.constant_term().render(),
        });
    }
    Ok(())
}

/// f • g = g * f(xg). Requires g constant term 1; f is unrestricted.
pub fn bullet<S: Scalar>(f: &Series<S>, g: &Series<S>) -> Result<Series<S>, CoreError> {
    require_unital(g)?;
    let substituted = f.compose(&integral_field(g))?;
    Ok(g.cauchy(&substituted))
}

/// f ≺ g = f(xg). Requires g constant term 1; f is unrestricted.
pub fn prec<S: Scalar>(f: &Series<S>, g: &Series<S>) -> Result<Series<S>, CoreError> {
    require_unital(g)?;
    f.compose(&integral_field(g))
}

/// f ≻ g = (g - 1) * f(xg). Requires g constant term 1; f is unrestricted.
pub fn succ<S: Scalar>(f: &Series<S>, g: &Series<S>) -> Result<Series<S>, CoreError> {
    require_unital(g)?;
    let substituted = f.compose(&integral_field(g))?;
    Ok(g.add_scalar(&S::one().negated()).cauchy(&substituted))
}

/// The •-inverse of a unital series: the unique unital h with
/// f • h = h • f = 1 up to the precision of f.
///
/// Iterates h <- 1 - h * ((f - 1) ≺ h) exactly D times from h = 1. The
/// correction term has positive valuation, so each pass is exact one degree
/// further; the fixed point satisfies h * (f ≺ h) = f • h = 1.
pub fn bullet_inverse<S: Scalar>(f: &Series<S>) -> Result<Series<S>, CoreError> {
    require_unital(f)?;
    let d = f.max_degree();
    let one = Series::one(f.alphabet(), d);
    let f0 = f.add_scalar(&S::one().negated());
    let mut h = one.clone();
    for _ in 0..d {
        let correction = h.cauchy(&prec(&f0, &h)?);
        h = one.sub(&correction);
    }
    Ok(h)
}

/// The pre-Lie insertion product a ◁ b for constant-free a and b.
pub fn prelie<S: Scalar>(a: &Series<S>, b: &Series<S>) -> Result<Series<S>, CoreError> {
    for (name, s) in [("left", a), ("right", b)] {
        if !s.in_g0() {
            return Err(CoreError::NotConstantFree {
                found: format!(
                    "{} argument constant term {}",
                    name,
                    s.constant_term().render()
                ),
            });
        }
    }
    assert_eq!(a.alphabet(), b.alphabet(), "alphabet mismatch");
    let prec_out = a.max_degree().min(b.max_degree());
    let mut coeffs: BTreeMap<Word, S> = BTreeMap::new();
    for (u, ca) in a.support() {
        for (v, cb) in b.support() {
            if u.degree() + v.degree() > prec_out {
                continue;
            }
            let c = ca.times(cb);
            if c.is_zero() {
                continue;
            }
            for cut in 0..=u.degree() {
                let mut letters = Vec::with_capacity(u.degree() + v.degree());
                letters.extend_from_slice(&u.letters()[..cut]);
                letters.extend_from_slice(v.letters());
                letters.extend_from_slice(&u.letters()[cut..]);
                let w = Word::from_letters(letters);
                match coeffs.entry(w) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c.clone());
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let merged = e.get().plus(&c);
                        if merged.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = merged;
                        }
                    }
                }
            }
        }
    }
    Ok(Series::from_map(a.alphabet(), prec_out, coeffs))
}
