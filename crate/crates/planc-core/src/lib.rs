//! Truncated non-commutative power series with exact rational (or float)
//! coefficients, and the planar calculus built on top of them: shifted
//! composition products, moment/cumulant conversion, the non-commutative
//! Legendre transform with its effective action, and the planar-tree
//! expansion of cumulant derivatives, plus seeded verification suites and a
//! deterministic random-matrix moment sampler.
//!
//! Invariants that hold crate-wide:
//!   - a series is exact for every degree <= its precision and silent above;
//!   - binary operations meet at the minimum precision of their operands;
//!   - rational arithmetic is exact, float checks use pinned tolerances;
//!   - every operation is a pure, deterministic function of its inputs.

pub mod action;
pub mod conversions;
pub mod error;
pub mod field;
pub mod json;
pub mod matrix;
pub mod products;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod series;
pub mod trees;
pub mod verify;
pub mod word;

pub use action::{
    conjugate_field, covariance_matrix, effective_action, is_regular, l_coefficient,
    univariate_relation_check, verify_legendre, verify_three_point, verify_two_point,
    EffectiveAction,
};
pub use conversions::{
    cumulants_from_moments, lowdegree_oracle_check, moments_from_cumulants,
    moments_from_cumulants_fixed_point, rewrite_in_y, y_field,
};
pub use error::CoreError;
pub use field::{differential_field, integral_field, invert_field, Field};
pub use json::{
    action_to_json, document_role, field_from_json, field_to_json, parse_document, render,
    series_from_json, series_to_json, tree_from_json, tree_to_json, AnyField, AnySeries, JsonError,
};
pub use matrix::SquareMatrix;
pub use products::{bullet, bullet_inverse, prec, prelie, succ};
pub use report::{VerifyReport, Violation};
pub use sampler::{matrix_model, sample_moments, MatrixModel, SampleSpec, MATRIX_MODELS};
pub use scalar::{Scalar, ScalarKind, FLOAT_COND_LIMIT, FLOAT_REL_TOL};
pub use series::Series;
pub use trees::{
    brute_force_trees, characteristic_path, enumerate_admissible, feynman_evaluate, render_term,
    symbolic_term, tree_expansion, tree_expansion_to, univariate_tree_table, verify_theorem,
    AdmissibleTree, DecoratedTree, FeynmanEvaluator, TreeNode, TreeTableRow,
};
pub use verify::{
    random_centered_regular, random_constant_free, random_field, random_rational, random_series,
    random_unital, seeded_rng, suite, Suite, SuiteConfig, SUITES,
};
pub use word::{words_of_degree, words_up_to, Letter, Word};
