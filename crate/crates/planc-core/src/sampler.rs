//! Random-matrix moment sampler.
//!
//! Draws S independent n-tuples of N x N Hermitian matrices from a named
//! model and returns the float series of averaged normalized traces
//!   m_w = (1/S) sum_s Re tr(A_{w_1} ... A_{w_k}) / N
//! for every word w up to the requested degree, with constant term 1.
//!
//! Determinism contract: the generator is ChaCha8 seeded with the user seed;
//! the matrix for (sample s, letter i) uses stream s * letters + (i - 1).
//! Within a stream, draws fill the real diagonal first (indices 0..N-1), then
//! the strict upper triangle row-major as (re, im) pairs; Gaussians come from
//! the polar method with a cached spare. Samples are accumulated in index
//! order, so outputs are bit-identical for identical (spec, seed).
//!
//! Models are registered behind a trait object; "gue" draws the Gaussian
//! unitary ensemble with off-diagonal entry variance 1/N (split evenly over
//! the real and imaginary parts) and real diagonal variance 1/N.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::series::Series;
use crate::word::{Letter, Word};

pub const MAX_MATRIX_DIM: usize = 1024;
pub const MAX_SAMPLE_DEGREE: usize = 8;

/// What to sample: model name, matrix size N, sample count S, number of
/// independent letters, and the maximum word degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub model: String,
    pub matrix_dim: usize,
    pub samples: usize,
    pub letters: u8,
    pub max_degree: usize,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.matrix_dim < 2 {
            return Err(CoreError::SamplerSpec {
                what: format!("matrix_dim must be at least 2, got {}", self.matrix_dim),
            });
        }
        if self.matrix_dim > MAX_MATRIX_DIM {
            return Err(CoreError::SamplerLimit {
                what: "matrix_dim",
                value: self.matrix_dim,
                max: MAX_MATRIX_DIM,
            });
        }
        if self.samples < 1 {
            return Err(CoreError::SamplerSpec {
                what: "samples must be at least 1".into(),
            });
        }
        if self.letters < 1 {
            return Err(CoreError::SamplerSpec {
                what: "letters must be at least 1".into(),
            });
        }
        if self.max_degree < 1 {
            return Err(CoreError::SamplerSpec {
                what: "max_degree must be at least 1".into(),
            });
        }
        if self.max_degree > MAX_SAMPLE_DEGREE {
            return Err(CoreError::SamplerLimit {
                what: "max_degree",
                value: self.max_degree,
                max: MAX_SAMPLE_DEGREE,
            });
        }
        Ok(())
    }
}

/// Standard Gaussians via the polar method, with the spare value cached so
/// the draw sequence is a pure function of the underlying stream.
struct GaussianSource<R: RngCore> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> GaussianSource<R> {
    fn new(rng: R) -> Self {
        GaussianSource { rng, spare: None }
    }

    fn standard(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u: f64 = self.rng.gen::<f64>() * 2.0 - 1.0;
            let v: f64 = self.rng.gen::<f64>() * 2.0 - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * m);
                return u * m;
            }
        }
    }
}

/// Dense Hermitian matrix, row-major.
pub struct HermitianMatrix {
    pub n: usize,
    pub entries: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }
}

/// A named Hermitian random-matrix model.
pub trait MatrixModel: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    /// Draws the matrix of one (sample, letter) cell; must depend only on
    /// (spec, seed, sample, letter).
    fn sample_matrix(
        &self,
        spec: &SampleSpec,
        seed: u64,
        sample: usize,
        letter: Letter,
    ) -> HermitianMatrix;
}

struct GueModel;

impl MatrixModel for GueModel {
    fn name(&self) -> &'static str {
        "gue"
    }

    fn describe(&self) -> &'static str {
        "Gaussian unitary ensemble, entry variance 1/N"
    }

    fn sample_matrix(
        &self,
        spec: &SampleSpec,
        seed: u64,
        sample: usize,
        letter: Letter,
    ) -> HermitianMatrix {
        let n = spec.matrix_dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample as u64 * spec.letters as u64 + (letter as u64 - 1));
        let mut g = GaussianSource::new(rng);
        let sigma_diag = (1.0 / n as f64).sqrt();
        let sigma_off = (1.0 / (2.0 * n as f64)).sqrt();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::new(g.standard() * sigma_diag, 0.0);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let re = g.standard() * sigma_off;
                let im = g.standard() * sigma_off;
                entries[i * n + j] = Complex64::new(re, im);
                entries[j * n + i] = Complex64::new(re, -im);
            }
        }
        HermitianMatrix { n, entries }
    }
}

/// Registered models, looked up by name.
pub static MATRIX_MODELS: &[&dyn MatrixModel] = &[&GueModel];

pub fn matrix_model(name: &str) -> Result<&'static dyn MatrixModel, CoreError> {
    MATRIX_MODELS
        .iter()
        .copied()
        .find(|m| m.name() == name)
        .ok_or_else(|| CoreError::UnknownName {
            registry: "matrix model",
            name: name.to_string(),
            known: MATRIX_MODELS
                .iter()
                .map(|m| m.name())
                .collect::<Vec<_>>()
                .join(", "),
        })
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            let out = &mut c[i * n..(i + 1) * n];
            for (cij, bkj) in out.iter_mut().zip(row) {
                *cij += aik * bkj;
            }
        }
    }
    c
}

fn normalized_trace(m: &[Complex64], n: usize) -> f64 {
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..n {
        t += m[i * n + i];
    }
    t.re / n as f64
}

/// Per-sample normalized traces of all words of degree 1..=max, in
/// (degree, lexicographic) word order.
fn sample_traces(matrices: &[HermitianMatrix], max_degree: usize) -> Vec<f64> {
    let n = matrices[0].n;
    let letters = matrices.len();
    let mut out = Vec::new();
    // depth-first over words, sharing prefix products
    fn descend(
        prefix: &[Complex64],
        depth: usize,
        max_depth: usize,
        matrices: &[HermitianMatrix],
        n: usize,
        out: &mut Vec<(Word, f64)>,
        word: &mut Vec<Letter>,
    ) {
        if depth == max_depth {
            return;
        }
        for (idx, m) in matrices.iter().enumerate() {
            let product = if depth == 0 {
                m.entries.clone()
            } else {
                matmul(prefix, &m.entries, n)
            };
            word.push((idx + 1) as Letter);
            out.push((
                Word::from_letters(word.clone()),
                normalized_trace(&product, n),
            ));
            descend(&product, depth + 1, max_depth, matrices, n, out, word);
            word.pop();
        }
    }
    let mut traced = Vec::new();
    descend(
        &[],
        0,
        max_degree,
        matrices,
        n,
        &mut traced,
        &mut Vec::new(),
    );
    // reorder lexicographic-prefix DFS output into (degree, lex) order
    traced.sort_by(|a, b| a.0.cmp(&b.0));
    out.extend(traced.into_iter().map(|(_, t)| t));
    debug_assert_eq!(out.len(), word_count(letters, max_degree));
    out
}

fn word_count(letters: usize, max_degree: usize) -> usize {
    let mut total = 0usize;
    let mut pow = 1usize;
    for _ in 1..=max_degree {
        pow *= letters;
        total += pow;
    }
    total
}

/// Draws the whole sample set and averages. Parallel over samples with a
/// fixed accumulation order.
pub fn sample_moments(spec: &SampleSpec, seed: u64) -> Result<Series<f64>, CoreError> {
    spec.validate()?;
    let model = matrix_model(&spec.model)?;
    let per_sample: Vec<Vec<f64>> = (0..spec.samples)
        .into_par_iter()
        .map(|s| {
            let matrices: Vec<HermitianMatrix> = (1..=spec.letters)
                .map(|l| model.sample_matrix(spec, seed, s, l))
                .collect();
            sample_traces(&matrices, spec.max_degree)
        })
        .collect();

    let count = word_count(spec.letters as usize, spec.max_degree);
    let mut sums = vec![0.0f64; count];
    for traces in &per_sample {
        for (acc, t) in sums.iter_mut().zip(traces) {
            *acc += t;
        }
    }
    let scale = 1.0 / spec.samples as f64;

    let mut entries: Vec<(Word, f64)> = vec![(Word::empty(), 1.0)];
    let mut idx = 0usize;
    for degree in 1..=spec.max_degree {
        for w in crate::word::words_of_degree(spec.letters, degree) {
            entries.push((w, sums[idx] * scale));
            idx += 1;
        }
    }
    Series::from_entries(spec.letters, spec.max_degree, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, s: usize, letters: u8, d: usize) -> SampleSpec {
        SampleSpec {
            model: "gue".into(),
            matrix_dim: n,
            samples: s,
            letters,
            max_degree: d,
        }
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(
            sample_moments(&spec(1, 1, 1, 2), 0),
            Err(CoreError::SamplerSpec { .. })
        ));
        assert!(matches!(
            sample_moments(&spec(2000, 1, 1, 2), 0),
            Err(CoreError::SamplerLimit {
                what: "matrix_dim",
                ..
            })
        ));
        assert!(matches!(
            sample_moments(&spec(4, 1, 1, 9), 0),
            Err(CoreError::SamplerLimit {
                what: "max_degree",
                ..
            })
        ));
        assert!(matches!(
            sample_moments(&spec(4, 0, 1, 2), 0),
            Err(CoreError::SamplerSpec { .. })
        ));
        let mut bad = spec(4, 1, 1, 2);
        bad.model = "wishart".into();
        assert!(matches!(
            sample_moments(&bad, 0),
            Err(CoreError::UnknownName {
                registry: "matrix model",
                ..
            })
        ));
    }

    #[test]
    fn matrices_are_hermitian_and_streams_differ() {
        let sp = spec(8, 2, 2, 2);
        let model = matrix_model("gue").unwrap();
        let a = model.sample_matrix(&sp, 41, 0, 1);
        for i in 0..a.n {
            assert_eq!(a.get(i, i).im, 0.0);
            for j in 0..a.n {
                let u = a.get(i, j);
                let l = a.get(j, i);
                assert_eq!(u.re, l.re);
                assert_eq!(u.im, -l.im);
            }
        }
        let b = model.sample_matrix(&sp, 41, 0, 2);
        let c = model.sample_matrix(&sp, 41, 1, 1);
        assert_ne!(a.entries, b.entries);
        assert_ne!(a.entries, c.entries);
        let a2 = model.sample_matrix(&sp, 41, 0, 1);
        assert_eq!(a.entries, a2.entries);
    }

    #[test]
    fn moments_are_deterministic() {
        let sp = spec(16, 5, 2, 3);
        let a = sample_moments(&sp, 123).unwrap();
        let b = sample_moments(&sp, 123).unwrap();
        assert_eq!(a, b);
        let c = sample_moments(&sp, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_letter_moments_approach_semicircle() {
        // semicircle moments: m2 = 1, m4 = 2, odd ones vanish
        let sp = spec(150, 40, 1, 4);
        let m = sample_moments(&sp, 7).unwrap();
        let m1 = m.coefficient(&Word::from_slice(&[1]));
        let m2 = m.coefficient(&Word::from_slice(&[1, 1]));
        let m3 = m.coefficient(&Word::from_slice(&[1, 1, 1]));
        let m4 = m.coefficient(&Word::from_slice(&[1, 1, 1, 1]));
        assert!(m1.abs() < 0.05, "m1 = {m1}");
        assert!((m2 - 1.0).abs() < 0.05, "m2 = {m2}");
        assert!(m3.abs() < 0.15, "m3 = {m3}");
        assert!((m4 - 2.0).abs() < 0.2, "m4 = {m4}");
        assert_eq!(m.constant_term(), 1.0);
    }

    #[test]
    fn trace_word_order_matches_series_order() {
        // tr(A B) = tr(B A): the words 12 and 21 must carry the same trace
        let sp = spec(6, 3, 2, 2);
        let m = sample_moments(&sp, 99).unwrap();
        let m12 = m.coefficient(&Word::from_slice(&[1, 2]));
        let m21 = m.coefficient(&Word::from_slice(&[2, 1]));
        assert!((m12 - m21).abs() < 1e-12, "{m12} vs {m21}");
    }
}
