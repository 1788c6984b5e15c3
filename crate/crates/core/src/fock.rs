//! Graded tensor algebra over a base word space.
//!
//! A [`FockVector`] holds one dense order-K tensor per degree K; degree 0 is
//! the scalar "empty word". Tensors are stored row-major, so the multi-index
//! `(i_1, …, i_K)` sits at `Σ i_r · d^(K−r)`.

use std::collections::BTreeMap;

use itertools::Itertools;
use thiserror::Error;

use crate::semantic::{SemanticError, SemanticSpace};

/// Degree cap applied unless overridden with [`FockVector::with_max_degree`].
pub const DEFAULT_MAX_DEGREE: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("base dimensions differ: {left} vs {right}")]
    BaseDimMismatch { left: usize, right: usize },
    #[error("degree {degree} component needs {expected} coefficients, got {got}")]
    ComponentSize { degree: usize, expected: usize, got: usize },
    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("no degree-{0} component")]
    MissingDegree(usize),
    #[error("projection degree must be at least 1")]
    DegreeZero,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("expected a pure degree-1 vector")]
    NotDegreeOne,
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

#[derive(Debug, Clone)]
pub struct FockVector {
    base_dim: usize,
    max_degree: usize,
    components: BTreeMap<usize, Vec<f64>>,
}

fn checked_size(base_dim: usize, degree: usize) -> Option<usize> {
    base_dim.checked_pow(u32::try_from(degree).ok()?)
}

impl FockVector {
    pub fn zero(base_dim: usize) -> Self {
        Self {
            base_dim,
            max_degree: DEFAULT_MAX_DEGREE,
            components: BTreeMap::new(),
        }
    }

    /// `value` times the empty word.
    pub fn scalar(base_dim: usize, value: f64) -> Self {
        let mut v = Self::zero(base_dim);
        v.components.insert(0, vec![value]);
        v
    }

    /// A degree-1 vector.
    pub fn vector(coeffs: Vec<f64>) -> Self {
        let mut v = Self::zero(coeffs.len());
        v.components.insert(1, coeffs);
        v
    }

    /// Basis word `|index⟩`.
    pub fn basis(base_dim: usize, index: usize) -> Result<Self, FockError> {
        if index >= base_dim {
            return Err(FockError::IndexOutOfRange { index, dim: base_dim });
        }
        let mut c = vec![0.0; base_dim];
        c[index] = 1.0;
        Ok(Self::vector(c))
    }

    /// A single homogeneous component of the given degree.
    pub fn homogeneous(base_dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self, FockError> {
        let mut v = Self::zero(base_dim);
        if degree > v.max_degree {
            return Err(FockError::DegreeCapExceeded { degree, cap: v.max_degree });
        }
        let expected = checked_size(base_dim, degree)
            .ok_or(FockError::DegreeCapExceeded { degree, cap: v.max_degree })?;
        if coeffs.len() != expected {
            return Err(FockError::ComponentSize { degree, expected, got: coeffs.len() });
        }
        v.components.insert(degree, coeffs);
        Ok(v)
    }

    pub fn with_max_degree(mut self, cap: usize) -> Result<Self, FockError> {
        if let Some(&top) = self.components.keys().next_back() {
            if top > cap {
                return Err(FockError::DegreeCapExceeded { degree: top, cap });
            }
        }
        self.max_degree = cap;
        Ok(self)
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Stored degrees, ascending. May include all-zero components.
    pub fn degrees(&self) -> Vec<usize> {
        self.components.keys().copied().collect()
    }

    pub fn component(&self, degree: usize) -> Option<&[f64]> {
        self.components.get(&degree).map(Vec::as_slice)
    }

    /// Coefficient at a multi-index; absent degrees read as zero.
    pub fn coeff(&self, index: &[usize]) -> f64 {
        self.components
            .get(&index.len())
            .map_or(0.0, |c| c[flat_index(self.base_dim, index)])
    }

    /// Nonzero coefficients as `(multi-index, value)`, ordered by degree then position.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out = Vec::new();
        for (&k, c) in &self.components {
            for (i, &x) in c.iter().enumerate() {
                if x != 0.0 {
                    out.push((multi_index(self.base_dim, k, i), x));
                }
            }
        }
        out
    }

    fn check_dim(&self, other: &Self) -> Result<(), FockError> {
        if self.base_dim != other.base_dim {
            return Err(FockError::BaseDimMismatch {
                left: self.base_dim,
                right: other.base_dim,
            });
        }
        Ok(())
    }

    /// Degree-wise sum.
    pub fn add(&self, other: &Self) -> Result<Self, FockError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        out.max_degree = self.max_degree.max(other.max_degree);
        for (&k, c) in &other.components {
            match out.components.get_mut(&k) {
                Some(dst) => dst.iter_mut().zip(c).for_each(|(a, b)| *a += b),
                None => {
                    out.components.insert(k, c.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.components
            .values_mut()
            .for_each(|c| c.iter_mut().for_each(|x| *x *= alpha));
        out
    }

    /// Graded tensor product: degree `J + K` collects the outer products of
    /// every degree-J component of `self` with every degree-K component of `other`.
    pub fn tensor(&self, other: &Self) -> Result<Self, FockError> {
        self.check_dim(other)?;
        let cap = self.max_degree.min(other.max_degree);
        let mut out = Self::zero(self.base_dim);
        out.max_degree = cap;
        for (&j, x) in &self.components {
            for (&k, y) in &other.components {
                let degree = j + k;
                if degree > cap {
                    return Err(FockError::DegreeCapExceeded { degree, cap });
                }
                let dst = out
                    .components
                    .entry(degree)
                    .or_insert_with(|| vec![0.0; x.len() * y.len()]);
                for (a, &xa) in x.iter().enumerate() {
                    let row = &mut dst[a * y.len()..(a + 1) * y.len()];
                    row.iter_mut().zip(y).for_each(|(d, &yb)| *d += xa * yb);
                }
            }
        }
        Ok(out)
    }

    /// Sum over shared degrees of the coefficient-wise dot product.
    pub fn inner(&self, other: &Self) -> Result<f64, FockError> {
        self.check_dim(other)?;
        Ok(self
            .components
            .iter()
            .filter_map(|(k, x)| other.components.get(k).map(|y| dot(x, y)))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.components.values().map(|c| dot(c, c)).sum::<f64>().sqrt()
    }

    /// Replaces the degree-K component by its average over index permutations.
    pub fn symmetrize(&self, degree: usize) -> Result<Self, FockError> {
        self.project(degree, false)
    }

    /// Replaces the degree-K component by its signed average over index permutations.
    pub fn antisymmetrize(&self, degree: usize) -> Result<Self, FockError> {
        self.project(degree, true)
    }

    fn project(&self, degree: usize, signed: bool) -> Result<Self, FockError> {
        if degree == 0 {
            return Err(FockError::DegreeZero);
        }
        let t = self
            .components
            .get(&degree)
            .ok_or(FockError::MissingDegree(degree))?;
        let d = self.base_dim;
        let perms: Vec<(Vec<usize>, f64)> = (0..degree)
            .permutations(degree)
            .map(|p| {
                let sign = if signed { permutation_sign(&p) } else { 1.0 };
                (p, sign)
            })
            .collect();
        let norm = perms.len() as f64;
        let mut out = vec![0.0; t.len()];
        let mut permuted = vec![0usize; degree];
        for (flat, slot) in out.iter_mut().enumerate() {
            let idx = multi_index(d, degree, flat);
            let mut acc = 0.0;
            for (p, sign) in &perms {
                for (r, &pr) in p.iter().enumerate() {
                    permuted[r] = idx[pr];
                }
                acc += sign * t[flat_index(d, &permuted)];
            }
            *slot = acc / norm;
        }
        let mut result = self.clone();
        result.components.insert(degree, out);
        Ok(result)
    }

    /// Equality within `tol` per coefficient, absent degrees read as zero.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.base_dim == other.base_dim && self.max_coeff_diff(other) <= tol
    }

    fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for k in self.components.keys().chain(other.components.keys()) {
            let a = self.components.get(k);
            let b = other.components.get(k);
            let len = a.or(b).map_or(0, Vec::len);
            for i in 0..len {
                let x = a.map_or(0.0, |c| c[i]);
                let y = b.map_or(0.0, |c| c[i]);
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }
}

impl PartialEq for FockVector {
    fn eq(&self, other: &Self) -> bool {
        self.base_dim == other.base_dim && self.max_coeff_diff(other) == 0.0
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn flat_index(d: usize, index: &[usize]) -> usize {
    index.iter().fold(0, |acc, &i| acc * d + i)
}

fn multi_index(d: usize, degree: usize, mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; degree];
    for slot in idx.iter_mut().rev() {
        *slot = flat % d;
        flat /= d;
    }
    idx
}

fn permutation_sign(p: &[usize]) -> f64 {
    let inversions = (0..p.len())
        .flat_map(|i| ((i + 1)..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn degree_one(v: &FockVector) -> Result<&[f64], FockError> {
    let nonzero_elsewhere = v
        .components
        .iter()
        .any(|(&k, c)| k != 1 && c.iter().any(|&x| x != 0.0));
    if nonzero_elsewhere {
        return Err(FockError::NotDegreeOne);
    }
    v.component(1).ok_or(FockError::NotDegreeOne)
}

/// Role-filler binding `Σ_i r_i ⊗ f_i`.
pub fn bind(roles: &[FockVector], fillers: &[FockVector]) -> Result<FockVector, FockError> {
    if roles.len() != fillers.len() {
        return Err(FockError::LengthMismatch { left: roles.len(), right: fillers.len() });
    }
    let first = roles.first().ok_or(FockError::EmptyInput)?;
    let mut acc = FockVector::homogeneous(
        first.base_dim,
        2,
        vec![0.0; first.base_dim * first.base_dim],
    )?;
    for (r, f) in roles.iter().zip(fillers) {
        degree_one(r)?;
        degree_one(f)?;
        acc = acc.add(&r.tensor(f)?)?;
    }
    Ok(acc)
}

/// Contracts the first slot of a bound degree-2 tensor with `role`:
/// `f_b = Σ_a r_a T[a, b]`.
pub fn unbind(bound: &FockVector, role: &FockVector) -> Result<FockVector, FockError> {
    bound.check_dim(role)?;
    let r = degree_one(role)?;
    let t = bound.component(2).ok_or(FockError::MissingDegree(2))?;
    let d = bound.base_dim;
    let out = (0..d)
        .map(|b| (0..d).map(|a| r[a] * t[a * d + b]).sum())
        .collect();
    Ok(FockVector::vector(out))
}

/// Circular convolution `z_k = Σ_j x_j y_{(k−j) mod n}` on coordinate tuples.
pub fn circ_conv(x: &[f64], y: &[f64]) -> Result<Vec<f64>, FockError> {
    if x.len() != y.len() {
        return Err(FockError::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    if n == 0 {
        return Err(FockError::EmptyInput);
    }
    Ok((0..n)
        .map(|k| (0..n).map(|j| x[j] * y[(k + n - j) % n]).sum())
        .collect())
}

/// How words of a phrase become degree-1 vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhraseEncoding {
    /// Orthonormal basis word `|j⟩` over the vocabulary.
    Basis,
    /// Word vector `Âᵀ|j⟩`, living in document space.
    WordVectors,
}

/// The ordered tensor product of a phrase's word vectors. An empty phrase
/// is the empty word (degree 0, coefficient 1).
pub fn encode_phrase<S: AsRef<str>>(
    space: &SemanticSpace,
    words: &[S],
    encoding: PhraseEncoding,
) -> Result<FockVector, FockError> {
    let dim = match encoding {
        PhraseEncoding::Basis => space.word_count(),
        PhraseEncoding::WordVectors => space.doc_count(),
    };
    let mut acc = FockVector::scalar(dim, 1.0);
    for w in words {
        let j = space.word_index(w.as_ref())?;
        let v = match encoding {
            PhraseEncoding::Basis => FockVector::basis(dim, j)?,
            PhraseEncoding::WordVectors => FockVector::vector(space.word_vector(j)?.to_vec()),
        };
        acc = acc.tensor(&v)?;
    }
    Ok(acc)
}

/// Vocabulary of the "rose is a rose" phrase vectors.
pub const STEIN_VOCAB: [&str; 3] = ["rose", "is", "a"];

/// Three encodings of "Rose is a rose is a rose is a rose" over the basis
/// `(rose, is, a)`: the bag of words `4|rose⟩ + 3|is⟩ + 3|a⟩`, then
/// `|rose⟩ ⊕ 3|is⟩⊗|a⟩⊗|rose⟩` and `(|rose⟩ + 3|is⟩) ⊕ 3|a⟩⊗|rose⟩`.
pub fn stein_phrases() -> [FockVector; 3] {
    let basis = |i| FockVector::basis(3, i).expect("index < 3");
    let (rose, is, a) = (basis(0), basis(1), basis(2));
    let sum = |x: &FockVector, y: &FockVector| x.add(y).expect("same base");
    let prod = |x: &FockVector, y: &FockVector| x.tensor(y).expect("within cap");

    let s1 = sum(&sum(&rose.scale(4.0), &is.scale(3.0)), &a.scale(3.0));
    let s2 = sum(&rose, &prod(&prod(&is.scale(3.0), &a), &rose));
    let s3 = sum(&sum(&rose, &is.scale(3.0)), &prod(&a.scale(3.0), &rose));
    [s1, s2, s3]
}
