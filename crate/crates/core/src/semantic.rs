//! Semantic layer over a text operator `Â`: word and sentence vectors, the
//! density operators `ρ = ÂÂᵀ` and `N = ÂᵀÂ`, cosines, the supercharge and
//! diagonal purification.

use ndarray::{s, Array1, Array2};
use thiserror::Error;

use crate::corpus::{TermDocMatrix, Vocabulary};
use crate::spectral::{self, SpectralError};
use crate::{Execution, Matrix};

/// Row norms below this make a cosine undefined.
pub const ZERO_NORM: f64 = 1e-12;
/// Eigenvalues of a purified block above this contribute a factor column.
pub const FACTOR_EIGEN_FLOOR: f64 = 1e-12;
/// Round-off allowance for symmetry and positivity of purification input.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticError {
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("word {0} has a zero vector")]
    ZeroVector(usize),
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("operator has {rows} rows but vocabulary has {vocab} words")]
    DimensionMismatch { rows: usize, vocab: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("threshold must be finite and nonnegative, got {0}")]
    InvalidThreshold(f64),
    #[error("every diagonal entry falls below the threshold")]
    EmptyKeptSet,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// An immutable text operator with its cached density operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticSpace {
    operator: Matrix,
    vocab: Vocabulary,
    rho: Matrix,
    nmat: Matrix,
}

impl SemanticSpace {
    pub fn new(operator: Matrix, vocab: Vocabulary) -> Result<Self, SemanticError> {
        if operator.nrows() != vocab.len() {
            return Err(SemanticError::DimensionMismatch {
                rows: operator.nrows(),
                vocab: vocab.len(),
            });
        }
        let rho = spectral::gram_rows(&operator);
        let nmat = spectral::gram_cols(&operator);
        Ok(Self { operator, vocab, rho, nmat })
    }

    /// The raw (or weighted) count matrix as operator.
    pub fn from_matrix(matrix: &TermDocMatrix) -> Self {
        Self::new(matrix.entries().clone(), matrix.vocab().clone()).expect("shape checked by TermDocMatrix")
    }

    /// The rank-`k` reduction of `matrix` as operator.
    pub fn reduced(matrix: &TermDocMatrix, k: usize) -> Result<Self, SemanticError> {
        let triple = spectral::svd(matrix.entries())?;
        let reduced = spectral::truncate(&triple, k)?;
        Self::new(reduced, matrix.vocab().clone())
    }

    pub fn operator(&self) -> &Matrix {
        &self.operator
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// `ρ = ÂÂᵀ`, indexed by words.
    pub fn rho(&self) -> &Matrix {
        &self.rho
    }

    /// `N = ÂᵀÂ`, indexed by documents.
    pub fn nmat(&self) -> &Matrix {
        &self.nmat
    }

    pub fn word_count(&self) -> usize {
        self.operator.nrows()
    }

    pub fn doc_count(&self) -> usize {
        self.operator.ncols()
    }

    pub fn word_index(&self, word: &str) -> Result<usize, SemanticError> {
        self.vocab
            .index_of(word)
            .ok_or_else(|| SemanticError::UnknownWord(word.to_string()))
    }

    /// `|s_n⟩ = Â|n⟩`, column `n` of the operator.
    pub fn sentence_vector(&self, n: usize) -> Result<Array1<f64>, SemanticError> {
        check_index(n, self.doc_count())?;
        Ok(self.operator.column(n).to_owned())
    }

    /// `⟨w_m| = ⟨m|Â`, row `m` of the operator.
    pub fn word_vector(&self, m: usize) -> Result<Array1<f64>, SemanticError> {
        check_index(m, self.word_count())?;
        Ok(self.operator.row(m).to_owned())
    }

    /// `ρ_{m1 m2} / √(ρ_{m1 m1} ρ_{m2 m2})`.
    pub fn cosine(&self, m1: usize, m2: usize) -> Result<f64, SemanticError> {
        check_index(m1, self.word_count())?;
        check_index(m2, self.word_count())?;
        for m in [m1, m2] {
            if self.rho[[m, m]].sqrt() < ZERO_NORM {
                return Err(SemanticError::ZeroVector(m));
            }
        }
        Ok(self.rho[[m1, m2]] / (self.rho[[m1, m1]] * self.rho[[m2, m2]]).sqrt())
    }

    pub fn cosine_words(&self, w1: &str, w2: &str) -> Result<f64, SemanticError> {
        self.cosine(self.word_index(w1)?, self.word_index(w2)?)
    }

    /// All pairwise word cosines, one row per work item. Entries involving a
    /// zero word vector are NaN.
    pub fn similarity_matrix(&self, exec: Execution) -> Matrix {
        let m = self.word_count();
        let norms: Vec<f64> = (0..m).map(|i| self.rho[[i, i]].sqrt()).collect();
        let rows = exec.map_range(m, |i| {
            (0..m)
                .map(|j| {
                    if norms[i] < ZERO_NORM || norms[j] < ZERO_NORM {
                        f64::NAN
                    } else {
                        self.rho[[i, j]] / (norms[i] * norms[j])
                    }
                })
                .collect::<Vec<f64>>()
        });
        Array2::from_shape_vec((m, m), rows.into_iter().flatten().collect()).expect("square")
    }

    /// Word mixing parameters `p^w_n = ρ_nn`.
    pub fn word_weights(&self) -> Vec<f64> {
        self.rho.diag().to_vec()
    }

    /// Sentence mixing parameters `p^s_n = N_nn`.
    pub fn sentence_weights(&self) -> Vec<f64> {
        self.nmat.diag().to_vec()
    }

    /// `‖Â‖²_HS`.
    pub fn hilbert_schmidt_sq(&self) -> f64 {
        self.operator.iter().map(|x| x * x).sum()
    }

    pub fn supercharge(&self) -> Supercharge {
        build_supercharge(&self.operator)
    }

    /// Drops words with `ρ_nn < epsilon` and factors the rest as `ρ̃ = BBᵀ`.
    pub fn purify_rho(&self, epsilon: f64) -> Result<Purification, SemanticError> {
        purify_diagonal(&self.rho, epsilon)
    }

    /// Drops documents with `N_nn < epsilon` and factors the rest as
    /// `Ñ = CᵀC`.
    pub fn purify_n(&self, epsilon: f64) -> Result<Purification, SemanticError> {
        let p = purify_diagonal(&self.nmat, epsilon)?;
        Ok(Purification {
            factor: p.factor.reversed_axes(),
            kept: p.kept,
            side: FactorSide::Right,
        })
    }
}

fn check_index(index: usize, len: usize) -> Result<(), SemanticError> {
    if index >= len {
        Err(SemanticError::IndexOutOfRange { index, len })
    } else {
        Ok(())
    }
}

/// `Q = [[0, A], [Aᵀ, 0]]` and `H = Q²`, which is block-diagonal `ρ ⊕ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Supercharge {
    pub q: Matrix,
    pub h: Matrix,
    words: usize,
}

impl Supercharge {
    /// Upper-left `words × words` block of `H`.
    pub fn rho_block(&self) -> Matrix {
        self.h.slice(s![..self.words, ..self.words]).to_owned()
    }

    /// Lower-right block of `H`.
    pub fn n_block(&self) -> Matrix {
        self.h.slice(s![self.words.., self.words..]).to_owned()
    }

    /// Largest magnitude in the off-diagonal blocks of `H`.
    pub fn off_block_max(&self) -> f64 {
        let w = self.words;
        self.h
            .slice(s![..w, w..])
            .iter()
            .chain(self.h.slice(s![w.., ..w]).iter())
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

pub fn build_supercharge(a: &Matrix) -> Supercharge {
    let (m, n) = a.dim();
    let mut q = Array2::zeros((m + n, m + n));
    q.slice_mut(s![..m, m..]).assign(a);
    q.slice_mut(s![m.., ..m]).assign(&a.t());
    let h = q.dot(&q);
    debug_assert!(spectral::asymmetry(&q) == 0.0);
    Supercharge { q, h, words: m }
}

/// Which side the factor multiplies from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSide {
    /// Reduced operator is `factor · factorᵀ`.
    Left,
    /// Reduced operator is `factorᵀ · factor`.
    Right,
}

/// Result of diagonal purification: surviving indices (ascending) and a
/// rectangular factor of the kept principal submatrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    pub factor: Matrix,
    pub kept: Vec<usize>,
    pub side: FactorSide,
}

impl Purification {
    /// The kept principal submatrix rebuilt from the factor.
    pub fn reduced(&self) -> Matrix {
        match self.side {
            FactorSide::Left => self.factor.dot(&self.factor.t()),
            FactorSide::Right => self.factor.t().dot(&self.factor),
        }
    }

    /// Number of factor components (rank of the kept block).
    pub fn rank(&self) -> usize {
        match self.side {
            FactorSide::Left => self.factor.ncols(),
            FactorSide::Right => self.factor.nrows(),
        }
    }
}

/// Principal submatrix on indices whose diagonal entry is `>= epsilon`.
pub fn principal_submatrix(m: &Matrix, kept: &[usize]) -> Matrix {
    Array2::from_shape_fn((kept.len(), kept.len()), |(i, j)| m[[kept[i], kept[j]]])
}

/// Removes rows and columns with small diagonal entries from a PSD matrix
/// and factors what remains as `B Bᵀ`, `B = E √Λ` over eigenvalues above
/// [`FACTOR_EIGEN_FLOOR`].
pub fn purify_diagonal(positive: &Matrix, epsilon: f64) -> Result<Purification, SemanticError> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(SemanticError::InvalidThreshold(epsilon));
    }
    if positive.nrows() != positive.ncols() {
        return Err(SemanticError::NotSquare);
    }
    let scale = positive.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let asym = spectral::asymmetry(positive);
    if asym > PSD_TOL * scale {
        return Err(SemanticError::NotSymmetric(asym));
    }
    let kept: Vec<usize> = (0..positive.nrows())
        .filter(|&i| positive[[i, i]] >= epsilon)
        .collect();
    if kept.is_empty() {
        return Err(SemanticError::EmptyKeptSet);
    }
    let mut sub = principal_submatrix(positive, &kept);
    let sub_t = sub.t().to_owned();
    sub = (&sub + &sub_t) * 0.5;
    let eig = spectral::jacobi_eigh(&sub)?;
    if let Some(&low) = eig.eigenvalues.last() {
        if low < -PSD_TOL * scale {
            return Err(SemanticError::NotPositive(low));
        }
    }
    let cols: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > FACTOR_EIGEN_FLOOR)
        .collect();
    let mut factor = Array2::zeros((kept.len(), cols.len()));
    for (dst, &src) in cols.iter().enumerate() {
        let root = eig.eigenvalues[src].sqrt();
        factor
            .column_mut(dst)
            .assign(&(&eig.eigenvectors.column(src) * root));
    }
    Ok(Purification {
        factor,
        kept,
        side: FactorSide::Left,
    })
}
