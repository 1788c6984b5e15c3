//! Symmetric eigendecomposition and an SVD assembled from it.
//!
//! The SVD follows the Schmidt-decomposition construction: diagonalise
//! `N = AᵀA`, take its eigenvectors as right singular vectors, `√λ` as
//! singular values and normalised images `A v` as left singular vectors.

use ndarray::{s, Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Execution, Matrix};

/// Maximum number of cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm, relative to the input norm, at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-12;
/// Singular values at or below this are treated as zero.
pub const ZERO_SINGULAR: f64 = 1e-10;
/// Gram–Schmidt candidates whose residual norm falls below this are skipped.
pub const COMPLETION_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix has no entries")]
    Empty,
    #[error("Jacobi iteration did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {0:e})")]
    NoConvergence(f64),
    #[error("Gram matrix has eigenvalue {0:e}, too negative to be round-off")]
    NegativeEigenvalue(f64),
    #[error("rank {k} out of range 0..={max}")]
    RankOutOfRange { k: usize, max: usize },
    #[error("target dimension {target} smaller than {needed}")]
    DimensionTooSmall { target: usize, needed: usize },
    #[error("malformed decomposition: {0}")]
    Malformed(String),
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending. Eigenvector `i`
/// is column `i` of `eigenvectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> ArrayView1<'_, f64> {
        self.eigenvectors.column(i)
    }

    /// `Σ λ_i v_i v_iᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let scaled = &self.eigenvectors * &Array1::from(self.eigenvalues.clone());
        scaled.dot(&self.eigenvectors.t())
    }
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest `|m_ij − m_ji|`.
pub fn asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    worst
}

fn check_square(m: &Matrix) -> Result<(), SpectralError> {
    if m.nrows() != m.ncols() {
        return Err(SpectralError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    Ok(())
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps run until the off-diagonal Frobenius norm drops below
/// `1e-12·‖M‖_F`. Eigenpairs come back sorted descending (stable, so exact
/// ties keep their original diagonal order) and each eigenvector is signed so
/// its largest-magnitude entry is nonnegative.
pub fn jacobi_eigh(matrix: &Matrix) -> Result<EigenDecomposition, SpectralError> {
    check_square(matrix)?;
    let asym = asymmetry(matrix);
    if asym > JACOBI_TOL * max_abs(matrix) {
        return Err(SpectralError::NotSymmetric(asym));
    }
    let n = matrix.nrows();
    let mut a = matrix.clone();
    // keep the solver on an exactly symmetric copy
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = avg;
            a[[j, i]] = avg;
        }
    }
    let mut v: Matrix = Array2::eye(n);
    let threshold = JACOBI_TOL * frobenius(matrix);

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(SpectralError::NoConvergence(off_diagonal_norm(&a)));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].total_cmp(&a[[i, i]]));
    let eigenvalues = order.iter().map(|&i| a[[i, i]]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).to_owned();
        fix_sign(&mut col);
        eigenvectors.column_mut(dst).assign(&col);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let mut sum = 0.0;
    for ((i, j), x) in a.indexed_iter() {
        if i != j {
            sum += x * x;
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[[p, q]];
    if apq == 0.0 {
        return;
    }
    let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[[k, p]], a[[k, q]]);
        a[[k, p]] = c * akp - s * akq;
        a[[k, q]] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[[p, k]], a[[q, k]]);
        a[[p, k]] = c * apk - s * aqk;
        a[[q, k]] = s * apk + c * aqk;
    }
    a[[p, q]] = 0.0;
    a[[q, p]] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
        v[[k, p]] = c * vkp - s * vkq;
        v[[k, q]] = s * vkp + c * vkq;
    }
}

/// Flips `v` so its largest-magnitude entry (first one on ties) is nonnegative.
fn fix_sign(v: &mut Array1<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.mapv_inplace(|x| -x);
    }
}

/// Thin SVD `A = left · diag(singulars) · right` with `k = min(m, n)` terms.
///
/// `left` is `m×k` with orthonormal columns, `right` is `k×n` with
/// orthonormal rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdTriple {
    pub left: Matrix,
    pub singulars: Vec<f64>,
    pub right: Matrix,
}

impl SvdTriple {
    pub fn shape(&self) -> (usize, usize) {
        (self.left.nrows(), self.right.ncols())
    }

    /// Number of singular values above [`ZERO_SINGULAR`].
    pub fn rank(&self) -> usize {
        self.singulars.iter().filter(|&&s| s > ZERO_SINGULAR).count()
    }

    pub fn reconstruct(&self) -> Matrix {
        self.product(self.singulars.len())
    }

    fn product(&self, k: usize) -> Matrix {
        let mut d = Array1::zeros(self.singulars.len());
        for (i, &s) in self.singulars.iter().enumerate().take(k) {
            d[i] = s;
        }
        (&self.left * &d).dot(&self.right)
    }

    pub fn to_record(&self) -> SvdRecord {
        SvdRecord {
            left: rows_of(&self.left),
            singulars: self.singulars.clone(),
            right: rows_of(&self.right),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("finite floats serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        let record: SvdRecord =
            serde_json::from_str(text).map_err(|e| SpectralError::Malformed(e.to_string()))?;
        record.try_into()
    }
}

/// Serialised form of an [`SvdTriple`]: matrices as lists of rows. Floats
/// use the shortest representation that reads back to the same bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdRecord {
    pub left: Vec<Vec<f64>>,
    pub singulars: Vec<f64>,
    pub right: Vec<Vec<f64>>,
}

impl TryFrom<SvdRecord> for SvdTriple {
    type Error = SpectralError;

    fn try_from(r: SvdRecord) -> Result<Self, SpectralError> {
        let k = r.singulars.len();
        let left = matrix_from_rows(&r.left, k)?;
        let n = r.right.first().map_or(0, Vec::len);
        let right = matrix_from_rows(&r.right, n)?;
        if right.nrows() != k {
            return Err(SpectralError::Malformed(format!(
                "right has {} rows for {k} singular values",
                right.nrows()
            )));
        }
        Ok(SvdTriple { left, singulars: r.singulars, right })
    }
}

pub fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Matrix, SpectralError> {
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(SpectralError::Malformed(format!(
            "row {bad} has {} entries, expected {cols}",
            rows[bad].len()
        )));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), cols), flat).map_err(|e| SpectralError::Malformed(e.to_string()))
}

/// SVD through the spectral analysis of `N = AᵀA`.
///
/// Right singular vectors are the eigenvectors of `N`; left vectors are the
/// normalised images `A v` for singular values above [`ZERO_SINGULAR`] and a
/// Gram–Schmidt completion from the standard basis otherwise.
pub fn svd(a: &Matrix) -> Result<SvdTriple, SpectralError> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(SpectralError::Empty);
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let gram = a.t().dot(a);
    let eig = jacobi_eigh(&gram)?;
    let k = m.min(n);
    let clamp = 1e-12 * frobenius(&gram).max(1.0);

    for &lambda in &eig.eigenvalues[..k] {
        if lambda < -clamp {
            return Err(SpectralError::NegativeEigenvalue(lambda));
        }
    }
    // σ_i = ‖A v_i‖ equals √λ_i exactly in arithmetic, but keeps absolute
    // accuracy ε‖A‖ where √λ only reaches √ε‖A‖ near zero.
    let mut terms: Vec<(f64, Array1<f64>, Array1<f64>)> = (0..k)
        .map(|i| {
            let v = eig.eigenvectors.column(i).to_owned();
            let alpha = a.dot(&v);
            (alpha.dot(&alpha).sqrt(), alpha, v)
        })
        .collect();
    terms.sort_by(|x, y| y.0.total_cmp(&x.0));

    let singulars: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let mut right: Matrix = Array2::zeros((k, n));
    let mut left: Matrix = Array2::zeros((m, k));
    let mut filled = vec![false; k];
    for (i, (sigma, alpha, v)) in terms.into_iter().enumerate() {
        right.row_mut(i).assign(&v);
        if sigma <= ZERO_SINGULAR {
            continue;
        }
        let mut alpha = alpha;
        // re-orthogonalise against earlier columns; a no-op up to round-off
        for _ in 0..2 {
            for j in (0..i).filter(|&j| filled[j]) {
                let proj = left.column(j).dot(&alpha);
                alpha.scaled_add(-proj, &left.column(j));
            }
        }
        let norm = alpha.dot(&alpha).sqrt();
        if norm > ZERO_SINGULAR {
            left.column_mut(i).assign(&(alpha / norm));
            filled[i] = true;
        }
    }
    complete_columns(&mut left, &mut filled);
    Ok(SvdTriple { left, singulars, right })
}

/// Fills every column not marked in `filled` with a unit vector orthogonal to
/// all filled columns, drawn by Gram–Schmidt from the standard basis.
fn complete_columns(q: &mut Matrix, filled: &mut [bool]) {
    let dim = q.nrows();
    let mut candidate = 0;
    for slot in 0..filled.len() {
        if filled[slot] {
            continue;
        }
        while candidate < dim {
            let mut e = Array1::zeros(dim);
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for j in (0..filled.len()).filter(|&j| filled[j]) {
                    let proj = q.column(j).dot(&e);
                    e.scaled_add(-proj, &q.column(j));
                }
            }
            let norm = e.dot(&e).sqrt();
            if norm >= COMPLETION_RESIDUAL {
                q.column_mut(slot).assign(&(e / norm));
                filled[slot] = true;
                break;
            }
        }
        debug_assert!(filled[slot], "standard basis exhausted");
    }
}

/// Rank-k reduction: keeps the `k` largest singular values, zeroes the rest.
pub fn truncate(triple: &SvdTriple, k: usize) -> Result<Matrix, SpectralError> {
    let max = triple.singulars.len();
    if k > max {
        return Err(SpectralError::RankOutOfRange { k, max });
    }
    Ok(triple.product(k))
}

/// Square SVD of the zero-padded operator `[[A, 0], [0, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSvd {
    pub unitary_left: Matrix,
    pub padded_diag: Matrix,
    pub unitary_right: Matrix,
}

impl SquareSvd {
    pub fn dim(&self) -> usize {
        self.padded_diag.nrows()
    }

    pub fn product(&self) -> Matrix {
        self.unitary_left.dot(&self.padded_diag).dot(&self.unitary_right)
    }
}

/// Completes a thin SVD to square `target×target` factors. Extra left columns
/// come from Gram–Schmidt over the standard basis; the right factor is padded
/// with an identity block (after completing its rows when `k < n`).
pub fn embed_square(triple: &SvdTriple, target_dim: usize) -> Result<SquareSvd, SpectralError> {
    let (m, n) = triple.shape();
    let needed = m.max(n);
    if target_dim < needed {
        return Err(SpectralError::DimensionTooSmall { target: target_dim, needed });
    }
    let k = triple.singulars.len();

    let mut left = Array2::zeros((target_dim, target_dim));
    left.slice_mut(s![..m, ..k]).assign(&triple.left);
    let mut filled: Vec<bool> = (0..target_dim).map(|j| j < k).collect();
    complete_columns(&mut left, &mut filled);

    let mut right_t = Array2::zeros((target_dim, target_dim));
    right_t.slice_mut(s![..n, ..k]).assign(&triple.right.t());
    let mut filled: Vec<bool> = (0..target_dim).map(|j| j < k).collect();
    complete_columns(&mut right_t, &mut filled);

    let mut diag = Array2::zeros((target_dim, target_dim));
    for (i, &s) in triple.singulars.iter().enumerate() {
        diag[[i, i]] = s;
    }
    Ok(SquareSvd {
        unitary_left: left,
        padded_diag: diag,
        unitary_right: right_t.reversed_axes(),
    })
}

/// `A Aᵀ`.
pub fn gram_rows(a: &Matrix) -> Matrix {
    a.dot(&a.t())
}

/// `Aᵀ A`.
pub fn gram_cols(a: &Matrix) -> Matrix {
    a.t().dot(a)
}

/// Decomposes many matrices, one work item per matrix.
pub fn batch_svd(matrices: &[Matrix], exec: Execution) -> Vec<Result<SvdTriple, SpectralError>> {
    exec.map(matrices, svd)
}

/// Largest deviation of `qᵀq` from the identity.
pub fn orthonormality_defect(q: &Matrix) -> f64 {
    q.t()
        .dot(q)
        .indexed_iter()
        .map(|((i, j), x)| (x - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}
