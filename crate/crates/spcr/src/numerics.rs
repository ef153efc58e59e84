//! Dense linear-algebra building blocks for the regression pipeline.
//!
//! Everything downstream operates on column-centered data, so this module
//! owns the centering step plus the singular/spectral decompositions,
//! including the deterministic conventions the rest of the crate relies on:
//!
//! - rank tolerance: singular values are kept while `l > eps * max(N, d) * l_max`;
//! - sign convention: every right singular vector and every eigenvector is
//!   flipped so its largest-magnitude entry is positive (ties broken by the
//!   smallest index), which makes decompositions reproducible across runs.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{Eigh, JobSvd, SVDDC, UPLO};

use crate::error::{Error, Result};

/// A column-centered data matrix together with the means that were removed.
#[derive(Debug, Clone)]
pub struct CenteredMatrix {
    values: Array2<f64>,
    column_means: Array1<f64>,
}

impl CenteredMatrix {
    /// Number of rows (observations).
    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    /// Number of columns (variables).
    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    /// The centered values, one observation per row.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// The per-column means removed during centering.
    pub fn column_means(&self) -> &Array1<f64> {
        &self.column_means
    }

    /// Reassembles a centered matrix from already-centered values and their
    /// removed means. Used when subsetting columns, which preserves centering.
    pub(crate) fn from_parts(values: Array2<f64>, column_means: Array1<f64>) -> Self {
        CenteredMatrix {
            values,
            column_means,
        }
    }
}

/// Thin singular value decomposition `X = U L V'` truncated at the rank
/// tolerance, with the sign convention applied to the columns of `V`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// Left singular vectors, N x r with orthonormal columns.
    pub u: Array2<f64>,
    /// Singular values in nonincreasing order, all above the rank tolerance.
    pub singular_values: Array1<f64>,
    /// Right singular vectors, d x r with orthonormal columns.
    pub v: Array2<f64>,
    /// Numerical rank r.
    pub rank: usize,
}

/// Spectral decomposition of a symmetric matrix with eigenvalues in
/// nonincreasing order and sign-fixed eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

/// Subtracts the column means from a raw data matrix.
///
/// Requires at least two rows and one column; every entry must be finite.
pub fn center_columns(raw: &Array2<f64>) -> Result<CenteredMatrix> {
    let (n, d) = raw.dim();
    if n < 2 {
        return Err(Error::InvalidData(format!(
            "need at least 2 rows to center, got {n}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidData("matrix has no columns".to_string()));
    }
    for ((i, j), &v) in raw.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::InvalidData(format!(
                "non-finite value {v} at row {i}, column {j}"
            )));
        }
    }
    let column_means = raw
        .mean_axis(Axis(0))
        .expect("non-empty matrix has column means");
    let values = raw - &column_means;
    Ok(CenteredMatrix {
        values,
        column_means,
    })
}

/// Default rank tolerance: `eps * max(N, d) * sigma_max`.
pub(crate) fn rank_tolerance(n_rows: usize, n_cols: usize, sigma_max: f64) -> f64 {
    f64::EPSILON * n_rows.max(n_cols) as f64 * sigma_max
}

/// Flips each column of `v` (and the paired column of `u`, when present) so
/// that the entry of largest magnitude in the `v` column is positive.
fn fix_signs(v: &mut Array2<f64>, mut u: Option<&mut Array2<f64>>) {
    for j in 0..v.ncols() {
        let col = v.column(j);
        let mut best = 0usize;
        let mut best_abs = f64::NEG_INFINITY;
        for (i, &x) in col.iter().enumerate() {
            let a = x.abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if col[best] < 0.0 {
            v.column_mut(j).mapv_inplace(|x| -x);
            if let Some(u) = u.as_deref_mut() {
                u.column_mut(j).mapv_inplace(|x| -x);
            }
        }
    }
}

/// Thin SVD of a centered matrix, truncated at the rank tolerance.
///
/// `tolerance` overrides the default `eps * max(N, d) * sigma_max` policy
/// with an absolute threshold on the singular values.
pub fn thin_svd(x: &CenteredMatrix, tolerance: Option<f64>) -> Result<ThinSvd> {
    let (n, d) = x.values.dim();
    let (u, s, vt) = x.values.svddc(JobSvd::Some)?;
    let u = u.ok_or_else(|| Error::NumericalFailure("svd returned no left factor".into()))?;
    let vt = vt.ok_or_else(|| Error::NumericalFailure("svd returned no right factor".into()))?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let tol = tolerance.unwrap_or_else(|| rank_tolerance(n, d, sigma_max));
    let rank = s.iter().take_while(|&&l| l > tol).count();

    let mut u = u.slice(ndarray::s![.., ..rank]).to_owned();
    let mut v = vt.slice(ndarray::s![..rank, ..]).t().to_owned();
    let singular_values = s.slice(ndarray::s![..rank]).to_owned();
    fix_signs(&mut v, Some(&mut u));
    Ok(ThinSvd {
        u,
        singular_values,
        v,
        rank,
    })
}

/// Spectral decomposition of a symmetric matrix.
///
/// The input must be symmetric up to `1e-10` relative to its largest entry;
/// eigenvalues come back in nonincreasing order with sign-fixed eigenvectors.
pub fn spectral_decompose(s: &Array2<f64>) -> Result<Spectral> {
    let (r, c) = s.dim();
    if r != c || r == 0 {
        return Err(Error::InvalidData(format!(
            "spectral decomposition needs a square matrix, got {r} x {c}"
        )));
    }
    let mut max_abs: f64 = 0.0;
    for &v in s.iter() {
        if !v.is_finite() {
            return Err(Error::InvalidData("non-finite entry in symmetric matrix".into()));
        }
        max_abs = max_abs.max(v.abs());
    }
    let sym_tol = 1e-10 * max_abs.max(1.0);
    for i in 0..r {
        for j in (i + 1)..r {
            if (s[[i, j]] - s[[j, i]]).abs() > sym_tol {
                return Err(Error::InvalidData(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    s[[i, j]],
                    s[[j, i]]
                )));
            }
        }
    }
    let (vals, vecs) = s.eigh(UPLO::Lower)?;
    // eigh returns ascending eigenvalues; flip to nonincreasing.
    let k = vals.len();
    let eigenvalues = Array1::from_iter(vals.iter().rev().copied());
    let mut eigenvectors = Array2::zeros((k, k));
    for j in 0..k {
        eigenvectors.column_mut(j).assign(&vecs.column(k - 1 - j));
    }
    fix_signs(&mut eigenvectors, None);
    Ok(Spectral {
        eigenvalues,
        eigenvectors,
    })
}

/// Inverse square root of the response Gram matrix `(Y'Y)^(-1/2)`.
///
/// Fails with [`Error::DegenerateResponse`] when `Y'Y` is rank deficient.
pub fn inv_sqrt_gram(y: &CenteredMatrix) -> Result<Array2<f64>> {
    let g = y.values.t().dot(&y.values);
    let spectral = spectral_decompose(&g)?;
    let lambda_max = spectral.eigenvalues[0];
    if lambda_max <= 0.0 {
        return Err(Error::DegenerateResponse(
            "response has no variance".to_string(),
        ));
    }
    let tol = rank_tolerance(y.n_rows(), y.n_cols(), lambda_max);
    if let Some(&lmin) = spectral
        .eigenvalues
        .iter()
        .find(|&&l| l <= tol)
    {
        return Err(Error::DegenerateResponse(format!(
            "Y'Y has eigenvalue {lmin:e} at or below tolerance {tol:e}; \
             response columns are linearly dependent"
        )));
    }
    let q = spectral.eigenvalues.len();
    let mut m = Array2::zeros((q, q));
    for a in 0..q {
        for b in 0..q {
            let mut acc = 0.0;
            for j in 0..q {
                acc += spectral.eigenvectors[[a, j]] * spectral.eigenvectors[[b, j]]
                    / spectral.eigenvalues[j].sqrt();
            }
            m[[a, b]] = acc;
        }
    }
    Ok(m)
}

/// Spectral decomposition of the scaled predictor Gram matrix `(1/N) X'X`.
pub(crate) fn gram_spectral(x: &CenteredMatrix) -> Result<Spectral> {
    let n = x.n_rows() as f64;
    let mut g = x.values.t().dot(&x.values);
    g.mapv_inplace(|v| v / n);
    spectral_decompose(&g)
}

/// Number of Gram eigenvalues above the rank tolerance `eps * max(N, m) * lambda_max`.
pub(crate) fn gram_rank(spectral: &Spectral, n_rows: usize, n_cols: usize) -> usize {
    let lambda_max = spectral.eigenvalues.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return 0;
    }
    let tol = rank_tolerance(n_rows, n_cols, lambda_max);
    spectral
        .eigenvalues
        .iter()
        .take_while(|&&l| l > tol)
        .count()
}
