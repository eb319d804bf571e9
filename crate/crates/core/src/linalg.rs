//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here works on symmetric matrices: checks for symmetry and
//! (semi)definiteness, extreme eigenvalues, symmetric square roots and
//! Cholesky-based inverses.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Symmetry tolerance used when validating input matrices.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues down to this value still count as positive semidefinite.
pub const PSD_TOL: f64 = -1e-9;
/// Minimum eigenvalue required for positive definiteness.
pub const PD_TOL: f64 = 1e-12;
/// Condition number beyond which a matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Largest absolute entry of `m - mᵀ`.
pub fn asymmetry(m: &Mat) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn sym_eigenvalues(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &Mat) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

pub fn max_eigenvalue(m: &Mat) -> f64 {
    sym_eigenvalues(m).last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// `(λ_min, λ_max)` of a symmetric matrix.
pub fn eigen_extremes(m: &Mat) -> (f64, f64) {
    let ev = sym_eigenvalues(m);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (f64::INFINITY, f64::NEG_INFINITY),
    }
}

pub fn is_positive_definite(m: &Mat, tol: f64) -> bool {
    min_eigenvalue(m) > tol
}

/// 2-norm condition number of a general square matrix (via singular values).
pub fn condition_number(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let hi = sv.max();
    let lo = sv.min();
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Inverse of a symmetric positive-definite matrix via Cholesky, symmetrized.
/// Returns `None` when the factorization fails.
pub fn spd_inverse(m: &Mat) -> Option<Mat> {
    if m.nrows() == 0 {
        return Some(Mat::zeros(0, 0));
    }
    let chol = symmetrize(m).cholesky()?;
    Some(symmetrize(&chol.inverse()))
}

/// `m^{-1/2}` for a symmetric matrix, with eigenvalues clamped from below at `floor`.
pub fn inv_sqrt_sym(m: &Mat, floor: f64) -> Mat {
    map_spectrum(m, |l| 1.0 / l.max(floor).sqrt())
}

/// Symmetric square root of a PSD matrix; negative eigenvalues are clamped to zero.
pub fn sqrt_psd(m: &Mat) -> Mat {
    map_spectrum(m, |l| l.max(0.0).sqrt())
}

fn map_spectrum(m: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    if m.nrows() == 0 {
        return m.clone();
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let d = eig.eigenvalues.map(f);
    let v = &eig.eigenvectors;
    symmetrize(&(v * Mat::from_diagonal(&d) * v.transpose()))
}

/// `tr(A·B)` without forming the product.
pub fn trace_of_product(a: &Mat, b: &Mat) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `log det` of a symmetric positive-definite matrix; `None` if not PD.
pub fn log_det_spd(m: &Mat) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let chol = symmetrize(m).cholesky()?;
    Some(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn frobenius(m: &Mat) -> f64 {
    m.norm()
}
