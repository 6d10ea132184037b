//! Dense complex linear algebra used throughout the crate.
//!
//! Eigen- and singular value decompositions are delegated to `nalgebra`; this
//! module fixes the conventions the rest of the crate relies on (descending
//! order, symmetrization before decomposing, relative rank tolerances) and
//! provides subspace helpers built on top of them.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance for rank and null-space decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Eigenvalues below `-PSD_CLAMP_TOL * max(1, |λ|max)` make a matrix "materially" indefinite.
pub const PSD_CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Real eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * C64::from(lambda);
        }
        out
    }
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::from(0.5)
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Positive square root of a positive semidefinite matrix; slightly negative
/// eigenvalues are clamped to zero.
pub fn hermitian_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eigen(m)?;
    let scale = eig.max_abs_value().max(1.0);
    let min = eig.min_value();
    if min < -PSD_CLAMP_TOL * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let v = eig.vectors.column(k);
        out += (v * v.adjoint()) * C64::from(lambda.sqrt());
    }
    Ok(out)
}

/// Projection onto the PSD cone in the Frobenius metric.
pub fn project_psd(m: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(m).expect("square by construction");
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            break;
        }
        let v = eig.vectors.column(k);
        out += (v * v.adjoint()) * C64::from(lambda);
    }
    out
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).map(|e| e.min_value()).unwrap_or(f64::NAN)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = SVD::new(m.clone(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Columns spanning the null space of `m`, orthonormal. Singular values at or
/// below `RANK_TOL` times the largest count as zero.
pub fn null_space(m: &CMatrix) -> CMatrix {
    null_space_scaled(m, 0.0)
}

/// As [`null_space`], with singular values compared against
/// `RANK_TOL * max(σ_max, scale)`. A positive `scale` lets a matrix that is
/// zero up to rounding be recognised as zero.
pub fn null_space_scaled(m: &CMatrix, scale: f64) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMatrix::identity(cols, cols);
    }
    // The thin SVD only exposes min(rows, cols) right singular vectors.
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().fold(0.0_f64, |a, &b| a.max(b)).max(scale);
    let null: Vec<usize> = (0..sigma.len())
        .filter(|&k| smax == 0.0 || sigma[k] <= RANK_TOL * smax)
        .collect();
    CMatrix::from_fn(cols, null.len(), |i, j| v_t[(null[j], i)].conj())
}

/// Orthonormal basis of the column space of `m`.
pub fn column_basis(m: &CMatrix) -> CMatrix {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return CMatrix::zeros(rows, 0);
    }
    let mut keep: Vec<usize> = (0..sigma.len())
        .filter(|&k| sigma[k] > RANK_TOL * smax)
        .collect();
    keep.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    CMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])])
}

pub fn rank(m: &CMatrix) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > RANK_TOL * smax).count()
}

/// Column-major vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvectorize(v: &[C64], n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v)
}
