//! Dense kernels used by the IRLS iteration.

use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Relative ridge added when a Gram matrix is numerically singular.
pub const FALLBACK_RIDGE: f64 = 1e-12;

/// Solves `G x = b` for symmetric positive definite `G` by Cholesky.
/// Only the lower triangle of `G` is read.
pub fn spd_solve(g: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if !g.is_square() || g.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "system {}x{} with right-hand side of length {}",
            g.nrows(),
            g.ncols(),
            b.len()
        )));
    }
    let chol = factor(g.clone())?;
    Ok(chol.solve(b))
}

fn factor(g: DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(g).ok_or(Error::NotPositiveDefinite)
}

/// Cholesky factor, rejecting pivots that are tiny relative to the diagonal.
fn factor_well_conditioned(g: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let max_diag = g.diagonal().max();
    let chol = Cholesky::new(g)?;
    let min_pivot = chol.l_dirty().diagonal().min();
    (min_pivot * min_pivot > 1e-13 * max_diag).then_some(chol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub x: DVector<f64>,
    /// Ridge that had to be added to the Gram matrix, if any.
    pub ridge: Option<f64>,
}

/// Minimum-ℓ2-norm minimiser of `‖y − Ax‖²`.
///
/// Uses `A'(AA')⁻¹y` when `A` is wide and `(A'A)⁻¹A'y` when it is tall. A
/// rank-deficient Gram matrix is regularised with [`FALLBACK_RIDGE`] times
/// its mean diagonal and the ridge is reported.
pub fn min_norm_least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<LeastSquares> {
    if a.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} rows, y has {} entries",
            a.nrows(),
            y.len()
        )));
    }
    let wide = a.nrows() <= a.ncols();
    let gram = if wide { a * a.transpose() } else { a.tr_mul(a) };
    let (chol, ridge) = match factor_well_conditioned(gram.clone()) {
        Some(c) => (c, None),
        None => {
            let dim = gram.nrows();
            let scale = gram.trace() / dim as f64;
            let ridge = FALLBACK_RIDGE * if scale > 0.0 { scale } else { 1.0 };
            warn!("Gram matrix is singular; adding ridge {ridge:e}");
            let shifted = gram + DMatrix::identity(dim, dim) * ridge;
            (factor(shifted)?, Some(ridge))
        }
    };
    let x = if wide {
        a.tr_mul(&chol.solve(y))
    } else {
        chol.solve(&a.tr_mul(y))
    };
    Ok(LeastSquares { x, ridge })
}

/// `D (B'B + τI)⁻¹ B' y` with `B = A D` and `D = diag(scale)`.
///
/// Evaluated through the `n × n` system `(BB' + τI) z = y`, `u = B'z` when
/// `A` has fewer rows than columns; the two forms are algebraically equal.
pub fn scaled_ridge_solve(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    scale: &DVector<f64>,
    tau: f64,
) -> Result<DVector<f64>> {
    let (rows, cols) = a.shape();
    if scale.len() != cols || y.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "A is {rows}x{cols}, y has {} entries, scale has {}",
            y.len(),
            scale.len()
        )));
    }
    let mut b = a.clone();
    for (j, mut col) in b.column_iter_mut().enumerate() {
        col *= scale[j];
    }
    let u = if rows < cols {
        let mut g = &b * b.transpose();
        for i in 0..rows {
            g[(i, i)] += tau;
        }
        let z = factor(g)?.solve(y);
        b.tr_mul(&z)
    } else {
        let mut g = b.tr_mul(&b);
        for i in 0..cols {
            g[(i, i)] += tau;
        }
        factor(g)?.solve(&b.tr_mul(y))
    };
    Ok(u.component_mul(scale))
}

/// Reference implementation of [`scaled_ridge_solve`] that always factors
/// the `N × N` Gram matrix.
pub fn scaled_ridge_solve_primal(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    scale: &DVector<f64>,
    tau: f64,
) -> Result<DVector<f64>> {
    let b = a * DMatrix::from_diagonal(scale);
    let g = b.tr_mul(&b) + DMatrix::identity(a.ncols(), a.ncols()) * tau;
    Ok(spd_solve(&g, &b.tr_mul(y))?.component_mul(scale))
}
