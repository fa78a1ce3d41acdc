//! Dense real least squares by singular value decomposition.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Solution of a row-scaled least-squares problem.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// ‖Mx − y‖₂ of the row-scaled system.
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Minimizes ‖Mx − y‖₂ for a row-major `rows × cols` matrix after dividing
/// each row (and its right-hand side) by the row's ∞-norm. Fails with
/// `RankDeficient` when σ_min < rank_tol·σ_max.
pub fn solve_row_scaled(
    rows: usize,
    cols: usize,
    matrix: &[f64],
    rhs: &[f64],
    rank_tol: f64,
) -> Result<LeastSquares> {
    if matrix.len() != rows * cols || rhs.len() != rows || cols == 0 {
        return Err(Error::InvalidParameter("matrix dimensions do not match"));
    }
    if rows < cols {
        return Err(Error::InvalidParameter("least-squares system is underdetermined"));
    }
    let mut m = DMatrix::from_row_slice(rows, cols, matrix);
    let mut y = DVector::from_column_slice(rhs);
    for i in 0..rows {
        let s = m.row(i).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if s > 0.0 && s.is_finite() {
            m.row_mut(i).scale_mut(1.0 / s);
            y[i] /= s;
        }
    }
    if m.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("least-squares system has non-finite entries"));
    }
    let svd = m.clone().svd(true, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let sigma_min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(sigma_min >= rank_tol * sigma_max) || sigma_max == 0.0 {
        return Err(Error::RankDeficient { sigma_min, sigma_max });
    }
    let x = svd
        .solve(&y, 0.0)
        .map_err(|_| Error::RankDeficient { sigma_min, sigma_max })?;
    let residual = (&m * &x - &y).norm();
    Ok(LeastSquares { solution: x.iter().copied().collect(), residual, sigma_min, sigma_max })
}
