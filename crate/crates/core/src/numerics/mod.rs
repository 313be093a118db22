//! Scalars, dense matrices, rank and minimum-residual solves.
//!
//! Everything above this module is generic over [`Scalar`], which is either
//! [`Rational`] (exact mode) or `f64` (float mode). Exact mode ignores every
//! tolerance in [`Tolerances`].

mod linalg;
mod matrix;
mod scalar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::{basis_vector, dot, mat_vec, norm_inf, norm_sq, Matrix};
pub use scalar::{format_rational, Mode, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("matrix has a zero dimension ({rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, got: usize },
    #[error("dimension mismatch: {what} ({left} vs {right})")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
}

/// Thresholds for float mode. All are ignored in exact mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Pivot magnitude below which a column counts as dependent.
    pub rank_tol: f64,
    /// Relative threshold for span membership: `‖r‖ <= residual_tol·(1+‖v‖)`.
    pub residual_tol: f64,
    /// Relative threshold for inequality violations: `gap < -gap_tol·(1+|lhs|+|rhs|)`.
    pub gap_tol: f64,
    /// Absolute slack for row/column sums and entry signs.
    pub stochastic_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-10,
            residual_tol: 1e-9,
            gap_tol: 1e-12,
            stochastic_tol: 1e-12,
        }
    }
}

impl Tolerances {
    /// `true` iff every threshold is a finite nonnegative number.
    pub fn is_valid(&self) -> bool {
        [self.rank_tol, self.residual_tol, self.gap_tol, self.stochastic_tol]
            .iter()
            .all(|t| t.is_finite() && *t >= 0.0)
    }
}

/// Result of a minimum-residual solve `min ‖M·c − v‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<S> {
    pub coeffs: Vec<S>,
    /// `‖M·coeffs − v‖₂²`, exact in exact mode.
    pub residual_sq: S,
}

impl<S: Scalar> LeastSquares<S> {
    pub fn residual_norm(&self) -> f64 {
        self.residual_sq.as_f64().max(0.0).sqrt()
    }
}

/// Rank of `m`: fraction-free elimination in exact mode, partial-pivot
/// elimination counting pivots above `rank_tol` in float mode.
pub fn rank<S: Scalar>(m: &Matrix<S>, tol: &Tolerances) -> Result<usize, NumericsError> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(NumericsError::EmptyMatrix {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(S::rank_kernel(m, tol))
}

/// Coefficients minimizing `‖M·c − v‖₂` and the squared minimum.
///
/// Exact mode solves the normal equations over the rationals (free variables
/// set to zero); float mode uses Householder QR with column pivoting.
pub fn min_residual_solve<S: Scalar>(
    m: &Matrix<S>,
    v: &[S],
    tol: &Tolerances,
) -> Result<LeastSquares<S>, NumericsError> {
    if m.rows() != v.len() {
        return Err(NumericsError::DimensionMismatch {
            what: "matrix rows vs vector length",
            left: m.rows(),
            right: v.len(),
        });
    }
    Ok(S::least_squares_kernel(m, v, tol))
}

/// Basis of `{w : wᵀ·M = 0}`, the orthogonal complement of the column span.
///
/// In float mode the basis is orthonormal, so `Σ (wᵀv)²` over the basis is the
/// squared least-squares residual of `v`.
pub fn left_null_space<S: Scalar>(m: &Matrix<S>, tol: &Tolerances) -> Vec<Vec<S>> {
    S::left_null_kernel(m, tol)
}

/// `true` iff `v` lies in the column span of `m` under the mode's acceptance rule.
pub fn in_column_span<S: Scalar>(
    m: &Matrix<S>,
    v: &[S],
    tol: &Tolerances,
) -> Result<bool, NumericsError> {
    let ls = min_residual_solve(m, v, tol)?;
    Ok(S::residual_accepted(&ls.residual_sq, &norm_sq(v), tol))
}
