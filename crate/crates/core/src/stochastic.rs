//! Doubly stochastic matrices: validation, the averaging matrix `S_n`, and a
//! seeded sampler of convex combinations of permutation matrices.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numerics::{Matrix, NumericsError, Scalar, Tolerances};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StochasticError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("row {row} does not sum to 1")]
    RowSumOff { row: usize },
    #[error("column {col} does not sum to 1")]
    ColSumOff { col: usize },
    #[error("not a permutation of 1..={n}: {sigma:?}")]
    InvalidPermutation { n: usize, sigma: Vec<usize> },
    #[error("number of permutation terms must be at least 1")]
    ZeroTerms,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A square matrix that passed [`validate`]. Indices in errors are one-based.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochastic<S> {
    matrix: Matrix<S>,
}

impl<S: Scalar> DoublyStochastic<S> {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.matrix
    }

    /// `P·x`
    pub fn apply(&self, x: &[S]) -> Result<Vec<S>, NumericsError> {
        self.matrix.mul_vec(x)
    }

    /// The same matrix with entries converted to binary64.
    pub fn to_float(&self) -> DoublyStochastic<f64> {
        DoublyStochastic {
            matrix: self.matrix.map(|x| x.as_f64()),
        }
    }
}

/// Checks nonnegativity, then row sums, then column sums, reporting the first
/// offending index of the first failing check.
pub fn validate<S: Scalar>(
    m: Matrix<S>,
    tol: &Tolerances,
) -> Result<DoublyStochastic<S>, StochasticError> {
    if !m.is_square() {
        return Err(StochasticError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Err(StochasticError::ZeroOrder);
    }
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j).is_negative_beyond(tol.stochastic_tol) {
                return Err(StochasticError::NegativeEntry { row: i + 1, col: j + 1 });
            }
        }
    }
    let off_one = |s: S| !(s - S::one()).is_zero_within(tol.stochastic_tol);
    if let Some(i) = m.row_sums().into_iter().position(off_one) {
        return Err(StochasticError::RowSumOff { row: i + 1 });
    }
    if let Some(j) = m.col_sums().into_iter().position(off_one) {
        return Err(StochasticError::ColSumOff { col: j + 1 });
    }
    Ok(DoublyStochastic { matrix: m })
}

pub fn identity<S: Scalar>(n: usize) -> Result<DoublyStochastic<S>, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroOrder);
    }
    Ok(DoublyStochastic {
        matrix: Matrix::identity(n),
    })
}

/// `S_n`, the matrix with every entry equal to `1/n`.
pub fn uniform<S: Scalar>(n: usize) -> Result<DoublyStochastic<S>, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroOrder);
    }
    let entry = S::ratio(1, n as i64);
    Ok(DoublyStochastic {
        matrix: Matrix::from_fn(n, n, |_, _| entry.clone()),
    })
}

/// A bijection of `{1..n}`, stored as one-based images `sigma[i-1] = σ(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    sigma: Vec<usize>,
}

impl Permutation {
    pub fn new(sigma: Vec<usize>) -> Result<Self, StochasticError> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s == 0 || s > n || seen[s - 1] {
                return Err(StochasticError::InvalidPermutation { n, sigma });
            }
            seen[s - 1] = true;
        }
        if n == 0 {
            return Err(StochasticError::ZeroOrder);
        }
        Ok(Permutation { sigma })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            sigma: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.sigma
    }

    /// The matrix with a one at `(i, σ(i))` for every row `i`.
    pub fn to_matrix<S: Scalar>(&self) -> DoublyStochastic<S> {
        let n = self.n();
        DoublyStochastic {
            matrix: Matrix::from_fn(n, n, |i, j| {
                if self.sigma[i] == j + 1 {
                    S::one()
                } else {
                    S::zero()
                }
            }),
        }
    }
}

/// Random convex combination of `k` random permutation matrices.
///
/// Weights are `k` positive draws normalized to sum to one (not a uniform
/// sample of the Birkhoff polytope). Deterministic for a fixed seed; in exact
/// mode the weights are rationals with small denominators.
pub fn sample_birkhoff<S: Scalar>(
    n: usize,
    k: usize,
    seed: u64,
) -> Result<DoublyStochastic<S>, StochasticError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_birkhoff_with(n, k, &mut rng)
}

pub(crate) fn sample_birkhoff_with<S: Scalar, R: rand::Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<DoublyStochastic<S>, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroOrder);
    }
    if k == 0 {
        return Err(StochasticError::ZeroTerms);
    }
    let mut terms = Vec::with_capacity(k);
    for _ in 0..k {
        let mut sigma: Vec<usize> = (1..=n).collect();
        sigma.shuffle(rng);
        terms.push((Permutation { sigma }, S::draw_weight(rng)));
    }
    let total: S = terms.iter().map(|(_, w)| w.clone()).sum();
    let mut entries = vec![S::zero(); n * n];
    for (perm, w) in &terms {
        let w = w.clone() / total.clone();
        for (i, &s) in perm.images().iter().enumerate() {
            let e = &mut entries[i * n + s - 1];
            *e = e.clone() + w.clone();
        }
    }
    validate(Matrix::new(n, n, entries)?, &Tolerances::default())
}
