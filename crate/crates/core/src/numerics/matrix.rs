use std::fmt;

use super::{NumericsError, Scalar};

/// Dense row-major matrix. Entries share one mode by construction.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        list.finish()
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, NumericsError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(NumericsError::RaggedRows {
                    row: i + 1,
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[S]) -> Result<Vec<S>, NumericsError> {
        if x.len() != self.cols {
            return Err(NumericsError::DimensionMismatch {
                what: "matrix columns vs vector length",
                left: self.cols,
                right: x.len(),
            });
        }
        Ok(mat_vec(self, x))
    }

    pub fn mul(&self, other: &Matrix<S>) -> Result<Matrix<S>, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::DimensionMismatch {
                what: "left columns vs right rows",
                left: self.cols,
                right: other.rows,
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|k| self.get(i, k).clone() * other.get(k, j).clone())
                .sum()
        }))
    }

    /// `[self | v]`
    pub fn augment(&self, v: &[S]) -> Result<Matrix<S>, NumericsError> {
        if v.len() != self.rows {
            return Err(NumericsError::DimensionMismatch {
                what: "matrix rows vs appended column length",
                left: self.rows,
                right: v.len(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                v[i].clone()
            }
        }))
    }

    pub fn row_sums(&self) -> Vec<S> {
        (0..self.rows).map(|i| self.row(i).iter().cloned().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<S> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).clone()).sum())
            .collect()
    }
}

/// `M·x` without a dimension check.
pub fn mat_vec<S: Scalar>(m: &Matrix<S>, x: &[S]) -> Vec<S> {
    (0..m.rows()).map(|i| dot(m.row(i), x)).collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() * y.clone())
        .sum()
}

pub fn norm_sq<S: Scalar>(v: &[S]) -> S {
    dot(v, v)
}

pub fn norm_inf<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, x| {
        let a = x.magnitude();
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// The natural basis vector `e_i` of length `n`, with one-based `i`.
pub fn basis_vector<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    assert!((1..=n).contains(&i), "basis index {i} outside 1..={n}");
    (1..=n)
        .map(|k| if k == i { S::one() } else { S::zero() })
        .collect()
}
