//! Mode-specific elimination kernels behind [`super::rank`],
//! [`super::min_residual_solve`] and [`super::left_null_space`].

pub(super) mod exact {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Zero};

    use crate::numerics::{mat_vec, norm_sq, LeastSquares, Matrix, Rational};

    /// Scales each row by the lcm of its denominators so it becomes integral.
    fn integer_rows(m: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
        (0..m.rows())
            .map(|i| {
                let row = m.row(i);
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect()
    }

    /// Rank by Bareiss fraction-free elimination with column skipping.
    pub fn rank(m: &Matrix<Rational>) -> usize {
        let mut a = integer_rows(m);
        let (rows, cols) = (m.rows(), m.cols());
        let mut r = 0;
        let mut prev = BigInt::one();
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            for row in rest.iter_mut() {
                for j in c + 1..cols {
                    let num = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                    debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                    row[j] = num / &prev;
                }
                row[c] = BigInt::zero();
            }
            prev = pivot_row[c].clone();
            r += 1;
        }
        r
    }

    /// Reduced row echelon form in place; returns the pivot column of each
    /// nonzero row.
    pub fn rref(a: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
        let rows = a.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = Rational::one() / &a[r][c];
            for x in a[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..rows {
                if i == r || a[i][c].is_zero() {
                    continue;
                }
                let factor = a[i][c].clone();
                for j in c..a[i].len() {
                    let delta = &factor * &a[r][j];
                    a[i][j] = &a[i][j] - delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn least_squares(m: &Matrix<Rational>, v: &[Rational]) -> LeastSquares<Rational> {
        let k = m.cols();
        let mt = m.transpose();
        // [MᵀM | Mᵀv]
        let mut aug: Vec<Vec<Rational>> = (0..k)
            .map(|i| {
                let mut row: Vec<Rational> = (0..k)
                    .map(|j| crate::numerics::dot(mt.row(i), mt.row(j)))
                    .collect();
                row.push(crate::numerics::dot(mt.row(i), v));
                row
            })
            .collect();
        let pivots = rref(&mut aug, k);
        let mut coeffs = vec![Rational::zero(); k];
        for (row, &c) in pivots.iter().enumerate() {
            coeffs[c] = aug[row][k].clone();
        }
        let fitted = mat_vec(m, &coeffs);
        let residual: Vec<Rational> = v.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        LeastSquares {
            residual_sq: norm_sq(&residual),
            coeffs,
        }
    }

    /// Null space of `Mᵀ`, one basis vector per free column of its RREF.
    pub fn left_null_space(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
        let n = m.rows();
        let mut t = m.transpose().to_rows();
        let pivots = rref(&mut t, n);
        (0..n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut w = vec![Rational::zero(); n];
                w[free] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    w[pc] = -t[row][free].clone();
                }
                w
            })
            .collect()
    }
}

pub(super) mod float {
    use crate::numerics::{mat_vec, norm_sq, LeastSquares, Matrix};

    /// Partial-pivot elimination; counts pivots with magnitude above `tol`.
    pub fn rank(m: &Matrix<f64>, tol: f64) -> usize {
        let mut a = m.to_rows();
        let (rows, cols) = (m.rows(), m.cols());
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let (p, best) = (r..rows)
                .map(|i| (i, a[i][c].abs()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= tol {
                continue;
            }
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let pivot = &top[r];
            for row in rest.iter_mut() {
                let factor = row[c] / pivot[c];
                if factor == 0.0 {
                    continue;
                }
                for (x, pv) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= factor * pv;
                }
            }
            r += 1;
        }
        r
    }

    /// Householder QR with column pivoting, truncated at the numerical rank.
    struct PivotedQr {
        /// Column-major working copy holding R in its upper triangle.
        a: Vec<Vec<f64>>,
        /// Unit Householder vectors, reflector `s` acting on rows `s..m`.
        reflectors: Vec<Vec<f64>>,
        perm: Vec<usize>,
        rank: usize,
        rows: usize,
    }

    impl PivotedQr {
        fn new(m: &Matrix<f64>, tol: f64) -> Self {
            let (rows, cols) = (m.rows(), m.cols());
            let mut a: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
            let mut perm: Vec<usize> = (0..cols).collect();
            let mut reflectors = Vec::new();
            let mut rank = 0;
            for s in 0..rows.min(cols) {
                let tail_norm = |col: &Vec<f64>| col[s..].iter().map(|x| x * x).sum::<f64>();
                let (best, best_norm) = (s..cols)
                    .map(|j| (j, tail_norm(&a[j])))
                    .fold((s, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                if best_norm.sqrt() <= tol {
                    break;
                }
                a.swap(s, best);
                perm.swap(s, best);

                let x = &a[s][s..];
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let alpha = if x[0] >= 0.0 { -norm } else { norm };
                let mut v = x.to_vec();
                v[0] -= alpha;
                let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
                if vnorm > 0.0 {
                    v.iter_mut().for_each(|t| *t /= vnorm);
                    for col in a.iter_mut().skip(s) {
                        reflect(&v, &mut col[s..]);
                    }
                }
                reflectors.push(v);
                rank += 1;
            }
            PivotedQr {
                a,
                reflectors,
                perm,
                rank,
                rows,
            }
        }

        /// `Qᵀ·v`
        fn apply_qt(&self, v: &[f64]) -> Vec<f64> {
            let mut out = v.to_vec();
            for (s, h) in self.reflectors.iter().enumerate() {
                reflect(h, &mut out[s..]);
            }
            out
        }

        /// `Q·v`
        fn apply_q(&self, v: &[f64]) -> Vec<f64> {
            let mut out = v.to_vec();
            for (s, h) in self.reflectors.iter().enumerate().rev() {
                reflect(h, &mut out[s..]);
            }
            out
        }
    }

    fn reflect(h: &[f64], x: &mut [f64]) {
        let d: f64 = h.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        if d != 0.0 {
            for (xi, hi) in x.iter_mut().zip(h) {
                *xi -= 2.0 * d * hi;
            }
        }
    }

    pub fn least_squares(m: &Matrix<f64>, v: &[f64], tol: f64) -> LeastSquares<f64> {
        let qr = PivotedQr::new(m, tol);
        let qtv = qr.apply_qt(v);
        let r = qr.rank;
        let mut z = vec![0.0; r];
        for i in (0..r).rev() {
            let mut acc = qtv[i];
            for (j, zj) in z.iter().enumerate().take(r).skip(i + 1) {
                acc -= qr.a[j][i] * zj;
            }
            z[i] = acc / qr.a[i][i];
        }
        let mut coeffs = vec![0.0; m.cols()];
        for (j, zj) in z.into_iter().enumerate() {
            coeffs[qr.perm[j]] = zj;
        }
        let fitted = mat_vec(m, &coeffs);
        let residual: Vec<f64> = v.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        LeastSquares {
            residual_sq: norm_sq(&residual),
            coeffs,
        }
    }

    /// Trailing columns of the full Q factor: an orthonormal basis of the
    /// complement of the column span.
    pub fn left_null_space(m: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
        let qr = PivotedQr::new(m, tol);
        (qr.rank..qr.rows)
            .map(|i| {
                let mut e = vec![0.0; qr.rows];
                e[i] = 1.0;
                qr.apply_q(&e)
            })
            .collect()
    }
}
