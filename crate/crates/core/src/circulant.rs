//! Left-circulant doubly stochastic matrices generated by a probability vector.
//!
//! Row `i` of the matrix is `(λ_{i⊕0}, …, λ_{i⊕(n−1)})`, where `⊕` is cyclic
//! addition on `{1..n}`. The matrix is invertible iff the discrete Fourier
//! values `Σ_j λ_j ω_n^{k(j−1)}` are nonzero for `k = 1..n−1`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::hypothesis::SubsetPair;
use crate::numerics::{self, format_rational, Matrix, Mode, NumericsError, Rational, Scalar, Tolerances};
use crate::stochastic::{self, DoublyStochastic, StochasticError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CirculantError {
    #[error("weight vector is empty")]
    EmptyWeights,
    #[error("weight {index} is outside [0, 1]")]
    WeightOutOfRange { index: usize },
    #[error("weights do not sum to 1")]
    WeightsDoNotSumToOne,
    #[error("truncated sum needs i in 1..={n} and j in 0..{n}, got i={i}, j={j}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("closed-form criteria exist for n in {{2, 3, 4}} only, got {n}")]
    UnsupportedOrder { n: usize },
    #[error("order {n} is odd")]
    OddOrder { n: usize },
    #[error("all weights equal 1/4")]
    AllEqualWeights,
    #[error("weights satisfy the invertibility criterion; no degenerate case applies")]
    NotDegenerate,
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `i ⊕ j`: `i + j` if that is at most `n`, else `i + j − n`.
pub fn truncated_sum(i: usize, j: usize, n: usize) -> Result<usize, CirculantError> {
    if i == 0 || i > n || j >= n {
        return Err(CirculantError::IndexOutOfRange { i, j, n });
    }
    Ok(if i + j <= n { i + j } else { i + j - n })
}

/// A probability vector `λ_1..λ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantWeights<S> {
    lambda: Vec<S>,
}

impl<S: Scalar> CirculantWeights<S> {
    pub fn new(lambda: Vec<S>, tol: &Tolerances) -> Result<Self, CirculantError> {
        if lambda.is_empty() {
            return Err(CirculantError::EmptyWeights);
        }
        let slack = tol.stochastic_tol;
        if let Some(i) = lambda.iter().position(|x| {
            x.is_negative_beyond(slack) || (S::one() - x.clone()).is_negative_beyond(slack)
        }) {
            return Err(CirculantError::WeightOutOfRange { index: i + 1 });
        }
        let total: S = lambda.iter().cloned().sum();
        if !(total - S::one()).is_zero_within(slack) {
            return Err(CirculantError::WeightsDoNotSumToOne);
        }
        Ok(CirculantWeights { lambda })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[S] {
        &self.lambda
    }

    /// One-based `λ_j`.
    fn at(&self, j: usize) -> &S {
        &self.lambda[j - 1]
    }

    /// The left-circulant matrix; entry `(i, j)` is `λ_{i⊕j}` for `j = 0..n−1`.
    pub fn build_matrix(&self, tol: &Tolerances) -> Result<DoublyStochastic<S>, CirculantError> {
        let n = self.n();
        let mut rows = Vec::with_capacity(n);
        for i in 1..=n {
            let row = (0..n)
                .map(|j| truncated_sum(i, j, n).map(|k| self.at(k).clone()))
                .collect::<Result<Vec<S>, _>>()?;
            rows.push(row);
        }
        Ok(stochastic::validate(Matrix::from_rows(rows)?, tol)?)
    }
}

/// Which irrational factor multiplies the imaginary part of an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Radical {
    One,
    Sqrt3,
}

impl Radical {
    fn value(self) -> f64 {
        match self {
            Radical::One => 1.0,
            Radical::Sqrt3 => 3f64.sqrt(),
        }
    }
}

/// `re + im·√r·i` with rational `re`, `im`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactComplex {
    pub re: Rational,
    pub im: Rational,
    pub radical: Radical,
}

impl ExactComplex {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.as_f64(), self.im.as_f64() * self.radical.value())
    }

    pub fn conj(&self) -> ExactComplex {
        ExactComplex {
            im: -self.im.clone(),
            ..self.clone()
        }
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = format_rational(&self.re);
        if self.im.is_zero() {
            return f.write_str(&re);
        }
        let im = format_rational(&self.im);
        match self.radical {
            Radical::One => write!(f, "{re} + ({im})i"),
            Radical::Sqrt3 => write!(f, "{re} + ({im})*sqrt(3)i"),
        }
    }
}

/// One Fourier value of the weight vector.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralValue {
    Exact(ExactComplex),
    Float(Complex64),
}

impl SpectralValue {
    pub fn to_complex64(&self) -> Complex64 {
        match self {
            SpectralValue::Exact(z) => z.to_complex64(),
            SpectralValue::Float(z) => *z,
        }
    }

    /// Exact zero test, or modulus at most `tol` for float values.
    pub fn is_zero(&self, tol: f64) -> bool {
        match self {
            SpectralValue::Exact(z) => z.is_zero(),
            SpectralValue::Float(z) => z.norm() <= tol,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            SpectralValue::Exact(_) => Mode::Exact,
            SpectralValue::Float(_) => Mode::Float,
        }
    }
}

/// `values[k] = Σ_j λ_j ω_n^{k(j−1)}` for `k = 0..n−1`, `ω_n = e^{2πi/n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DftSpectrum {
    pub n: usize,
    pub values: Vec<SpectralValue>,
}

impl DftSpectrum {
    pub fn is_exact(&self) -> bool {
        self.values.iter().all(|v| v.mode() == Mode::Exact)
    }
}

/// Orders whose roots of unity have coordinates in `ℚ` or `ℚ(√3)`.
pub const EXACT_SPECTRUM_ORDERS: [usize; 5] = [1, 2, 3, 4, 6];

/// `ω_n^m` as `(cos, sin/√r)` for the orders in [`EXACT_SPECTRUM_ORDERS`].
fn exact_root_power(n: usize, m: usize) -> (Rational, Rational) {
    let half = Rational::ratio(1, 2);
    let degrees = 360 * (m % n) / n;
    let (c, s) = match degrees {
        0 => (Rational::one(), Rational::zero()),
        60 => (half.clone(), half),
        90 => (Rational::zero(), Rational::one()),
        120 => (-half.clone(), half),
        180 => (-Rational::one(), Rational::zero()),
        240 => (-half.clone(), -half),
        270 => (Rational::zero(), -Rational::one()),
        300 => (half.clone(), -half),
        _ => unreachable!("angle {degrees} for n = {n}"),
    };
    (c, s)
}

/// Fourier values of the weights. Exact weights with `n ∈ {1,2,3,4,6}` take
/// the symbolic path; everything else is evaluated in binary64.
pub fn dft_spectrum<S: Scalar>(w: &CirculantWeights<S>) -> DftSpectrum {
    let n = w.n();
    let exact: Option<Vec<Rational>> = if EXACT_SPECTRUM_ORDERS.contains(&n) {
        w.lambda().iter().map(Scalar::as_rational).collect()
    } else {
        None
    };
    let values = match exact {
        Some(lambda) => {
            let radical = if n == 3 || n == 6 {
                Radical::Sqrt3
            } else {
                Radical::One
            };
            (0..n)
                .map(|k| {
                    let mut re = Rational::zero();
                    let mut im = Rational::zero();
                    for (j, l) in lambda.iter().enumerate() {
                        let (c, s) = exact_root_power(n, k * j);
                        re += l * c;
                        im += l * s;
                    }
                    SpectralValue::Exact(ExactComplex { re, im, radical })
                })
                .collect()
        }
        None => {
            let lambda: Vec<f64> = w.lambda().iter().map(Scalar::as_f64).collect();
            (0..n)
                .map(|k| {
                    let z = lambda
                        .iter()
                        .enumerate()
                        .map(|(j, &l)| {
                            let m = (k * j) % n;
                            Complex64::from_polar(l, 2.0 * PI * m as f64 / n as f64)
                        })
                        .sum();
                    SpectralValue::Float(z)
                })
                .collect()
        }
    };
    DftSpectrum { n, values }
}

/// `true` iff every Fourier value for `k = 1..n−1` is nonzero (float values:
/// modulus above `residual_tol`).
pub fn is_invertible<S: Scalar>(w: &CirculantWeights<S>, tol: &Tolerances) -> bool {
    dft_spectrum(w)
        .values
        .iter()
        .skip(1)
        .all(|v| !v.is_zero(tol.residual_tol))
}

pub const CLAUSE_N2: &str = "lambda1 == lambda2";
pub const CLAUSE_N3: &str = "lambda1 == lambda2 == lambda3";
pub const CLAUSE_N4_SQUARES: &str = "(lambda1-lambda3)^2+(lambda2-lambda4)^2 == 0";
pub const CLAUSE_N4_SUMS: &str = "lambda1+lambda3 == lambda2+lambda4";

/// Verdict of the closed-form invertibility test for `n ∈ {2, 3, 4}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormVerdict {
    pub holds: bool,
    /// The degenerate equalities that occurred, e.g. [`CLAUSE_N4_SUMS`].
    pub failing_clauses: Vec<&'static str>,
}

/// Closed-form criteria: `n = 2`: `λ₁ ≠ λ₂`; `n = 3`: not all equal;
/// `n = 4`: `(λ₁−λ₃)²+(λ₂−λ₄)² > 0` and `λ₁+λ₃ ≠ λ₂+λ₄`.
pub fn closed_form_check<S: Scalar>(
    w: &CirculantWeights<S>,
    tol: &Tolerances,
) -> Result<ClosedFormVerdict, CirculantError> {
    let eq = |a: S, b: S| (a - b).is_zero_within(tol.residual_tol);
    let l = |j: usize| w.at(j).clone();
    let failing = match w.n() {
        2 => vec![CLAUSE_N2].into_iter().filter(|_| eq(l(1), l(2))).collect(),
        3 => vec![CLAUSE_N3]
            .into_iter()
            .filter(|_| eq(l(1), l(2)) && eq(l(2), l(3)))
            .collect(),
        4 => {
            let d13 = l(1) - l(3);
            let d24 = l(2) - l(4);
            let squares = d13.clone() * d13 + d24.clone() * d24;
            let mut failing = Vec::new();
            if squares.is_zero_within(tol.residual_tol) {
                failing.push(CLAUSE_N4_SQUARES);
            }
            if eq(l(1) + l(3), l(2) + l(4)) {
                failing.push(CLAUSE_N4_SUMS);
            }
            failing
        }
        n => return Err(CirculantError::UnsupportedOrder { n }),
    };
    Ok(ClosedFormVerdict {
        holds: failing.is_empty(),
        failing_clauses: failing,
    })
}

/// For even `n`: when the Fourier value at `k = n/2` vanishes, the odd- and
/// even-indexed weight sums (both necessarily 1/2); otherwise `None`.
pub fn even_n_degeneracy<S: Scalar>(
    w: &CirculantWeights<S>,
    tol: &Tolerances,
) -> Result<Option<(S, S)>, CirculantError> {
    let n = w.n();
    if !n.is_multiple_of(2) {
        return Err(CirculantError::OddOrder { n });
    }
    let odd: S = w.lambda().iter().step_by(2).cloned().sum();
    let even: S = w.lambda().iter().skip(1).step_by(2).cloned().sum();
    // ω_n^{n/2} = −1, so the k = n/2 value is the alternating sum.
    if (odd.clone() - even.clone()).is_zero_within(tol.residual_tol) {
        Ok(Some((odd, even)))
    } else {
        Ok(None)
    }
}

/// Determinant of [`case2_system`] in closed form:
/// `−(λ₁+λ₃)·((λ₁−λ₂)² + (λ₂−λ₃)²)`.
pub fn det3_case2<S: Scalar>(l1: &S, l2: &S, l3: &S) -> S {
    let d12 = l1.clone() - l2.clone();
    let d23 = l2.clone() - l3.clone();
    -(l1.clone() + l3.clone()) * (d12.clone() * d12 + d23.clone() * d23)
}

/// The leading 3×3 block of the circulant matrix when `λ₄ = λ₁+λ₃−λ₂`.
pub fn case2_system<S: Scalar>(l1: &S, l2: &S, l3: &S) -> Matrix<S> {
    let l4 = l1.clone() + l3.clone() - l2.clone();
    Matrix::from_rows(vec![
        vec![l1.clone(), l2.clone(), l3.clone()],
        vec![l2.clone(), l3.clone(), l4.clone()],
        vec![l3.clone(), l4, l1.clone()],
    ])
    .expect("3x3 rows")
}

/// Witness pair for a singular `n = 4` circulant matrix.
///
/// `λ₁=λ₃, λ₂=λ₄` gives `({1,3}, {2,4})`; `λ₁+λ₃=λ₂+λ₄` gives `({1,2}, {3,4})`
/// once the 3×3 system with right-hand side `(1, 1, −1)` is confirmed solvable.
pub fn n4_degenerate_witness<S: Scalar>(
    w: &CirculantWeights<S>,
    tol: &Tolerances,
) -> Result<Option<SubsetPair>, CirculantError> {
    if w.n() != 4 {
        return Err(CirculantError::UnsupportedOrder { n: w.n() });
    }
    let eq = |a: &S, b: &S| (a.clone() - b.clone()).is_zero_within(tol.residual_tol);
    let l: Vec<S> = w.lambda().to_vec();
    if l.iter().all(|x| eq(x, &l[0])) {
        return Err(CirculantError::AllEqualWeights);
    }
    if closed_form_check(w, tol)?.holds {
        return Err(CirculantError::NotDegenerate);
    }
    let pair = |a: [usize; 2], b: [usize; 2]| {
        SubsetPair::new(4, a.to_vec(), b.to_vec()).expect("fixed disjoint pair")
    };
    if eq(&l[0], &l[2]) && eq(&l[1], &l[3]) {
        return Ok(Some(pair([1, 3], [2, 4])));
    }
    if eq(&(l[0].clone() + l[2].clone()), &(l[1].clone() + l[3].clone())) {
        if det3_case2(&l[0], &l[1], &l[2]).is_zero_within(tol.residual_tol) {
            return Ok(None);
        }
        let system = case2_system(&l[0], &l[1], &l[2]);
        let rhs = vec![S::one(), S::one(), -S::one()];
        if numerics::in_column_span(&system, &rhs, tol)? {
            return Ok(Some(pair([1, 2], [3, 4])));
        }
    }
    Ok(None)
}
