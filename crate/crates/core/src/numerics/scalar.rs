use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linalg;
use super::{LeastSquares, Matrix, Tolerances};

/// Arbitrary-precision rational number, the exact-mode scalar.
pub type Rational = BigRational;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A real number in one of the two arithmetic modes.
///
/// The two implementations are [`Rational`] (exact, zero tolerances) and `f64`
/// (binary64, thresholds from [`Tolerances`]). Every generic routine in the crate
/// is instantiated with exactly one of them, so modes can never mix inside one
/// computation; mixing is only possible at the input boundary, where it is
/// rejected (see [`crate::io`]).
///
/// Besides field arithmetic the trait carries the mode-specific kernels (rank,
/// least squares, left null space) so the generic front ends in
/// [`crate::numerics`] can dispatch on the scalar type.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Sum
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    fn from_int(v: i64) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn from_rational(r: &Rational) -> Self;

    /// Float input, rounded onto a fine dyadic grid (2^-32) in exact mode.
    fn from_f64_approx(x: f64) -> Self;

    fn as_f64(&self) -> f64;

    /// The exact value, available in exact mode only.
    fn as_rational(&self) -> Option<Rational>;

    fn magnitude(&self) -> Self;

    /// Exact mode: `self == 0`. Float mode: `|self| <= tol`.
    fn is_zero_within(&self, tol: f64) -> bool;

    /// Exact mode: `self < 0`. Float mode: `self < -tol`.
    fn is_negative_beyond(&self, tol: f64) -> bool;

    /// `e^self`, or `None` when the result is not representable in this mode.
    fn try_exp(&self) -> Option<Self>;

    /// `self^p` for `self >= 0`, or `None` when not representable in this mode.
    fn try_pow(&self, p: &Rational) -> Option<Self>;

    /// A strictly positive random weight (normalized later by the caller).
    fn draw_weight<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// A random point of the closed box `[lo, hi]`.
    fn draw_between<R: Rng + ?Sized>(lo: &Rational, hi: &Rational, rng: &mut R) -> Self;

    #[doc(hidden)]
    fn rank_kernel(m: &Matrix<Self>, tol: &Tolerances) -> usize;

    #[doc(hidden)]
    fn least_squares_kernel(m: &Matrix<Self>, v: &[Self], tol: &Tolerances) -> LeastSquares<Self>;

    #[doc(hidden)]
    fn left_null_kernel(m: &Matrix<Self>, tol: &Tolerances) -> Vec<Vec<Self>>;

    /// Span-membership acceptance for a squared residual against the squared
    /// norm of the target vector.
    fn residual_accepted(residual_sq: &Self, target_norm_sq: &Self, tol: &Tolerances) -> bool;
}

const DYADIC_BITS: u32 = 32;
const SAMPLE_GRID: u64 = 1 << 20;

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64_approx(x: f64) -> Self {
        let scale = (1u64 << DYADIC_BITS) as f64;
        let numer = BigInt::from_f64((x * scale).round()).unwrap_or_default();
        Rational::new(numer, BigInt::from(1u64 << DYADIC_BITS))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }

    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn is_negative_beyond(&self, _tol: f64) -> bool {
        self.is_negative()
    }

    fn try_exp(&self) -> Option<Self> {
        if self.is_zero() {
            Some(Rational::one())
        } else {
            None
        }
    }

    fn try_pow(&self, p: &Rational) -> Option<Self> {
        if !p.is_integer() {
            return None;
        }
        let e = p.to_integer().to_i32()?;
        Some(num_traits::Pow::pow(self, e))
    }

    fn draw_weight<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_int(rng.gen_range(1..=100))
    }

    fn draw_between<R: Rng + ?Sized>(lo: &Rational, hi: &Rational, rng: &mut R) -> Self {
        let k = rng.gen_range(0..=SAMPLE_GRID);
        let frac = Rational::new(BigInt::from(k), BigInt::from(SAMPLE_GRID));
        lo + (hi - lo) * frac
    }

    fn rank_kernel(m: &Matrix<Self>, _tol: &Tolerances) -> usize {
        linalg::exact::rank(m)
    }

    fn least_squares_kernel(m: &Matrix<Self>, v: &[Self], _tol: &Tolerances) -> LeastSquares<Self> {
        linalg::exact::least_squares(m, v)
    }

    fn left_null_kernel(m: &Matrix<Self>, _tol: &Tolerances) -> Vec<Vec<Self>> {
        linalg::exact::left_null_space(m)
    }

    fn residual_accepted(residual_sq: &Self, _target_norm_sq: &Self, _tol: &Tolerances) -> bool {
        residual_sq.is_zero()
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64_approx(x: f64) -> Self {
        x
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn as_rational(&self) -> Option<Rational> {
        None
    }

    fn magnitude(&self) -> Self {
        f64::abs(*self)
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn is_negative_beyond(&self, tol: f64) -> bool {
        *self < -tol
    }

    fn try_exp(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn try_pow(&self, p: &Rational) -> Option<Self> {
        if p.is_integer() {
            if let Some(e) = p.to_integer().to_i32() {
                return Some(self.powi(e));
            }
        }
        Some(self.powf(<f64 as Scalar>::from_rational(p)))
    }

    fn draw_weight<R: Rng + ?Sized>(rng: &mut R) -> Self {
        // (0, 1]
        1.0 - rng.gen::<f64>()
    }

    fn draw_between<R: Rng + ?Sized>(lo: &Rational, hi: &Rational, rng: &mut R) -> Self {
        let lo = <f64 as Scalar>::from_rational(lo);
        let hi = <f64 as Scalar>::from_rational(hi);
        (lo + (hi - lo) * rng.gen::<f64>()).clamp(lo, hi)
    }

    fn rank_kernel(m: &Matrix<Self>, tol: &Tolerances) -> usize {
        linalg::float::rank(m, tol.rank_tol)
    }

    fn least_squares_kernel(m: &Matrix<Self>, v: &[Self], tol: &Tolerances) -> LeastSquares<Self> {
        linalg::float::least_squares(m, v, tol.rank_tol)
    }

    fn left_null_kernel(m: &Matrix<Self>, tol: &Tolerances) -> Vec<Vec<Self>> {
        linalg::float::left_null_space(m, tol.rank_tol)
    }

    fn residual_accepted(residual_sq: &Self, target_norm_sq: &Self, tol: &Tolerances) -> bool {
        residual_sq.sqrt() <= tol.residual_tol * (1.0 + target_norm_sq.sqrt())
    }
}

/// Formats a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_kept_in_lowest_terms() {
        let r = Rational::ratio(6, -8);
        assert_eq!(*r.numer(), BigInt::from(-3));
        assert_eq!(*r.denom(), BigInt::from(4));
        assert_eq!(format_rational(&r), "-3/4");
        assert_eq!(format_rational(&Rational::from_int(5)), "5");
    }

    #[test]
    fn rational_pow_requires_integer_exponent() {
        let x = Rational::ratio(3, 2);
        assert_eq!(x.try_pow(&Rational::from_int(2)), Some(Rational::ratio(9, 4)));
        assert_eq!(x.try_pow(&Rational::ratio(1, 2)), None);
        assert_eq!(Rational::zero().try_exp(), Some(Rational::one()));
        assert_eq!(Rational::one().try_exp(), None);
    }

    #[test]
    fn dyadic_rounding() {
        let r = Rational::from_f64_approx(0.75);
        assert_eq!(r, Rational::ratio(3, 4));
        let r = Rational::from_f64_approx(0.1);
        assert!((Scalar::as_f64(&r) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn tolerant_sign_tests() {
        assert!(1e-13f64.is_zero_within(1e-12));
        assert!(!(-1e-13f64).is_negative_beyond(1e-12));
        assert!((-1e-11f64).is_negative_beyond(1e-12));
        assert!(!Rational::ratio(1, 1_000_000_000).is_zero_within(1.0));
    }
}
