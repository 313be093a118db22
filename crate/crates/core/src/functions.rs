//! Finitely representable test functions on open intervals.
//!
//! Parameters are stored as exact rationals, so every function except `Exp`
//! and non-integer powers can be evaluated in exact mode.

use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{format_rational, Rational, Scalar};

pub const MAX_POLYNOMIAL_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionError {
    #[error("x = {x} is outside the interval {interval}")]
    OutOfDomain { x: f64, interval: String },
    #[error("{kind} cannot be evaluated exactly; use float mode")]
    NotRepresentable { kind: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("breakpoint {x} lies outside the interval {interval}")]
    BreakpointOutsideInterval { x: f64, interval: String },
    #[error("interval bounds must satisfy lo < hi")]
    DegenerateInterval,
}

/// Declared convexity label; read by test harnesses, never by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convexity {
    Convex,
    Concave,
    Neither,
    Unknown,
}

impl Convexity {
    fn negated(self) -> Convexity {
        match self {
            Convexity::Convex => Convexity::Concave,
            Convexity::Concave => Convexity::Convex,
            other => other,
        }
    }
}

/// Open interval `(lo, hi)`; `None` stands for an infinite end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Option<Rational>,
    hi: Option<Rational>,
}

impl Interval {
    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Result<Self, FunctionError> {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l >= h {
                return Err(FunctionError::DegenerateInterval);
            }
        }
        Ok(Interval { lo, hi })
    }

    pub fn finite(lo: i64, hi: i64) -> Result<Self, FunctionError> {
        Self::new(Some(Rational::from_int(lo)), Some(Rational::from_int(hi)))
    }

    pub fn real_line() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn lo(&self) -> Option<&Rational> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&Rational> {
        self.hi.as_ref()
    }

    pub fn contains<S: Scalar>(&self, x: &S) -> bool {
        let above = self.lo.as_ref().is_none_or(|l| *x > S::from_rational(l));
        let below = self.hi.as_ref().is_none_or(|h| *x < S::from_rational(h));
        above && below
    }

    /// Closed box used for random sampling: finite ends shrink inward by
    /// `1e-9·(hi − lo)`; infinite ends are replaced by a box of half-width
    /// `radius` (anchored at the finite end, or at 0 for the whole line).
    pub fn sampling_box(&self, radius: &Rational) -> (Rational, Rational) {
        let billion = Rational::from_int(1_000_000_000);
        let two_r = radius.clone() * Rational::from_int(2);
        let (lo, hi) = match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => (l.clone(), h.clone()),
            (Some(l), None) => (l.clone(), l.clone() + two_r),
            (None, Some(h)) => (h.clone() - two_r, h.clone()),
            (None, None) => return (-radius.clone(), radius.clone()),
        };
        let margin = (hi.clone() - lo.clone()) / billion;
        (lo + margin.clone(), hi - margin)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), format_rational);
        let hi = self.hi.as_ref().map_or("inf".to_string(), format_rational);
        write!(f, "({lo}, {hi})")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// `|x|^p`, `p >= 1`.
    Power { p: Rational },
    Exp,
    Abs,
    /// `−x²`
    NegSquare,
    /// `a·x + b`
    Affine { a: Rational, b: Rational },
    /// Linear interpolation through strictly increasing breakpoints, extended
    /// linearly beyond the outermost ones.
    PiecewiseLinear { points: Vec<(Rational, Rational)> },
    /// `Σ c_k x^k`, coefficients from the constant term up.
    Polynomial { coeffs: Vec<Rational> },
    Scaled { inner: Box<FunctionSpec>, c: Rational },
    Sum { terms: Vec<FunctionSpec> },
}

impl FunctionKind {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionKind::Power { .. } => "power",
            FunctionKind::Exp => "exp",
            FunctionKind::Abs => "abs",
            FunctionKind::NegSquare => "negsquare",
            FunctionKind::Affine { .. } => "affine",
            FunctionKind::PiecewiseLinear { .. } => "piecewise_linear",
            FunctionKind::Polynomial { .. } => "polynomial",
            FunctionKind::Scaled { .. } => "scaled",
            FunctionKind::Sum { .. } => "sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    pub convexity: Convexity,
}

impl FunctionSpec {
    pub fn power(p: Rational) -> Result<Self, FunctionError> {
        if p < Rational::one() {
            return Err(FunctionError::InvalidParameter(format!(
                "power exponent must be >= 1, got {}",
                format_rational(&p)
            )));
        }
        Ok(Self::labeled(FunctionKind::Power { p }, Convexity::Convex))
    }

    pub fn exp() -> Self {
        Self::labeled(FunctionKind::Exp, Convexity::Convex)
    }

    pub fn abs() -> Self {
        Self::labeled(FunctionKind::Abs, Convexity::Convex)
    }

    pub fn neg_square() -> Self {
        Self::labeled(FunctionKind::NegSquare, Convexity::Concave)
    }

    pub fn affine(a: Rational, b: Rational) -> Self {
        Self::labeled(FunctionKind::Affine { a, b }, Convexity::Convex)
    }

    pub fn piecewise_linear(points: Vec<(Rational, Rational)>) -> Result<Self, FunctionError> {
        if points.len() < 2 {
            return Err(FunctionError::InvalidParameter(
                "piecewise linear function needs at least two breakpoints".into(),
            ));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(FunctionError::InvalidParameter(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self::labeled(
            FunctionKind::PiecewiseLinear { points },
            Convexity::Unknown,
        ))
    }

    pub fn polynomial(coeffs: Vec<Rational>) -> Result<Self, FunctionError> {
        if coeffs.is_empty() || coeffs.len() > MAX_POLYNOMIAL_DEGREE + 1 {
            return Err(FunctionError::InvalidParameter(format!(
                "polynomial needs 1..={} coefficients, got {}",
                MAX_POLYNOMIAL_DEGREE + 1,
                coeffs.len()
            )));
        }
        Ok(Self::labeled(FunctionKind::Polynomial { coeffs }, Convexity::Unknown))
    }

    pub fn scaled(inner: FunctionSpec, c: Rational) -> Self {
        let convexity = if c.is_negative() {
            inner.convexity.negated()
        } else {
            inner.convexity
        };
        Self::labeled(
            FunctionKind::Scaled {
                inner: Box::new(inner),
                c,
            },
            convexity,
        )
    }

    pub fn sum(terms: Vec<FunctionSpec>) -> Result<Self, FunctionError> {
        if terms.is_empty() {
            return Err(FunctionError::InvalidParameter("sum needs at least one term".into()));
        }
        let first = terms[0].convexity;
        let convexity = if matches!(first, Convexity::Convex | Convexity::Concave)
            && terms.iter().all(|t| t.convexity == first)
        {
            first
        } else {
            Convexity::Unknown
        };
        Ok(Self::labeled(FunctionKind::Sum { terms }, convexity))
    }

    pub fn with_convexity(mut self, convexity: Convexity) -> Self {
        self.convexity = convexity;
        self
    }

    /// `false` when some term needs `exp` or a non-integer power.
    pub fn is_exact_evaluable(&self) -> bool {
        match &self.kind {
            FunctionKind::Exp => false,
            FunctionKind::Power { p } => p.is_integer(),
            FunctionKind::Scaled { inner, .. } => inner.is_exact_evaluable(),
            FunctionKind::Sum { terms } => terms.iter().all(FunctionSpec::is_exact_evaluable),
            _ => true,
        }
    }

    fn labeled(kind: FunctionKind, convexity: Convexity) -> Self {
        FunctionSpec { kind, convexity }
    }

    /// Checks that every breakpoint (recursively) lies inside `interval`.
    pub fn validate_on(&self, interval: &Interval) -> Result<(), FunctionError> {
        match &self.kind {
            FunctionKind::PiecewiseLinear { points } => {
                for (x, _) in points {
                    if !interval.contains(x) {
                        return Err(FunctionError::BreakpointOutsideInterval {
                            x: x.as_f64(),
                            interval: interval.to_string(),
                        });
                    }
                }
                Ok(())
            }
            FunctionKind::Scaled { inner, .. } => inner.validate_on(interval),
            FunctionKind::Sum { terms } => terms.iter().try_for_each(|t| t.validate_on(interval)),
            _ => Ok(()),
        }
    }

    fn eval<S: Scalar>(&self, x: &S) -> Result<S, FunctionError> {
        let q = |r: &Rational| S::from_rational(r);
        Ok(match &self.kind {
            FunctionKind::Power { p } => x
                .magnitude()
                .try_pow(p)
                .ok_or(FunctionError::NotRepresentable { kind: "power with non-integer exponent" })?,
            FunctionKind::Exp => x
                .try_exp()
                .ok_or(FunctionError::NotRepresentable { kind: "exp" })?,
            FunctionKind::Abs => x.magnitude(),
            FunctionKind::NegSquare => -(x.clone() * x.clone()),
            FunctionKind::Affine { a, b } => q(a) * x.clone() + q(b),
            FunctionKind::PiecewiseLinear { points } => {
                let last = points.len() - 2;
                let seg = (0..=last)
                    .find(|&k| *x <= q(&points[k + 1].0))
                    .unwrap_or(last);
                let (x0, y0) = (q(&points[seg].0), q(&points[seg].1));
                let (x1, y1) = (q(&points[seg + 1].0), q(&points[seg + 1].1));
                y0.clone() + (y1 - y0) * (x.clone() - x0.clone()) / (x1 - x0)
            }
            FunctionKind::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(S::zero(), |acc, c| acc * x.clone() + q(c)),
            FunctionKind::Scaled { inner, c } => q(c) * inner.eval(x)?,
            FunctionKind::Sum { terms } => {
                let mut acc = S::zero();
                for t in terms {
                    acc = acc + t.eval(x)?;
                }
                acc
            }
        })
    }
}

/// `f(x)` for `x` strictly inside `interval`.
pub fn evaluate<S: Scalar>(f: &FunctionSpec, x: &S, interval: &Interval) -> Result<S, FunctionError> {
    if !interval.contains(x) {
        return Err(FunctionError::OutOfDomain {
            x: x.as_f64(),
            interval: interval.to_string(),
        });
    }
    f.eval(x)
}

/// `t·f(u) + (1−t)·f(v) − f(t·u + (1−t)·v)`; nonnegative for convex `f`.
pub fn t_convexity_gap<S: Scalar>(
    f: &FunctionSpec,
    u: &S,
    v: &S,
    t: &S,
    interval: &Interval,
) -> Result<S, FunctionError> {
    if *t < S::zero() || *t > S::one() {
        return Err(FunctionError::InvalidParameter(format!("t = {t} is outside [0, 1]")));
    }
    let s = S::one() - t.clone();
    let fu = evaluate(f, u, interval)?;
    let fv = evaluate(f, v, interval)?;
    let mid = t.clone() * u.clone() + s.clone() * v.clone();
    let fm = evaluate(f, &mid, interval)?;
    let combo = if t.is_zero() {
        fv
    } else if s.is_zero() {
        fu
    } else {
        t.clone() * fu + s * fv
    };
    Ok(combo - fm)
}
