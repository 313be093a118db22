//! The averaged inequality `f(mean x) <= (1/n) Σ f((P x)_i)`: pointwise
//! evaluation, seeded random verification and counterexample search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::functions::{evaluate, FunctionError, FunctionSpec, Interval};
use crate::numerics::{norm_inf, Matrix, NumericsError, Rational, Scalar, Tolerances};
use crate::stochastic::{self, DoublyStochastic, StochasticError};

/// Number of independent sample streams used by [`verify`].
pub const VERIFY_SHARDS: usize = 8;
/// Golden-section probes per coordinate line search.
pub const LINE_SEARCH_ITERS: usize = 32;
const MAX_SWEEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InequalityError {
    #[error("point has {got} coordinates but the matrix has order {expected}")]
    OrderMismatch { expected: usize, got: usize },
    #[error("leave-one-out needs at least 2 points, got {n}")]
    TooFewPoints { n: usize },
    #[error("number of samples must be at least 1")]
    ZeroSamples,
    #[error("search budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideEvaluation<S> {
    pub lhs: S,
    pub rhs: S,
    /// `rhs − lhs`; negative means the inequality fails at this point.
    pub gap: S,
    /// The averaged points at which the right side evaluates `f`.
    pub y: Vec<S>,
}

impl<S: Scalar> SideEvaluation<S> {
    /// Exact mode: `gap < 0`. Float mode: `gap < −gap_tol·(1 + |lhs| + |rhs|)`.
    pub fn is_violation(&self, tol: &Tolerances) -> bool {
        let scale = 1.0 + self.lhs.as_f64().abs() + self.rhs.as_f64().abs();
        self.gap.is_negative_beyond(tol.gap_tol * scale)
    }
}

fn check_point<S: Scalar>(x: &[S], n: usize, interval: &Interval) -> Result<(), InequalityError> {
    if x.len() != n {
        return Err(InequalityError::OrderMismatch { expected: n, got: x.len() });
    }
    for xi in x {
        if !interval.contains(xi) {
            return Err(FunctionError::OutOfDomain {
                x: xi.as_f64(),
                interval: interval.to_string(),
            }
            .into());
        }
    }
    Ok(())
}

fn mean<S: Scalar>(v: &[S]) -> S {
    v.iter().cloned().sum::<S>() / S::from_int(v.len() as i64)
}

fn sides_from_y<S: Scalar>(
    f: &FunctionSpec,
    interval: &Interval,
    x: &[S],
    y: Vec<S>,
) -> Result<SideEvaluation<S>, InequalityError> {
    let lhs = evaluate(f, &mean(x), interval)?;
    let mut total = S::zero();
    for yi in &y {
        total = total + evaluate(f, yi, interval)?;
    }
    let rhs = total / S::from_int(y.len() as i64);
    Ok(SideEvaluation {
        gap: rhs.clone() - lhs.clone(),
        lhs,
        rhs,
        y,
    })
}

pub fn evaluate_sides<S: Scalar>(
    p: &DoublyStochastic<S>,
    f: &FunctionSpec,
    interval: &Interval,
    x: &[S],
) -> Result<SideEvaluation<S>, InequalityError> {
    check_point(x, p.n(), interval)?;
    let y = p.apply(x)?;
    sides_from_y(f, interval, x, y)
}

/// Right side built from the leave-one-out means `(Σx − x_i)/(n − 1)`.
pub fn leave_one_out_sides<S: Scalar>(
    f: &FunctionSpec,
    interval: &Interval,
    x: &[S],
) -> Result<SideEvaluation<S>, InequalityError> {
    let n = x.len();
    if n < 2 {
        return Err(InequalityError::TooFewPoints { n });
    }
    check_point(x, n, interval)?;
    let total: S = x.iter().cloned().sum();
    let denom = S::from_int(n as i64 - 1);
    let y = x.iter().map(|xi| (total.clone() - xi.clone()) / denom.clone()).collect();
    sides_from_y(f, interval, x, y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurForms<S> {
    /// `F(Px) − F(S_n x)` with `F(v) = Σ f(v_i)`.
    pub form_i_gap: S,
    /// `F(Px) − F(S_n P x)`
    pub form_iii_gap_at_px: S,
    /// `‖S_n P x − S_n x‖∞`
    pub s_n_absorption_error: S,
}

pub fn schur_forms_check<S: Scalar>(
    p: &DoublyStochastic<S>,
    f: &FunctionSpec,
    interval: &Interval,
    x: &[S],
) -> Result<SchurForms<S>, InequalityError> {
    let n = p.n();
    check_point(x, n, interval)?;
    let big_f = |v: &[S]| -> Result<S, InequalityError> {
        let mut acc = S::zero();
        for vi in v {
            acc = acc + evaluate(f, vi, interval)?;
        }
        Ok(acc)
    };
    let s_n = stochastic::uniform::<S>(n)?;
    let px = p.apply(x)?;
    let s_n_x = s_n.apply(x)?;
    let s_n_px = s_n.apply(&px)?;
    let s_n_p_x = s_n.matrix().mul(p.matrix())?.mul_vec(x)?;
    let f_px = big_f(&px)?;
    let diff: Vec<S> = s_n_p_x
        .iter()
        .zip(&s_n_x)
        .map(|(a, b)| a.clone() - b.clone())
        .collect();
    Ok(SchurForms {
        form_i_gap: f_px.clone() - big_f(&s_n_x)?,
        form_iii_gap_at_px: f_px - big_f(&s_n_px)?,
        s_n_absorption_error: norm_inf(&diff),
    })
}

/// Sampling parameters shared by [`verify`] and [`search_violation`].
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Half-width of the sampling box on infinite interval ends.
    pub radius: Rational,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        SamplerConfig {
            seed,
            radius: Rational::from_int(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport<S> {
    pub min_gap: S,
    pub argmin_x: Vec<S>,
    pub num_violations: usize,
    pub num_samples: usize,
}

/// Lowest gap in a shard, the point attaining it, and the shard's violation count.
type ShardBest<S> = (S, Vec<S>, usize);

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

/// Evaluates the inequality at `num_samples` uniform points of the sampling
/// box. Samples are split into [`VERIFY_SHARDS`] contiguous blocks with one
/// random stream each, so the report does not depend on the thread count.
/// Ties for the minimum go to the earliest sample.
pub fn verify<S: Scalar>(
    p: &DoublyStochastic<S>,
    f: &FunctionSpec,
    interval: &Interval,
    config: &SamplerConfig,
    num_samples: usize,
    tol: &Tolerances,
) -> Result<VerifyReport<S>, InequalityError> {
    if num_samples == 0 {
        return Err(InequalityError::ZeroSamples);
    }
    f.validate_on(interval)?;
    let n = p.n();
    let (lo, hi) = interval.sampling_box(&config.radius);
    let shard_results: Vec<Result<Option<ShardBest<S>>, InequalityError>> = (0..VERIFY_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let start = shard * num_samples / VERIFY_SHARDS;
            let end = (shard + 1) * num_samples / VERIFY_SHARDS;
            let mut rng = shard_rng(config.seed, shard);
            let mut best: Option<(S, Vec<S>)> = None;
            let mut violations = 0;
            for _ in start..end {
                let x: Vec<S> = (0..n).map(|_| S::draw_between(&lo, &hi, &mut rng)).collect();
                let ev = evaluate_sides(p, f, interval, &x)?;
                if ev.is_violation(tol) {
                    violations += 1;
                }
                if best.as_ref().is_none_or(|(g, _)| ev.gap < *g) {
                    best = Some((ev.gap, x));
                }
            }
            Ok(best.map(|(g, x)| (g, x, violations)))
        })
        .collect();

    let mut report: Option<VerifyReport<S>> = None;
    for res in shard_results {
        let Some((gap, x, violations)) = res? else {
            continue;
        };
        match report.as_mut() {
            None => {
                report = Some(VerifyReport {
                    min_gap: gap,
                    argmin_x: x,
                    num_violations: violations,
                    num_samples,
                })
            }
            Some(r) => {
                r.num_violations += violations;
                if gap < r.min_gap {
                    r.min_gap = gap;
                    r.argmin_x = x;
                }
            }
        }
    }
    Ok(report.expect("at least one shard holds a sample"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationWitness<S> {
    pub x: Vec<S>,
    pub evaluation: SideEvaluation<S>,
    pub matrix: Matrix<S>,
    pub function: FunctionSpec,
    pub interval: Interval,
}

impl<S: Scalar> ViolationWitness<S> {
    /// Re-evaluates the stored point and checks that it still violates.
    pub fn recheck(&self, tol: &Tolerances) -> bool {
        let Ok(p) = stochastic::validate(self.matrix.clone(), tol) else {
            return false;
        };
        match evaluate_sides(&p, &self.function, &self.interval, &self.x) {
            Ok(ev) => ev.is_violation(tol) && ev.gap == self.evaluation.gap,
            Err(_) => false,
        }
    }
}

struct Search<'a, S> {
    p: &'a DoublyStochastic<S>,
    f: &'a FunctionSpec,
    interval: &'a Interval,
    lo: f64,
    hi: f64,
    remaining: usize,
}

impl<'a, S: Scalar> Search<'a, S> {
    fn eval(&mut self, x: &[S]) -> Result<Option<SideEvaluation<S>>, InequalityError> {
        self.remaining -= 1;
        if !x.iter().all(|xi| self.interval.contains(xi)) {
            return Ok(None);
        }
        evaluate_sides(self.p, self.f, self.interval, x).map(Some)
    }

    /// Golden-section probes along coordinate `i`; updates `x`/`best` in place
    /// when a lower gap is found.
    fn line_search(
        &mut self,
        x: &mut Vec<S>,
        best: &mut SideEvaluation<S>,
        i: usize,
    ) -> Result<bool, InequalityError> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut improved = false;
        let mut probe = |s: &mut Self, t: f64, x: &mut Vec<S>, best: &mut SideEvaluation<S>| {
            let mut cand = x.clone();
            cand[i] = S::from_f64_approx(t);
            let ev = s.eval(&cand)?;
            let gap = ev.as_ref().map_or(f64::INFINITY, |e| e.gap.as_f64());
            if let Some(ev) = ev {
                if ev.gap < best.gap {
                    *best = ev;
                    *x = cand;
                    improved = true;
                }
            }
            Ok::<f64, InequalityError>(gap)
        };
        let (mut a, mut b) = (self.lo, self.hi);
        if self.remaining < 2 {
            return Ok(false);
        }
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = probe(self, c, x, best)?;
        let mut fd = probe(self, d, x, best)?;
        for _ in 2..LINE_SEARCH_ITERS {
            if self.remaining == 0 {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = probe(self, c, x, best)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = probe(self, d, x, best)?;
            }
        }
        Ok(improved)
    }
}

/// Random multistart with coordinate-wise golden-section refinement of the
/// gap. `budget` bounds the number of gap evaluations. Returns the first start
/// whose refined point violates the inequality, re-evaluated before return.
pub fn search_violation<S: Scalar>(
    p: &DoublyStochastic<S>,
    f: &FunctionSpec,
    interval: &Interval,
    config: &SamplerConfig,
    budget: usize,
    tol: &Tolerances,
) -> Result<Option<ViolationWitness<S>>, InequalityError> {
    if budget == 0 {
        return Err(InequalityError::ZeroBudget);
    }
    f.validate_on(interval)?;
    let n = p.n();
    let (lo, hi) = interval.sampling_box(&config.radius);
    let mut search = Search {
        p,
        f,
        interval,
        lo: S::from_rational(&lo).as_f64(),
        hi: S::from_rational(&hi).as_f64(),
        remaining: budget,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    while search.remaining > 0 {
        let mut x: Vec<S> = (0..n).map(|_| S::draw_between(&lo, &hi, &mut rng)).collect();
        let Some(mut best) = search.eval(&x)? else {
            continue;
        };
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for i in 0..n {
                improved |= search.line_search(&mut x, &mut best, i)?;
            }
            if !improved || search.remaining == 0 {
                break;
            }
        }
        if best.is_violation(tol) {
            let evaluation = evaluate_sides(p, f, interval, &x)?;
            if evaluation.is_violation(tol) {
                return Ok(Some(ViolationWitness {
                    x,
                    evaluation,
                    matrix: p.matrix().clone(),
                    function: f.clone(),
                    interval: interval.clone(),
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::CirculantWeights;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    fn square() -> FunctionSpec {
        FunctionSpec::power(q(2, 1)).unwrap()
    }

    #[test]
    fn evaluate_sides_examples() {
        let line = Interval::real_line();
        let ev = evaluate_sides(&stochastic::uniform(3).unwrap(), &square(), &line, &ints(&[1, 2, 3])).unwrap();
        assert_eq!(ev.y, ints(&[2, 2, 2]));
        assert_eq!((ev.lhs, ev.rhs, ev.gap), (q(4, 1), q(4, 1), q(0, 1)));

        let id = stochastic::identity::<Rational>(2).unwrap();
        let ev = evaluate_sides(&id, &square(), &line, &ints(&[0, 2])).unwrap();
        assert_eq!((ev.lhs, ev.rhs, ev.gap), (q(1, 1), q(2, 1), q(1, 1)));
        let ev = evaluate_sides(&id, &FunctionSpec::neg_square(), &line, &ints(&[0, 2])).unwrap();
        assert_eq!((ev.lhs.clone(), ev.rhs.clone(), ev.gap.clone()), (q(-1, 1), q(-2, 1), q(-1, 1)));
        assert!(ev.is_violation(&Tolerances::default()));
    }

    #[test]
    fn evaluate_sides_checks_inputs() {
        let id = stochastic::identity::<f64>(2).unwrap();
        let i = Interval::finite(-1, 1).unwrap();
        assert!(matches!(
            evaluate_sides(&id, &square(), &i, &[0.0]),
            Err(InequalityError::OrderMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            evaluate_sides(&id, &square(), &i, &[0.0, 1.0]),
            Err(InequalityError::Function(FunctionError::OutOfDomain { .. }))
        ));
    }

    #[test]
    fn order_one_has_zero_gap() {
        let p = stochastic::identity::<Rational>(1).unwrap();
        let ev = evaluate_sides(&p, &FunctionSpec::neg_square(), &Interval::real_line(), &ints(&[7])).unwrap();
        assert_eq!(ev.gap, q(0, 1));
    }

    #[test]
    fn leave_one_out_examples() {
        let line = Interval::real_line();
        let ev = leave_one_out_sides(&square(), &line, &ints(&[1, 2, 3])).unwrap();
        assert_eq!(ev.y, vec![q(5, 2), q(2, 1), q(3, 2)]);
        assert_eq!((ev.lhs, ev.rhs, ev.gap), (q(4, 1), q(25, 6), q(1, 6)));
        let ev = leave_one_out_sides(&FunctionSpec::neg_square(), &line, &ints(&[3, 3, 3, 3])).unwrap();
        assert_eq!(ev.gap, q(0, 1));
        assert!(matches!(
            leave_one_out_sides(&square(), &line, &ints(&[1])),
            Err(InequalityError::TooFewPoints { n: 1 })
        ));
    }

    #[test]
    fn leave_one_out_matches_circulant() {
        let tol = Tolerances::default();
        let line = Interval::real_line();
        let x = ints(&[4, -1, 9, 2]);
        let w = CirculantWeights::new(vec![q(1, 3), q(1, 3), q(1, 3), q(0, 1)], &tol).unwrap();
        let p = w.build_matrix(&tol).unwrap();
        let a = leave_one_out_sides(&square(), &line, &x).unwrap();
        let b = evaluate_sides(&p, &square(), &line, &x).unwrap();
        assert_eq!((a.lhs, a.rhs), (b.lhs, b.rhs));
    }

    #[test]
    fn schur_forms_example() {
        let id = stochastic::identity::<Rational>(2).unwrap();
        let forms = schur_forms_check(&id, &square(), &Interval::real_line(), &ints(&[0, 2])).unwrap();
        assert_eq!(forms.form_i_gap, q(2, 1));
        assert_eq!(forms.form_iii_gap_at_px, q(2, 1));
        assert_eq!(forms.s_n_absorption_error, q(0, 1));
    }

    #[test]
    fn verify_examples() {
        let tol = Tolerances::default();
        let i = Interval::finite(-1, 1).unwrap();
        let id = stochastic::identity::<f64>(2).unwrap();
        let cfg = SamplerConfig::new(3);
        let r = verify(&id, &FunctionSpec::neg_square(), &i, &cfg, 100, &tol).unwrap();
        assert!(r.num_violations > 0);
        assert_eq!(r.num_samples, 100);

        let p = stochastic::sample_birkhoff::<f64>(4, 3, 11).unwrap();
        let r = verify(&p, &FunctionSpec::exp(), &i, &cfg, 200, &tol).unwrap();
        assert_eq!(r.num_violations, 0);
        let aff = FunctionSpec::affine(q(3, 1), q(-1, 1));
        let r = verify(&p, &aff, &i, &cfg, 200, &tol).unwrap();
        assert!(r.min_gap.abs() <= 1e-12);
        assert!(verify(&p, &aff, &i, &cfg, 0, &tol).is_err());
    }

    #[test]
    fn verify_is_deterministic_and_handles_few_samples() {
        let tol = Tolerances::default();
        let p = stochastic::sample_birkhoff::<Rational>(3, 2, 5).unwrap();
        let cfg = SamplerConfig::new(9);
        let a = verify(&p, &square(), &Interval::real_line(), &cfg, 3, &tol).unwrap();
        let b = verify(&p, &square(), &Interval::real_line(), &cfg, 3, &tol).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_violations, 0);
    }

    #[test]
    fn search_examples() {
        let tol = Tolerances::default();
        let i = Interval::finite(-10, 10).unwrap();
        let cfg = SamplerConfig::new(1);
        let id = stochastic::identity::<f64>(2).unwrap();
        let w = search_violation(&id, &FunctionSpec::neg_square(), &i, &cfg, 1000, &tol)
            .unwrap()
            .expect("witness");
        assert!(w.evaluation.gap <= -0.9);
        assert!(w.recheck(&tol));
        assert!(search_violation(&id, &square(), &i, &cfg, 1000, &tol).unwrap().is_none());
        let u = stochastic::uniform::<f64>(2).unwrap();
        assert!(search_violation(&u, &FunctionSpec::neg_square(), &i, &cfg, 1000, &tol)
            .unwrap()
            .is_none());
        assert!(matches!(
            search_violation(&id, &square(), &i, &cfg, 0, &tol),
            Err(InequalityError::ZeroBudget)
        ));
    }

    #[test]
    fn exact_search_finds_witness() {
        let tol = Tolerances::default();
        let i = Interval::finite(-10, 10).unwrap();
        let id = stochastic::identity::<Rational>(2).unwrap();
        let w = search_violation(&id, &FunctionSpec::neg_square(), &i, &SamplerConfig::new(4), 500, &tol)
            .unwrap()
            .expect("witness");
        assert!(w.evaluation.gap < q(0, 1));
        assert!(w.recheck(&tol));
    }
}
