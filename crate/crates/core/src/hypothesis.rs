//! The span hypothesis: does some normalized indicator difference
//! `1/|A|·Σ_{α∈A} e_α − 1/|B|·Σ_{β∈B} e_β` lie in the column span of `P`?
//!
//! Pairs `(A, B)` are ordered, so both `(A, B)` and `(B, A)` are enumerated.
//! All indices are one-based.

use std::ops::ControlFlow;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::circulant::CirculantWeights;
use crate::numerics::{self, norm_sq, Matrix, NumericsError, Rational, Scalar, Tolerances};
use crate::stochastic::{self, DoublyStochastic, StochasticError};

/// Largest order for which [`find_witness`] enumerates all pairs.
pub const MAX_ENUMERATION_ORDER: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisError {
    #[error("subset {which} is empty")]
    EmptySubset { which: char },
    #[error("index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index {index} appears twice in subset {which}")]
    DuplicateIndex { index: usize, which: char },
    #[error("index {index} belongs to both subsets")]
    Overlap { index: usize },
    #[error("pair is for order {pair}, matrix has order {matrix}")]
    OrderMismatch { pair: usize, matrix: usize },
    #[error("order {n} needs {count} pair checks; enumeration is capped at n <= {MAX_ENUMERATION_ORDER}")]
    EnumerationTooLarge { n: usize, count: u128 },
    #[error("3^{n} - 2*2^{n} + 1 does not fit in 128 bits")]
    CountOverflow { n: usize },
    #[error("order must be at least {min}, got {n}")]
    OrderTooSmall { n: usize, min: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error(transparent)]
    Circulant(#[from] crate::circulant::CirculantError),
}

/// Disjoint nonempty index sets `A, B ⊆ {1..n}`, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetPair {
    n: usize,
    a: Vec<usize>,
    b: Vec<usize>,
}

impl SubsetPair {
    pub fn new(n: usize, mut a: Vec<usize>, mut b: Vec<usize>) -> Result<Self, HypothesisError> {
        for (set, which) in [(&mut a, 'A'), (&mut b, 'B')] {
            if set.is_empty() {
                return Err(HypothesisError::EmptySubset { which });
            }
            set.sort_unstable();
            if let Some(&index) = set.iter().find(|&&i| i == 0 || i > n) {
                return Err(HypothesisError::IndexOutOfRange { index, n });
            }
            if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypothesisError::DuplicateIndex { index: w[0], which });
            }
        }
        if let Some(&index) = a.iter().find(|i| b.binary_search(i).is_ok()) {
            return Err(HypothesisError::Overlap { index });
        }
        Ok(SubsetPair { n, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    /// `(|A|, |B|)`
    pub fn sizes(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    /// `1/|A|` on `A`, `−1/|B|` on `B`, zero elsewhere.
    pub fn indicator_vector<S: Scalar>(&self) -> Vec<S> {
        let pa = S::ratio(1, self.a.len() as i64);
        let nb = S::ratio(-1, self.b.len() as i64);
        let mut v = vec![S::zero(); self.n];
        for &i in &self.a {
            v[i - 1] = pa.clone();
        }
        for &i in &self.b {
            v[i - 1] = nb.clone();
        }
        v
    }

    /// The pair with `A` and `B` exchanged.
    pub fn swapped(&self) -> SubsetPair {
        SubsetPair {
            n: self.n,
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// Coefficients `x_{A,B}` with `P·x_{A,B}` equal to the indicator vector of
/// `pair` (exactly in exact mode, within the residual rule in float mode).
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate<S> {
    pub pair: SubsetPair,
    pub coeffs: Vec<S>,
    /// `‖P·coeffs − indicator‖²`
    pub residual_sq: S,
}

impl<S: Scalar> WitnessCertificate<S> {
    /// Re-checks the certificate by multiplying `P·coeffs` from scratch.
    pub fn recheck(&self, p: &DoublyStochastic<S>, tol: &Tolerances) -> bool {
        if p.n() != self.pair.n() || self.coeffs.len() != p.n() {
            return false;
        }
        let v = self.pair.indicator_vector::<S>();
        let Ok(pc) = p.apply(&self.coeffs) else {
            return false;
        };
        let diff: Vec<S> = pc.into_iter().zip(&v).map(|(x, y)| x - y.clone()).collect();
        S::residual_accepted(&norm_sq(&diff), &norm_sq(&v), tol)
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_sq.as_f64().max(0.0).sqrt()
    }
}

/// Certificate for `pair`, or `None` when its indicator vector is outside the
/// column span of `p`.
pub fn check_pair<S: Scalar>(
    p: &DoublyStochastic<S>,
    pair: &SubsetPair,
    tol: &Tolerances,
) -> Result<Option<WitnessCertificate<S>>, HypothesisError> {
    if pair.n() != p.n() {
        return Err(HypothesisError::OrderMismatch {
            pair: pair.n(),
            matrix: p.n(),
        });
    }
    let v = pair.indicator_vector::<S>();
    let ls = numerics::min_residual_solve(p.matrix(), &v, tol)?;
    if S::residual_accepted(&ls.residual_sq, &norm_sq(&v), tol) {
        Ok(Some(WitnessCertificate {
            pair: pair.clone(),
            coeffs: ls.coeffs,
            residual_sq: ls.residual_sq,
        }))
    } else {
        Ok(None)
    }
}

/// `3^n − 2·2^n + 1`, the number of ordered disjoint nonempty pairs.
pub fn candidate_count(n: usize) -> Result<u128, HypothesisError> {
    let overflow = || HypothesisError::CountOverflow { n };
    let e = u32::try_from(n).map_err(|_| overflow())?;
    let three = 3u128.checked_pow(e).ok_or_else(overflow)?;
    let two = 2u128.checked_pow(e).ok_or_else(overflow)?;
    Ok(three + 1 - 2 * two)
}

/// Visits every ordered disjoint nonempty pair in canonical order: increasing
/// `|A|+|B|`, then `A` lexicographically, then `B` lexicographically.
///
/// The callback receives the sorted one-based index lists of `A` and `B`.
pub fn for_each_candidate<F>(n: usize, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
{
    let mut a = Vec::with_capacity(n);
    for total in 2..=n {
        walk_a(n, total, 1, &mut a, &mut visit)?;
    }
    ControlFlow::Continue(())
}

/// Preorder walk over increasing sequences, which is lexicographic order.
fn walk_a<F>(
    n: usize,
    total: usize,
    start: usize,
    a: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
{
    for e in start..=n {
        a.push(e);
        let rest: Vec<usize> = (1..=n).filter(|i| !a.contains(i)).collect();
        let need = total - a.len();
        let mut b = Vec::with_capacity(need);
        walk_b(&rest, need, 0, a, &mut b, visit)?;
        if a.len() + 1 < total {
            walk_a(n, total, e + 1, a, visit)?;
        }
        a.pop();
    }
    ControlFlow::Continue(())
}

fn walk_b<F>(
    pool: &[usize],
    need: usize,
    start: usize,
    a: &[usize],
    b: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
{
    if b.len() == need {
        return visit(a, b);
    }
    let remaining = need - b.len();
    for k in start..pool.len() {
        if pool.len() - k < remaining {
            break;
        }
        b.push(pool[k]);
        walk_b(pool, need, k + 1, a, b, visit)?;
        b.pop();
    }
    ControlFlow::Continue(())
}

/// Outcome of [`find_witness`].
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSearch<S> {
    pub witness: Option<WitnessCertificate<S>>,
    pub rank: usize,
    /// Pairs examined; equals `candidate_count(n)` when no witness exists.
    pub pairs_visited: u64,
    /// `true` when the full-rank shortcut answered without enumeration.
    pub shortcut: bool,
}

/// First witness pair in canonical order, if any.
///
/// Full-rank matrices return `({1}, {2})` immediately. Otherwise every pair is
/// screened against a basis of the left null space of `P` (the indicator is in
/// the span iff it is orthogonal to that basis) and the first pair passing the
/// screen is certified with [`check_pair`].
pub fn find_witness<S: Scalar>(
    p: &DoublyStochastic<S>,
    tol: &Tolerances,
) -> Result<WitnessSearch<S>, HypothesisError> {
    let n = p.n();
    let rank = numerics::rank(p.matrix(), tol)?;
    if n < 2 {
        return Ok(WitnessSearch {
            witness: None,
            rank,
            pairs_visited: 0,
            shortcut: false,
        });
    }
    if rank == n {
        let pair = SubsetPair::new(n, vec![1], vec![2])?;
        if let Some(cert) = check_pair(p, &pair, tol)? {
            return Ok(WitnessSearch {
                witness: Some(cert),
                rank,
                pairs_visited: 0,
                shortcut: true,
            });
        }
    }
    if n > MAX_ENUMERATION_ORDER {
        return Err(HypothesisError::EnumerationTooLarge {
            n,
            count: candidate_count(n)?,
        });
    }

    let null = numerics::left_null_space(p.matrix(), tol);
    let sums = subset_sums(&null, n);
    let mut visited = 0u64;
    let mut found = None;
    let mut failure = None;
    let _ = for_each_candidate(n, |a, b| {
        visited += 1;
        let (ma, mb) = (mask_of(a), mask_of(b));
        let inv_a = S::ratio(1, a.len() as i64);
        let inv_b = S::ratio(1, b.len() as i64);
        let residual_sq: S = sums
            .iter()
            .map(|table| {
                let r = table[ma].clone() * inv_a.clone() - table[mb].clone() * inv_b.clone();
                r.clone() * r
            })
            .sum();
        if !S::residual_accepted(&residual_sq, &(inv_a + inv_b), tol) {
            return ControlFlow::Continue(());
        }
        let pair = SubsetPair {
            n,
            a: a.to_vec(),
            b: b.to_vec(),
        };
        match check_pair(p, &pair, tol) {
            Ok(Some(cert)) => {
                found = Some(cert);
                ControlFlow::Break(())
            }
            Ok(None) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(WitnessSearch {
        witness: found,
        rank,
        pairs_visited: visited,
        shortcut: false,
    })
}

fn mask_of(set: &[usize]) -> usize {
    set.iter().fold(0, |m, &i| m | 1 << (i - 1))
}

/// For each basis vector `w`, the table `mask ↦ Σ_{i ∈ mask} w_i`.
fn subset_sums<S: Scalar>(basis: &[Vec<S>], n: usize) -> Vec<Vec<S>> {
    basis
        .iter()
        .map(|w| {
            let mut table = vec![S::zero(); 1 << n];
            for mask in 1usize..1 << n {
                let low = mask.trailing_zeros() as usize;
                table[mask] = table[mask & (mask - 1)].clone() + w[low].clone();
            }
            table
        })
        .collect()
}

/// Keeps the matrices with rank at least 2 and no witness pair.
pub fn filter_open_candidates<S: Scalar>(
    matrices: Vec<DoublyStochastic<S>>,
    tol: &Tolerances,
) -> Result<Vec<DoublyStochastic<S>>, HypothesisError> {
    let verdicts: Vec<Result<bool, HypothesisError>> = matrices
        .par_iter()
        .map(|p| {
            let search = find_witness(p, tol)?;
            Ok(search.rank >= 2 && search.witness.is_none())
        })
        .collect();
    let mut kept = Vec::new();
    for (p, keep) in matrices.into_iter().zip(verdicts) {
        if keep? {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// Samples exact doubly stochastic matrices of order `n` and returns those
/// with rank at least 2 and no witness pair.
///
/// Samples cycle through four families: Birkhoff combinations, rank-two
/// perturbations `S_n + ε·u·vᵀ` with zero-sum `u, v`, left-circulant matrices
/// (with alternating sums forced to 1/2 when `n` is even), and Kronecker
/// products `S_m ⊗ Q` (or mixtures with `S_n` when `n` is prime). Sample `i`
/// uses its own RNG stream, so the output depends only on `(n, num_samples, seed)`.
pub fn explore_open_problem(
    n: usize,
    num_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<DoublyStochastic<Rational>>, HypothesisError> {
    if n < 2 {
        return Err(HypothesisError::OrderTooSmall { n, min: 2 });
    }
    let samples = (0..num_samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sample_family(n, i % 4, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    filter_open_candidates(samples, tol)
}

fn sample_family(
    n: usize,
    family: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DoublyStochastic<Rational>, HypothesisError> {
    let exact = Tolerances::default();
    match family {
        0 => {
            let k = rng.gen_range(1..=n);
            Ok(stochastic::sample_birkhoff_with(n, k, rng)?)
        }
        1 => rank_two_perturbation(n, rng),
        2 => {
            let mut lambda: Vec<Rational> =
                (0..n).map(|_| Rational::from_int(rng.gen_range(0..=12))).collect();
            if lambda.iter().all(Zero::is_zero) {
                lambda[0] = Rational::from_int(1);
            }
            let lambda = if n.is_multiple_of(2) {
                balance_alternating(lambda)
            } else {
                let total: Rational = lambda.iter().cloned().sum();
                lambda.into_iter().map(|x| x / total.clone()).collect()
            };
            let weights = CirculantWeights::new(lambda, &exact)?;
            Ok(weights.build_matrix(&exact)?)
        }
        _ => {
            let divisor = (2..n).find(|d| n.is_multiple_of(*d));
            match divisor {
                Some(m) => {
                    let d = n / m;
                    let k = rng.gen_range(1..=d);
                    let q: DoublyStochastic<Rational> = stochastic::sample_birkhoff_with(d, k, rng)?;
                    let inv_m = Rational::ratio(1, m as i64);
                    let kron = Matrix::from_fn(n, n, |i, j| {
                        q.matrix().get(i % d, j % d).clone() * inv_m.clone()
                    });
                    Ok(stochastic::validate(kron, &exact)?)
                }
                None => {
                    let t = Rational::ratio(rng.gen_range(1..=9), 10);
                    let q: DoublyStochastic<Rational> = stochastic::sample_birkhoff_with(n, 2, rng)?;
                    let s = Rational::ratio(1, n as i64);
                    let mix = Matrix::from_fn(n, n, |i, j| {
                        t.clone() * s.clone()
                            + (Rational::from_int(1) - t.clone()) * q.matrix().get(i, j).clone()
                    });
                    Ok(stochastic::validate(mix, &exact)?)
                }
            }
        }
    }
}

/// Rescales odd and even positions separately so each half sums to 1/2.
fn balance_alternating(mut lambda: Vec<Rational>) -> Vec<Rational> {
    for parity in 0..2 {
        let positions: Vec<usize> = (parity..lambda.len()).step_by(2).collect();
        let total: Rational = positions.iter().map(|&i| lambda[i].clone()).sum();
        if total.is_zero() {
            let share = Rational::ratio(1, 2 * positions.len() as i64);
            for &i in &positions {
                lambda[i] = share.clone();
            }
        } else {
            let scale = Rational::ratio(1, 2) / total;
            for &i in &positions {
                lambda[i] = lambda[i].clone() * scale.clone();
            }
        }
    }
    lambda
}

/// `S_n + ε·u·vᵀ` with integer zero-sum `u, v` and `ε` small enough to keep
/// every entry nonnegative.
fn rank_two_perturbation(
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DoublyStochastic<Rational>, HypothesisError> {
    let zero_sum = |rng: &mut ChaCha8Rng| -> Vec<i64> {
        loop {
            let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
            let s: i64 = v.iter().sum();
            v[n - 1] -= s;
            if v.iter().any(|&x| x != 0) {
                return v;
            }
        }
    };
    let u = zero_sum(rng);
    let v = zero_sum(rng);
    let peak = u.iter().map(|x| x.abs()).max().unwrap_or(1) * v.iter().map(|x| x.abs()).max().unwrap_or(1);
    let shrink = Rational::ratio(rng.gen_range(1..=4), 4);
    let eps = shrink * Rational::ratio(1, (n as i64) * peak.max(1));
    let base = Rational::ratio(1, n as i64);
    let m = Matrix::from_fn(n, n, |i, j| {
        base.clone() + eps.clone() * Rational::from_int(u[i] * v[j])
    });
    Ok(stochastic::validate(m, &Tolerances::default())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::CirculantWeights;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn pair(n: usize, a: &[usize], b: &[usize]) -> SubsetPair {
        SubsetPair::new(n, a.to_vec(), b.to_vec()).unwrap()
    }

    fn circulant(lambda: &[Rational]) -> DoublyStochastic<Rational> {
        CirculantWeights::new(lambda.to_vec(), &Tolerances::default())
            .unwrap()
            .build_matrix(&Tolerances::default())
            .unwrap()
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(
            pair(3, &[1], &[2]).indicator_vector::<Rational>(),
            vec![q(1, 1), q(-1, 1), q(0, 1)]
        );
        assert_eq!(
            pair(4, &[1, 3], &[2, 4]).indicator_vector::<Rational>(),
            vec![q(1, 2), q(-1, 2), q(1, 2), q(-1, 2)]
        );
        assert_eq!(
            pair(4, &[1, 2], &[3, 4]).indicator_vector::<Rational>(),
            vec![q(1, 2), q(1, 2), q(-1, 2), q(-1, 2)]
        );
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        assert_eq!(
            SubsetPair::new(3, vec![], vec![1]),
            Err(HypothesisError::EmptySubset { which: 'A' })
        );
        assert_eq!(
            SubsetPair::new(3, vec![1, 2], vec![2]),
            Err(HypothesisError::Overlap { index: 2 })
        );
        assert_eq!(
            SubsetPair::new(3, vec![4], vec![1]),
            Err(HypothesisError::IndexOutOfRange { index: 4, n: 3 })
        );
        assert_eq!(
            SubsetPair::new(3, vec![1, 1], vec![2]),
            Err(HypothesisError::DuplicateIndex { index: 1, which: 'A' })
        );
    }

    #[test]
    fn check_pair_examples() {
        let tol = Tolerances::default();
        let id = stochastic::identity::<Rational>(3).unwrap();
        let cert = check_pair(&id, &pair(3, &[2, 3], &[1]), &tol).unwrap().unwrap();
        assert!(cert.recheck(&id, &tol));

        let u = stochastic::uniform::<Rational>(3).unwrap();
        assert_eq!(check_pair(&u, &pair(3, &[1], &[2]), &tol).unwrap(), None);

        let p = circulant(&[q(1, 3), q(1, 6), q(1, 3), q(1, 6)]);
        let cert = check_pair(&p, &pair(4, &[1, 3], &[2, 4]), &tol).unwrap().unwrap();
        assert_eq!(cert.residual_sq, q(0, 1));
        assert!(cert.recheck(&p, &tol));

        assert!(matches!(
            check_pair(&p, &pair(3, &[1], &[2]), &tol),
            Err(HypothesisError::OrderMismatch { pair: 3, matrix: 4 })
        ));
    }

    #[test]
    fn float_check_pair_uses_residual_rule() {
        let tol = Tolerances::default();
        let id = stochastic::identity::<f64>(3).unwrap();
        let cert = check_pair(&id, &pair(3, &[1], &[3]), &tol).unwrap().unwrap();
        assert!(cert.residual_norm() < 1e-12);
        let u = stochastic::uniform::<f64>(3).unwrap();
        assert!(check_pair(&u, &pair(3, &[1], &[2]), &tol).unwrap().is_none());
    }

    #[test]
    fn find_witness_examples() {
        let tol = Tolerances::default();
        let id = stochastic::identity::<Rational>(2).unwrap();
        let s = find_witness(&id, &tol).unwrap();
        assert!(s.shortcut);
        assert_eq!(s.witness.unwrap().pair, pair(2, &[1], &[2]));

        for n in 2..=5 {
            let u = stochastic::uniform::<Rational>(n).unwrap();
            let s = find_witness(&u, &tol).unwrap();
            assert!(s.witness.is_none());
            assert_eq!(s.rank, 1);
            assert_eq!(s.pairs_visited as u128, candidate_count(n).unwrap());
        }

        // rank 3; the first witness in canonical order uses three indices
        let p = circulant(&[q(1, 4), q(1, 6), q(1, 4), q(1, 3)]);
        let s = find_witness(&p, &tol).unwrap();
        assert_eq!(s.rank, 3);
        let w = s.witness.unwrap();
        assert!(w.recheck(&p, &tol));
        assert!(check_pair(&p, &pair(4, &[1, 2], &[3, 4]), &tol).unwrap().is_some());
    }

    #[test]
    fn float_find_witness_agrees_with_exact() {
        let tol = Tolerances::default();
        let p = circulant(&[q(1, 3), q(1, 6), q(1, 3), q(1, 6)]);
        let exact = find_witness(&p, &tol).unwrap().witness.unwrap();
        let float = find_witness(&p.to_float(), &tol).unwrap().witness.unwrap();
        assert_eq!(exact.pair, float.pair);
        assert_eq!(exact.pair, pair(4, &[1, 3], &[2, 4]));
    }

    #[test]
    fn candidate_count_examples() {
        assert_eq!(candidate_count(1).unwrap(), 0);
        assert_eq!(candidate_count(2).unwrap(), 2);
        assert_eq!(candidate_count(3).unwrap(), 12);
        assert!(candidate_count(80).is_ok());
        assert_eq!(candidate_count(81), Err(HypothesisError::CountOverflow { n: 81 }));
    }

    #[test]
    fn canonical_order_prefix() {
        let mut seen = Vec::new();
        let _ = for_each_candidate(3, |a, b| {
            seen.push((a.to_vec(), b.to_vec()));
            ControlFlow::Continue(())
        });
        let expected: Vec<(Vec<usize>, Vec<usize>)> = vec![
            (vec![1], vec![2]),
            (vec![1], vec![3]),
            (vec![2], vec![1]),
            (vec![2], vec![3]),
            (vec![3], vec![1]),
            (vec![3], vec![2]),
            (vec![1], vec![2, 3]),
            (vec![1, 2], vec![3]),
            (vec![1, 3], vec![2]),
            (vec![2], vec![1, 3]),
            (vec![2, 3], vec![1]),
            (vec![3], vec![1, 2]),
        ];
        assert_eq!(seen, expected);
    }

    #[test]
    fn enumeration_too_large_without_full_rank() {
        let u = stochastic::uniform::<f64>(15).unwrap();
        assert!(matches!(
            find_witness(&u, &Tolerances::default()),
            Err(HypothesisError::EnumerationTooLarge { n: 15, .. })
        ));
        let id = stochastic::identity::<f64>(20).unwrap();
        assert!(find_witness(&id, &Tolerances::default()).unwrap().shortcut);
    }

    #[test]
    fn explorer_filters_rank_one_and_is_deterministic() {
        let tol = Tolerances::default();
        let family = vec![
            stochastic::uniform::<Rational>(4).unwrap(),
            stochastic::identity::<Rational>(4).unwrap(),
        ];
        assert!(filter_open_candidates(family, &tol).unwrap().is_empty());

        let a = explore_open_problem(4, 100, 1, &tol).unwrap();
        let b = explore_open_problem(4, 100, 1, &tol).unwrap();
        assert_eq!(a, b);
        for p in &a {
            let s = find_witness(p, &tol).unwrap();
            assert!(s.rank >= 2 && s.witness.is_none());
        }
        assert!(explore_open_problem(1, 10, 1, &tol).is_err());
    }
}
