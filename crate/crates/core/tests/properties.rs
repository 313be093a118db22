use convexity_gate::circulant::{dft_spectrum, CirculantWeights, SpectralValue};
use convexity_gate::functions::{t_convexity_gap, FunctionSpec, Interval};
use convexity_gate::hypothesis::{check_pair, find_witness};
use convexity_gate::inequality::{evaluate_sides, leave_one_out_sides, search_violation, SamplerConfig};
use convexity_gate::io::{matrix_to_json, read_matrix};
use convexity_gate::numerics::{
    in_column_span, left_null_space, mat_vec, min_residual_solve, rank, Matrix, Rational, Scalar,
    Tolerances,
};
use convexity_gate::stochastic::{sample_birkhoff, uniform};
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=20).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), n)
}

fn order_and_point() -> impl Strategy<Value = (usize, Vec<Rational>)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), point(n)))
}

fn exact_function() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        Just(FunctionSpec::power(Rational::from_int(2)).unwrap()),
        Just(FunctionSpec::power(Rational::from_int(3)).unwrap()),
        Just(FunctionSpec::abs()),
        Just(FunctionSpec::neg_square()),
        (rational(), rational()).prop_map(|(a, b)| FunctionSpec::affine(a, b)),
        prop::collection::vec(rational(), 1..=5).prop_map(|c| FunctionSpec::polynomial(c).unwrap()),
    ]
}

fn tol() -> Tolerances {
    Tolerances::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn averaging_preserves_sum_and_range((n, x) in order_and_point(), k in 1usize..4, seed in any::<u64>()) {
        let p = sample_birkhoff::<Rational>(n, k, seed).unwrap();
        let y = p.apply(&x).unwrap();
        prop_assert_eq!(y.iter().cloned().sum::<Rational>(), x.iter().cloned().sum::<Rational>());
        let lo = x.iter().min().unwrap();
        let hi = x.iter().max().unwrap();
        prop_assert!(y.iter().all(|v| v >= lo && v <= hi));
    }

    #[test]
    fn uniform_matrix_has_zero_gap((n, x) in order_and_point(), f in exact_function()) {
        let u = uniform::<Rational>(n).unwrap();
        let ev = evaluate_sides(&u, &f, &Interval::real_line(), &x).unwrap();
        prop_assert!(ev.gap.is_zero());
    }

    #[test]
    fn affine_functions_have_zero_gap(
        (n, x) in order_and_point(), a in rational(), b in rational(), seed in any::<u64>()
    ) {
        let p = sample_birkhoff::<Rational>(n, 3, seed).unwrap();
        let f = FunctionSpec::affine(a, b);
        prop_assert!(evaluate_sides(&p, &f, &Interval::real_line(), &x).unwrap().gap.is_zero());
        if n >= 2 {
            prop_assert!(leave_one_out_sides(&f, &Interval::real_line(), &x).unwrap().gap.is_zero());
        }
    }

    #[test]
    fn constant_points_have_zero_leave_one_out_gap(n in 2usize..=6, c in rational(), f in exact_function()) {
        let x = vec![c; n];
        prop_assert!(leave_one_out_sides(&f, &Interval::real_line(), &x).unwrap().gap.is_zero());
    }

    #[test]
    fn convexity_gap_is_symmetric(
        f in exact_function(), u in rational(), v in rational(), t in (0i64..=12).prop_map(|k| Rational::ratio(k, 12))
    ) {
        let line = Interval::real_line();
        let s = Rational::from_int(1) - t.clone();
        prop_assert_eq!(
            t_convexity_gap(&f, &u, &v, &t, &line).unwrap(),
            t_convexity_gap(&f, &v, &u, &s, &line).unwrap()
        );
    }

    #[test]
    fn scaling_scales_the_gap(
        f in exact_function(), c in rational(), u in rational(), v in rational(),
        t in (0i64..=8).prop_map(|k| Rational::ratio(k, 8))
    ) {
        let line = Interval::real_line();
        let g = FunctionSpec::scaled(f.clone(), c.clone());
        prop_assert_eq!(
            t_convexity_gap(&g, &u, &v, &t, &line).unwrap(),
            c * t_convexity_gap(&f, &u, &v, &t, &line).unwrap()
        );
    }

    #[test]
    fn square_is_convex_and_negsquare_concave(
        u in rational(), v in rational(), t in (0i64..=10).prop_map(|k| Rational::ratio(k, 10))
    ) {
        let line = Interval::real_line();
        let sq = FunctionSpec::power(Rational::from_int(2)).unwrap();
        prop_assert!(t_convexity_gap(&sq, &u, &v, &t, &line).unwrap() >= Rational::zero());
        prop_assert!(t_convexity_gap(&FunctionSpec::neg_square(), &u, &v, &t, &line).unwrap() <= Rational::zero());
    }

    #[test]
    fn witnesses_recheck_and_swap(n in 2usize..=5, k in 1usize..4, seed in any::<u64>()) {
        let p = sample_birkhoff::<Rational>(n, k, seed).unwrap();
        let search = find_witness(&p, &tol()).unwrap();
        prop_assert_eq!(search.rank, rank(p.matrix(), &tol()).unwrap());
        if let Some(cert) = search.witness {
            prop_assert!(cert.recheck(&p, &tol()));
            let swapped = check_pair(&p, &cert.pair.swapped(), &tol()).unwrap();
            prop_assert!(swapped.is_some());
        } else {
            prop_assert!(search.rank < n);
        }
    }

    #[test]
    fn exact_and_float_sides_agree((n, x) in order_and_point(), seed in any::<u64>()) {
        let p = sample_birkhoff::<Rational>(n, 2, seed).unwrap();
        let f = FunctionSpec::power(Rational::from_int(2)).unwrap();
        let line = Interval::real_line();
        let exact = evaluate_sides(&p, &f, &line, &x).unwrap();
        let xf: Vec<f64> = x.iter().map(Scalar::as_f64).collect();
        let float = evaluate_sides(&p.to_float(), &f, &line, &xf).unwrap();
        let scale = 1.0 + exact.lhs.as_f64().abs() + exact.rhs.as_f64().abs();
        prop_assert!((exact.gap.as_f64() - float.gap).abs() <= 1e-12 * scale);
    }

    #[test]
    fn image_vectors_are_in_the_span(
        rows in prop::collection::vec(point(4), 4), c in point(4)
    ) {
        let m = Matrix::from_rows(rows).unwrap();
        let v = mat_vec(&m, &c);
        prop_assert!(in_column_span(&m, &v, &tol()).unwrap());
        prop_assert!(min_residual_solve(&m, &v, &tol()).unwrap().residual_sq.is_zero());
        prop_assert_eq!(rank(&m, &tol()).unwrap(), rank(&m.transpose(), &tol()).unwrap());
    }

    #[test]
    fn left_null_space_annihilates(rows in prop::collection::vec(point(3), 4)) {
        let m = Matrix::from_rows(rows).unwrap();
        let basis = left_null_space(&m, &tol());
        prop_assert_eq!(basis.len() + rank(&m, &tol()).unwrap(), 4);
        let mt = m.transpose();
        for w in basis {
            prop_assert!(mat_vec(&mt, &w).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn circulant_is_symmetric_with_conjugate_spectrum(
        raw in prop::collection::vec(0i64..=10, 1..=6).prop_filter("nonzero", |v| v.iter().any(|&k| k > 0))
    ) {
        let total: i64 = raw.iter().sum();
        let lambda: Vec<Rational> = raw.iter().map(|&k| Rational::ratio(k, total)).collect();
        let w = CirculantWeights::new(lambda, &tol()).unwrap();
        let p = w.build_matrix(&tol()).unwrap();
        prop_assert_eq!(p.matrix(), &p.matrix().transpose());
        let spec = dft_spectrum(&w);
        let n = w.n();
        for k in 1..n {
            match (&spec.values[k], &spec.values[n - k]) {
                (SpectralValue::Exact(a), SpectralValue::Exact(b)) => prop_assert_eq!(a, &b.conj()),
                (a, b) => {
                    let d = a.to_complex64() - b.to_complex64().conj();
                    prop_assert!(d.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn matrix_json_round_trips(n in 1usize..=4, k in 1usize..4, seed in any::<u64>()) {
        let p = sample_birkhoff::<Rational>(n, k, seed).unwrap();
        let raw = read_matrix(&matrix_to_json(p.matrix()), "matrix").unwrap();
        prop_assert_eq!(&raw.to_matrix::<Rational>(), p.matrix());
        let f = p.to_float();
        let raw = read_matrix(&matrix_to_json(f.matrix()), "matrix").unwrap();
        prop_assert_eq!(&raw.to_matrix::<f64>(), f.matrix());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn search_witnesses_are_sound(n in 2usize..=4, seed in any::<u64>()) {
        let t = tol();
        let p = sample_birkhoff::<f64>(n, 2, seed).unwrap();
        let i = Interval::finite(-5, 5).unwrap();
        let f = FunctionSpec::polynomial(vec![Rational::zero(), Rational::from_int(1), Rational::ratio(-1, 3)]).unwrap();
        if let Some(w) = search_violation(&p, &f, &i, &SamplerConfig::new(seed), 200, &t).unwrap() {
            prop_assert!(w.recheck(&t));
            prop_assert!(w.evaluation.is_violation(&t));
        }
        let convex = FunctionSpec::power(Rational::from_int(4)).unwrap();
        prop_assert!(search_violation(&p, &convex, &i, &SamplerConfig::new(seed), 200, &t).unwrap().is_none());
    }
}
