mod common;

use common::{connection_by_quadrature, rng};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use wigneton::compress::{
    assemble_1d_operator, connection_coefficients, derivative_matrix, to_nonstandard_form, Axis, OperatorKind,
};
use wigneton::wavelet::daubechies_filters;
use wigneton::Error;

#[test]
fn sum_rules() {
    for genus in [4, 6, 8, 10] {
        let b = daubechies_filters(genus).unwrap();
        let t = connection_coefficients(&b, 0, 1).unwrap();
        assert!((t.moment(1) + 1.0).abs() < 1e-10, "genus {genus}: {}", t.moment(1));
        assert!(t.moment(0).abs() < 1e-12);
        if genus > 4 {
            let t2 = connection_coefficients(&b, 0, 2).unwrap();
            assert!((t2.moment(2) - 2.0).abs() < 1e-9);
            assert!(t2.moment(0).abs() < 1e-12 && t2.moment(1).abs() < 1e-12);
        }
    }
}

#[test]
fn tables_match_cascade_quadrature() {
    for genus in [4, 6, 8, 10] {
        let b = daubechies_filters(genus).unwrap();
        let t = connection_coefficients(&b, 0, 1).unwrap();
        for (l, oracle) in connection_by_quadrature(&b, 1, 12) {
            assert!((t.get(l) - oracle).abs() < 1e-6, "genus {genus} shift {l}: {} vs {oracle}", t.get(l));
        }
    }
    for genus in [8, 10] {
        let b = daubechies_filters(genus).unwrap();
        let t = connection_coefficients(&b, 0, 2).unwrap();
        for (l, oracle) in connection_by_quadrature(&b, 2, 12) {
            assert!((t.get(l) - oracle).abs() < 1e-5 * (1.0 + oracle.abs()), "genus {genus} shift {l}");
        }
    }
}

#[test]
fn order_symmetries() {
    let b = daubechies_filters(10).unwrap();
    for (d1, d2) in [(0, 1), (1, 1), (0, 2), (1, 2), (0, 3), (2, 2)] {
        let a = connection_coefficients(&b, d1, d2).unwrap();
        let swapped = connection_coefficients(&b, d2, d1).unwrap();
        let sign = if (d1 + d2) % 2 == 0 { 1.0 } else { -1.0 };
        for l in -8..=8 {
            assert!((a.get(l) - sign * swapped.get(l)).abs() < 1e-9 * (1.0 + a.get(l).abs()));
            assert!((a.get(l) - swapped.get(-l)).abs() < 1e-9 * (1.0 + a.get(l).abs()));
        }
    }
    assert!(matches!(
        connection_coefficients(&b, 2, 3),
        Err(Error::InsufficientGenus { genus: 10, d1: 2, d2: 3 })
    ));
}

#[test]
fn derivative_convergence_order() {
    // a genus-g stencil for ∂^d is exact to order g + 2 − 2d on smooth periodic data
    let w = 6.0 * std::f64::consts::PI;
    for genus in [4, 6, 8, 10] {
        let b = daubechies_filters(genus).unwrap();
        for d in [1usize, 2] {
            if 2 * d >= genus {
                continue;
            }
            let err = |n: usize| {
                let ax = Axis::new(0.0, 1.0, n).unwrap();
                let x = ax.nodes();
                let f: Vec<f64> = x.iter().map(|x| (w * x).sin()).collect();
                let y = derivative_matrix(&b, d, &ax).unwrap().mul_vec(&f);
                x.iter()
                    .zip(&y)
                    .map(|(x, y)| {
                        let exact = if d == 1 { w * (w * x).cos() } else { -w * w * (w * x).sin() };
                        (y - exact).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let order = (err(64) / err(128)).log2();
            let expected = (genus + 2 - 2 * d) as f64;
            assert!(order > expected - 0.3, "genus {genus} d {d}: {order}");
        }
    }
}

#[test]
fn first_derivative_compresses_below_five_percent() {
    let b = daubechies_filters(8).unwrap();
    let axis = Axis::new(0.0, 1.0, 1024).unwrap();
    let dense = assemble_1d_operator(&OperatorKind::Derivative(1), &b, &axis).unwrap();
    let (ns, stats) = to_nonstandard_form(&dense, &b, 6).unwrap().threshold_compress(1e-8).unwrap();
    assert!(stats.retained_fraction <= 0.05, "{}", stats.retained_fraction);
    assert_eq!(stats.dense_dim, 1024);
    let mut r = rng(8);
    for _ in 0..100 {
        let mut v: Vec<f64> = (0..1024).map(|_| r.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        let exact = &dense * DVector::from_column_slice(&v);
        let approx = ns.apply(&v).unwrap();
        let err = approx.iter().zip(exact.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err < 1e-6);
        assert!(err <= stats.max_apply_error_bound * (1.0 + 1e-9) + 1e-9);
    }
}

#[test]
fn nonstandard_form_is_exact_without_thresholding() {
    let b = daubechies_filters(6).unwrap();
    let axis = Axis::new(-2.0, 2.0, 128).unwrap();
    for kind in [OperatorKind::Derivative(2), OperatorKind::MultiplyByX, OperatorKind::MultiplyByPoly(vec![1.0, 0.0, -0.5])] {
        let dense = assemble_1d_operator(&kind, &b, &axis).unwrap();
        let ns = to_nonstandard_form(&dense, &b, 4).unwrap();
        let back = ns.to_dense();
        assert!((&back - &dense).amax() < 1e-10 * dense.amax());
        let v: Vec<f64> = (0..128).map(|i| (i as f64 * 0.37).sin()).collect();
        let exact = &dense * DVector::from_column_slice(&v);
        let applied = ns.apply(&v).unwrap();
        let err = applied.iter().zip(exact.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10 * dense.amax());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn apply_error_respects_bound(log_eps in -10.0f64..-2.0, seed in any::<u64>(), genus in prop::sample::select(vec![4usize, 6, 8])) {
        let b = daubechies_filters(genus).unwrap();
        let axis = Axis::new(0.0, 1.0, 256).unwrap();
        let dense = assemble_1d_operator(&OperatorKind::Derivative(1), &b, &axis).unwrap();
        let eps = 10f64.powf(log_eps);
        let (ns, stats) = to_nonstandard_form(&dense, &b, 4).unwrap().threshold_compress(eps).unwrap();
        let mut r = rng(seed);
        let mut v: Vec<f64> = (0..256).map(|_| r.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        let exact = &dense * DVector::from_column_slice(&v);
        let approx = ns.apply(&v).unwrap();
        let err = approx.iter().zip(exact.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= stats.max_apply_error_bound * (1.0 + 1e-9) + 1e-10 * dense.amax());
        prop_assert!(stats.retained_fraction <= 1.0);
    }
}
