mod common;

use std::f64::consts::PI;

use krein_string::spectral::compute_spectral_data;
use krein_string::uniform::{
    bessel_j, chebyshev_gram, delta_solution, delta_solution_spectral, pair_corrected_response, pair_response,
    pair_solution_with_sine, response_uniform, sweep, uniform_eigen, uniform_spec, Proposition, QuadControls,
    SweepParams, TestFunction, BESSEL_TAIL_CONSTANT,
};
use krein_string::{Error, SystemMatrices};
use proptest::prelude::*;

#[test]
fn closed_form_spectrum_matches_eigensolver() {
    for n in 2..=50 {
        let closed = uniform_eigen(n).unwrap();
        let generic = compute_spectral_data(&SystemMatrices::from_spec(&uniform_spec(n).unwrap())).unwrap();
        for (a, b) in closed.eigenvalues().iter().zip(generic.eigenvalues()) {
            assert!((a - b).abs() <= 1e-9 * b.abs(), "n={n}");
        }
        for (k, (a, b)) in closed.weights().iter().zip(generic.weights()).enumerate() {
            let s = ((k + 1) as f64 * PI / n as f64).sin();
            assert!((a - 0.5 / (s * s)).abs() <= 1e-9 * a);
            assert!((a - b).abs() <= 1e-8 * a, "n={n} k={k}");
        }
    }
}

#[test]
fn chebyshev_orthogonality() {
    for n in [3, 8, 17, 64] {
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let want = if i == j { n as f64 / 2.0 } else { 0.0 };
                assert!((chebyshev_gram(n, i, j) - want).abs() < 1e-10, "n={n} i={i} j={j}");
            }
        }
    }
}

#[test]
fn bessel_generating_series() {
    // sin(z sin th) = 2 sum_k J_{2k+1}(z) sin((2k+1) th)
    for z in [0.5, 3.0, 20.0, 75.0] {
        for th in [0.3, 1.1, 2.5] {
            let series: f64 = (0..120).map(|k| 2.0 * bessel_j(2 * k + 1, z) * ((2 * k + 1) as f64 * th).sin()).sum();
            assert!((series - (z * f64::sin(th)).sin()).abs() < 1e-12, "z={z} th={th}");
        }
    }
}

#[test]
fn bessel_tail_constant_bounds_j2() {
    let mut s: f64 = 1e-3;
    while s < 1e4 {
        assert!(s.sqrt() * bessel_j(2, s).abs() <= BESSEL_TAIL_CONSTANT, "s={s}");
        s += 0.01 * s.min(10.0);
    }
}

#[test]
fn spectral_forward_equals_pinned_chain_image_sum() {
    for n in [4, 8, 16] {
        for j in [1, n / 2, n - 1] {
            for t in [0.1, 0.55, 1.0] {
                let spectral = delta_solution_spectral(n, j, t).unwrap();
                let images = common::pinned_chain_images(n, j, t);
                assert!((spectral - images).abs() < 1e-9, "n={n} j={j} t={t}: {spectral} vs {images}");
            }
        }
    }
}

#[test]
fn closed_form_agrees_before_reflection() {
    // the closed form is the free-chain solution; early on the pinned end is invisible
    for n in [8, 16, 32] {
        let t = 0.25;
        let gap = (delta_solution(n, 1, t).unwrap() - delta_solution_spectral(n, 1, t).unwrap()).abs();
        assert!(gap < 1e-8, "n={n}: {gap}");
    }
}

#[test]
fn response_is_first_mass() {
    for t in [0.01, 0.2, 0.9] {
        assert_eq!(response_uniform(12, t).unwrap(), delta_solution(12, 1, t).unwrap());
    }
}

#[test]
fn pairing_substitution() {
    // <r_N, xi> computed in t directly by a fine trapezoid rule
    let n = 8;
    let xi = TestFunction::Gaussian { center: 0.1, width: 0.2 };
    let (t_end, steps) = (3.0, 300_000);
    let h = t_end / steps as f64;
    let direct: f64 = (1..steps).map(|i| {
        let t = i as f64 * h;
        h * response_uniform(n, t).unwrap() * xi.eval(t)
    }).sum();
    let p = pair_response(n, &xi, QuadControls::default()).unwrap();
    assert!((direct - p.value).abs() < 1e-8, "{direct} vs {}", p.value);
    assert!(p.tail_bound <= 1e-4);
}

#[test]
fn constant_pairing_and_truncation_error() {
    let one = TestFunction::Constant { value: 1.0 };
    let p = pair_response(16, &one, QuadControls { tol: 0.02, ..Default::default() }).unwrap();
    // int_0^{t_max} r_N = 1 - 2 J_1(S)/S with S = 2 N t_max
    let s = 32.0 * p.t_max;
    assert!((p.value - (1.0 - 2.0 * bessel_j(1, s) / s)).abs() < 1e-9);
    let capped = QuadControls { tol: 1e-4, max_argument: 1e4, ..Default::default() };
    assert!(matches!(pair_response(16, &one, capped), Err(Error::Truncation { .. })));
}

#[test]
fn pairings_converge() {
    let xi = TestFunction::Gaussian { center: 0.2, width: 0.3 };
    let quad = QuadControls::default();
    let e2: Vec<f64> = [16, 32, 64].iter().map(|&n| (pair_response(n, &xi, quad).unwrap().value - xi.eval(0.0)).abs()).collect();
    let e3: Vec<f64> = [16, 32, 64].iter().map(|&n| (pair_corrected_response(n, &xi, quad).unwrap() - xi.derivative(0.0)).abs()).collect();
    for w in e2.windows(2).chain(e3.windows(2)) {
        assert!(w[0] / w[1] > 1.5, "{w:?}");
    }
    let flat = TestFunction::RaisedCosine { center: 0.0, width: 0.5 };
    assert!(pair_corrected_response(128, &flat, quad).unwrap().abs() < 0.1);
}

#[test]
fn sine_projection_converges() {
    for (t, k) in [(0.4, 1u32), (0.6, 2)] {
        let closed = |n: usize| (2.0 * n as f64 * t * (k as f64 / (2.0 * n as f64)).sin()).sin();
        let v = pair_solution_with_sine(128, t, k).unwrap();
        assert!((v - (k as f64 * t).sin()).abs() < 1e-3);
        assert!((v - closed(128)).abs() < 1e-3);
    }
}

#[test]
fn sweep_rows_report_errors() {
    let params = SweepParams::default();
    let rows = sweep(Proposition::SineProjection, &[8, 16], &params).unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r.abs_error, (r.value - r.target).abs());
    }
    assert!(Proposition::from_index(5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bessel_three_term_recurrence(n in 1u32..60, log_x in -2.0f64..2.7) {
        let x = 10f64.powf(log_x);
        let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
        let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn chebyshev_boundary_value(m in 0usize..200) {
        prop_assert!((krein_string::uniform::chebyshev_u(m, 1.0) - (m + 1) as f64).abs() < 1e-9);
    }
}

#[test]
fn delta_state_matches_generic_solver() {
    for n in [4, 9, 16] {
        for t in [0.2, 0.8] {
            let u = krein_string::uniform::uniform_delta_state(n, t).unwrap();
            for (j, uj) in u.iter().enumerate() {
                assert!((uj - delta_solution_spectral(n, j + 1, t).unwrap()).abs() < 1e-9);
            }
        }
    }
}
