mod common;

use krein_string::forward::{
    apply_response_operator, check_integral_equation, response_function, solve_forward_ode, solve_forward_spectral,
    TimeGrid, Waveform,
};
use krein_string::spectral::compute_spectral_data;
use krein_string::{Error, SystemMatrices};

#[test]
fn spectral_and_rk4_agree() {
    let mut rng = common::rng(21);
    for segments in [2, 4, 7] {
        let spec = common::random_spec(&mut rng, segments, 0.2, 1.5);
        let mats = SystemMatrices::from_spec(&spec);
        let data = compute_spectral_data(&mats).unwrap();
        let steps = (3.0 * data.max_frequency() / 0.02).ceil() as usize;
        let grid = TimeGrid::new(3.0, steps).unwrap();
        let f = common::smooth_control(&mut rng, grid);
        let a = solve_forward_spectral(&mats, &data, &f, spec.l1()).unwrap();
        let b = solve_forward_ode(&mats, &f, spec.l1()).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-6);
    }
}

#[test]
fn response_convolution_reproduces_first_mass() {
    let mut rng = common::rng(22);
    let spec = common::random_spec(&mut rng, 4, 0.3, 1.0);
    let mats = SystemMatrices::from_spec(&spec);
    let data = compute_spectral_data(&mats).unwrap();
    let grid = TimeGrid::new(2.0, 4000).unwrap();
    let f = common::smooth_control(&mut rng, grid);
    let r = response_function(&data, spec.l1(), grid);
    let rf = apply_response_operator(&r, &f).unwrap();
    let u1 = solve_forward_spectral(&mats, &data, &f, spec.l1()).unwrap().component(1).unwrap();
    let gap = rf.values().iter().zip(u1.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-5 * u1.max_abs().max(1.0), "gap {gap}");
}

#[test]
fn causality() {
    let mut rng = common::rng(23);
    let spec = common::random_spec(&mut rng, 3, 0.3, 1.0);
    let mats = SystemMatrices::from_spec(&spec);
    let data = compute_spectral_data(&mats).unwrap();
    let grid = TimeGrid::new(2.0, 1000).unwrap();
    let f = common::smooth_control(&mut rng, grid);
    let cut = 600;
    let mut g = f.values().to_vec();
    for (j, v) in g.iter_mut().enumerate().skip(cut) {
        *v += (j - cut) as f64 * 1e-2;
    }
    let g = Waveform::new(grid, g).unwrap();
    let uf = solve_forward_spectral(&mats, &data, &f, spec.l1()).unwrap();
    let ug = solve_forward_spectral(&mats, &data, &g, spec.l1()).unwrap();
    for j in 0..=cut {
        assert_eq!(uf.states()[j], ug.states()[j]);
    }
    assert_ne!(uf.final_state(), ug.final_state());
}

#[test]
fn linearity() {
    let mut rng = common::rng(24);
    let spec = common::random_spec(&mut rng, 5, 0.3, 1.0);
    let mats = SystemMatrices::from_spec(&spec);
    let data = compute_spectral_data(&mats).unwrap();
    let grid = TimeGrid::new(2.0, 1000).unwrap();
    let f = common::smooth_control(&mut rng, grid);
    let g = common::smooth_control(&mut rng, grid);
    let (a, b) = (0.7, -1.3);
    let h = Waveform::new(grid, f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect()).unwrap();
    let (uf, ug, uh) = (
        solve_forward_spectral(&mats, &data, &f, spec.l1()).unwrap(),
        solve_forward_spectral(&mats, &data, &g, spec.l1()).unwrap(),
        solve_forward_spectral(&mats, &data, &h, spec.l1()).unwrap(),
    );
    for j in 0..grid.len() {
        for i in 0..uh.dimension() {
            let want = a * uf.states()[j][i] + b * ug.states()[j][i];
            assert!((uh.states()[j][i] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn integral_equation_second_order() {
    let mut rng = common::rng(25);
    let spec = common::random_spec(&mut rng, 4, 0.3, 1.0);
    let mats = SystemMatrices::from_spec(&spec);
    let data = compute_spectral_data(&mats).unwrap();
    let control = |t: f64| (1.3 * t).sin() + 0.5 * (0.4 * t).cos() - 0.5;
    let residual = |steps| {
        let f = Waveform::sample(TimeGrid::new(2.0, steps).unwrap(), control);
        let traj = solve_forward_spectral(&mats, &data, &f, spec.l1()).unwrap();
        check_integral_equation(&spec, &traj, &f).unwrap()
    };
    let (coarse, fine) = (residual(1000), residual(2000));
    assert!(coarse / fine > 3.5, "{coarse} / {fine}");
    assert!(fine < 1e-5);
}

#[test]
fn undersampled_grid_refused() {
    let spec = krein_string::StringSpec::new(vec![0.01, 0.01], vec![0.01]).unwrap();
    let mats = SystemMatrices::from_spec(&spec);
    let data = compute_spectral_data(&mats).unwrap();
    let f = Waveform::zeros(TimeGrid::new(1.0, 100).unwrap());
    assert!(matches!(solve_forward_spectral(&mats, &data, &f, 0.01), Err(Error::Nyquist { .. })));
    let coarse = Waveform::zeros(TimeGrid::new(1.0, 20).unwrap());
    assert!(matches!(solve_forward_ode(&mats, &coarse, 0.01), Err(Error::Stability { .. })));
}
