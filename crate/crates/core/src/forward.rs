//! Forward dynamics of the string driven by a boundary control.
//!
//! Two independent solvers are provided. [`solve_forward_spectral`] expands
//! the state in the eigenvectors `phi^k` and integrates each modal
//! oscillator exactly against the piecewise-linear interpolant of the control.
//! [`solve_forward_ode`] integrates `M u'' = A u + f e_1 / l_1` with classical
//! RK4 and serves as the cross-check.

use crate::error::{Error, Result};
use crate::model::{StringSpec, SystemMatrices};
use crate::spectral::SpectralData;

/// Largest admissible `sqrt|lambda_max| * dt` for spectral evaluation.
pub const NYQUIST_LIMIT: f64 = 0.5;

/// RK4 is stable on the imaginary axis up to `2 sqrt(2)`; keep a margin.
pub const RK4_LIMIT: f64 = 2.8;

/// Uniform grid `t_j = j T / n`, `j = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidArgument("grid needs at least one step".into()));
        }
        Ok(Self { horizon, n_steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        if j == self.n_steps {
            self.horizon
        } else {
            j as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|j| self.time(j)).collect()
    }

    /// Same spacing, `factor` times longer.
    pub fn extended(&self, factor: usize) -> Self {
        Self { horizon: self.horizon * factor as f64, n_steps: self.n_steps * factor }
    }

    /// Trapezoid weights for `int_0^T`.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.dt();
        let mut w = vec![h; self.len()];
        w[0] = 0.5 * h;
        w[self.n_steps] = 0.5 * h;
        w
    }

    fn same_as(&self, other: &Self) -> bool {
        self.n_steps == other.n_steps && (self.horizon - other.horizon).abs() <= 1e-12 * self.horizon
    }
}

/// Samples of a real function on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl Waveform {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for {} nodes", values.len(), grid.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn sample(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.time(j))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Trapezoid inner product on the common grid.
    pub fn inner(&self, other: &Waveform) -> Result<f64> {
        check_same_grid(&self.grid, &other.grid)?;
        let w = self.grid.trapezoid_weights();
        Ok(w.iter().zip(&self.values).zip(&other.values).map(|((w, a), b)| w * a * b).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_same_grid(a: &TimeGrid, b: &TimeGrid) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "T={} n={} vs T={} n={}",
            a.horizon, a.n_steps, b.horizon, b.n_steps
        )))
    }
}

/// States `u(t_j)` of the mass system, optionally with velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<Vec<f64>>,
    velocities: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn velocities(&self) -> Option<&[Vec<f64>]> {
        self.velocities.as_deref()
    }

    pub fn dimension(&self) -> usize {
        self.states[0].len()
    }

    pub fn final_state(&self) -> &[f64] {
        &self.states[self.grid.n_steps]
    }

    /// `u_i(t)` for 1-based mass index `i`.
    pub fn component(&self, i: usize) -> Result<Waveform> {
        if i == 0 || i > self.dimension() {
            return Err(Error::OutOfRange(format!("mass index {i} not in 1..={}", self.dimension())));
        }
        Ok(Waveform { grid: self.grid, values: self.states.iter().map(|s| s[i - 1]).collect() })
    }

    /// Largest componentwise difference between two trajectories on the same grid.
    pub fn max_abs_diff(&self, other: &Trajectory) -> Result<f64> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }
}

fn check_nyquist(data: &SpectralData, grid: &TimeGrid) -> Result<()> {
    let product = data.max_frequency() * grid.dt();
    if product >= NYQUIST_LIMIT {
        return Err(Error::Nyquist { product, limit: NYQUIST_LIMIT });
    }
    Ok(())
}

fn check_consistent(mats: &SystemMatrices, data: &SpectralData, l1: f64) -> Result<()> {
    if data.len() != mats.order() {
        return Err(Error::InvalidArgument(format!(
            "spectral data has {} modes, system has order {}",
            data.len(),
            mats.order()
        )));
    }
    if !(l1 > 0.0 && l1.is_finite()) {
        return Err(Error::InvalidArgument(format!("l1 must be positive, got {l1}")));
    }
    Ok(())
}

/// One-step propagator of `c'' = -s^2 c + f` over `[t, t+h]` for linear `f`.
struct ModalStep {
    cos: f64,
    sin_over_s: f64,
    minus_s_sin: f64,
    // contributions of f_j and f_{j+1} to c and c'
    c_f0: f64,
    c_f1: f64,
    d_f0: f64,
    d_f1: f64,
}

impl ModalStep {
    fn new(s: f64, h: f64) -> Self {
        let theta = s * h;
        let (sn, cs) = theta.sin_cos();
        let half = (0.5 * theta).sin();
        // int_0^h sin(s(h-x))/s dx and int_0^h sin(s(h-x))/s * x dx
        let p0 = 2.0 * half * half / (s * s);
        let p1 = if theta < 0.1 {
            let t2 = theta * theta;
            h * h * h * (1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362_880.0)
        } else {
            (theta - sn) / (s * s * s)
        };
        // int_0^h cos(s(h-x)) dx and int_0^h cos(s(h-x)) * x dx
        let q0 = sn / s;
        let q1 = p0;
        Self {
            cos: cs,
            sin_over_s: sn / s,
            minus_s_sin: -s * sn,
            c_f0: p0 - p1 / h,
            c_f1: p1 / h,
            d_f0: q0 - q1 / h,
            d_f1: q1 / h,
        }
    }
}

/// Modal coordinates `c_k(t_j) = int_0^{t_j} sin(s(t_j - tau))/s f(tau) dtau` and
/// their time derivatives, with `f` linear between nodes.
fn modal_response(s: f64, h: f64, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let step = ModalStep::new(s, h);
    let mut c = vec![0.0; f.len()];
    let mut d = vec![0.0; f.len()];
    for j in 0..f.len() - 1 {
        c[j + 1] = step.cos * c[j] + step.sin_over_s * d[j] + step.c_f0 * f[j] + step.c_f1 * f[j + 1];
        d[j + 1] = step.minus_s_sin * c[j] + step.cos * d[j] + step.d_f0 * f[j] + step.d_f1 * f[j + 1];
    }
    (c, d)
}

fn assemble(
    data: &SpectralData,
    l1: f64,
    grid: TimeGrid,
    mut modal: impl FnMut(usize, f64) -> (Vec<f64>, Vec<f64>),
) -> Trajectory {
    let dim = data.len();
    let mut states = vec![vec![0.0; dim]; grid.len()];
    let mut velocities = vec![vec![0.0; dim]; grid.len()];
    let freqs = data.frequencies();
    for (k, &s) in freqs.iter().enumerate() {
        let (c, d) = modal(k, s);
        let phi = &data.eigenvectors()[k];
        let scale = 1.0 / (l1 * data.weights()[k]);
        for j in 0..grid.len() {
            let (cj, dj) = (c[j] * scale, d[j] * scale);
            for i in 0..dim {
                states[j][i] += phi[i] * cj;
                velocities[j][i] += phi[i] * dj;
            }
        }
    }
    Trajectory { grid, states, velocities: Some(velocities) }
}

/// Spectral representation of `u^f(t)` with the control interpolated linearly
/// between grid nodes.
pub fn solve_forward_spectral(
    mats: &SystemMatrices,
    data: &SpectralData,
    f: &Waveform,
    l1: f64,
) -> Result<Trajectory> {
    check_consistent(mats, data, l1)?;
    let grid = f.grid();
    check_nyquist(data, &grid)?;
    let h = grid.dt();
    Ok(assemble(data, l1, grid, |_, s| modal_response(s, h, f.values())))
}

/// Spectral solution for the control `f = delta(t)`: the modal convolution is
/// replaced by `sin(s t)/s` exactly.
pub fn solve_forward_spectral_delta(
    mats: &SystemMatrices,
    data: &SpectralData,
    grid: TimeGrid,
    l1: f64,
) -> Result<Trajectory> {
    check_consistent(mats, data, l1)?;
    check_nyquist(data, &grid)?;
    Ok(assemble(data, l1, grid, |_, s| {
        (0..grid.len())
            .map(|j| {
                let (sn, cs) = (s * grid.time(j)).sin_cos();
                (sn / s, cs)
            })
            .unzip()
    }))
}

/// RK4 integration of `M u'' = A u + f e_1 / l_1` from rest.
pub fn solve_forward_ode(mats: &SystemMatrices, f: &Waveform, l1: f64) -> Result<Trajectory> {
    if !(l1 > 0.0 && l1.is_finite()) {
        return Err(Error::InvalidArgument(format!("l1 must be positive, got {l1}")));
    }
    let grid = f.grid();
    let h = grid.dt();
    let product = mats.frequency_bound_sq().sqrt() * h;
    if product >= RK4_LIMIT {
        return Err(Error::Stability { product, limit: RK4_LIMIT });
    }
    let n = mats.order();
    let fv = f.values();
    let inv_m: Vec<f64> = mats.masses().iter().map(|m| 1.0 / m).collect();

    let accel = |u: &[f64], force: f64, out: &mut [f64]| {
        mats.apply_stiffness(u, out);
        out[0] += force / l1;
        for (o, im) in out.iter_mut().zip(&inv_m) {
            *o *= im;
        }
    };

    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut states = Vec::with_capacity(grid.len());
    let mut velocities = Vec::with_capacity(grid.len());
    states.push(u.clone());
    velocities.push(v.clone());

    let (mut k1u, mut k2u, mut k3u, mut k4u) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut k1v, mut k2v, mut k3v, mut k4v) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp_u = vec![0.0; n];
    for j in 0..grid.n_steps() {
        let f0 = fv[j];
        let f1 = fv[j + 1];
        let fm = 0.5 * (f0 + f1);

        k1u.copy_from_slice(&v);
        accel(&u, f0, &mut k1v);

        for i in 0..n {
            tmp_u[i] = u[i] + 0.5 * h * k1u[i];
            k2u[i] = v[i] + 0.5 * h * k1v[i];
        }
        accel(&tmp_u, fm, &mut k2v);

        for i in 0..n {
            tmp_u[i] = u[i] + 0.5 * h * k2u[i];
            k3u[i] = v[i] + 0.5 * h * k2v[i];
        }
        accel(&tmp_u, fm, &mut k3v);

        for i in 0..n {
            tmp_u[i] = u[i] + h * k3u[i];
            k4u[i] = v[i] + h * k3v[i];
        }
        accel(&tmp_u, f1, &mut k4v);

        for i in 0..n {
            u[i] += h / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
            v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        states.push(u.clone());
        velocities.push(v.clone());
    }
    Ok(Trajectory { grid, states, velocities: Some(velocities) })
}

/// `r(t) = (1/l_1) sum_k sin(sqrt|lambda_k| t) / (sqrt|lambda_k| omega_k)` on `grid`.
pub fn response_function(data: &SpectralData, l1: f64, grid: TimeGrid) -> Waveform {
    let freqs = data.frequencies();
    Waveform::sample(grid, |t| {
        let mut acc = 0.0;
        for (s, w) in freqs.iter().zip(data.weights()) {
            acc += (s * t).sin() / (s * w);
        }
        acc / l1
    })
}

/// Causal convolution `(R f)(t) = int_0^t r(t-s) f(s) ds`, trapezoid rule.
pub fn apply_response_operator(r: &Waveform, f: &Waveform) -> Result<Waveform> {
    check_same_grid(&r.grid, &f.grid)?;
    let h = f.grid.dt();
    let (rv, fv) = (r.values(), f.values());
    let mut out = vec![0.0; fv.len()];
    for i in 1..fv.len() {
        let mut acc = 0.5 * (rv[i] * fv[0] + rv[0] * fv[i]);
        for j in 1..i {
            acc += rv[i - j] * fv[j];
        }
        out[i] = h * acc;
    }
    Ok(Waveform { grid: f.grid, values: out })
}

/// Node values `[f(t), u_1(t), .., u_{N-1}(t), 0]` at time index `j`.
fn node_values(traj: &Trajectory, f: &Waveform, j: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(traj.dimension() + 2);
    v.push(f.values()[j]);
    v.extend_from_slice(&traj.states[j]);
    v.push(0.0);
    v
}

/// Piecewise-affine `u^f(x, t_j)` through the boundary value, the mass
/// displacements and the pinned right end.
pub fn continuous_solution(
    spec: &StringSpec,
    traj: &Trajectory,
    f: &Waveform,
    x: f64,
    t_index: usize,
) -> Result<f64> {
    check_same_grid(&traj.grid, &f.grid)?;
    if traj.dimension() != spec.n_masses() {
        return Err(Error::InvalidArgument("trajectory dimension does not match the string".into()));
    }
    if t_index >= traj.grid.len() {
        return Err(Error::OutOfRange(format!("time index {t_index}")));
    }
    let xs = spec.positions();
    let l = xs[xs.len() - 1];
    if !(0.0..=l).contains(&x) {
        return Err(Error::OutOfRange(format!("x = {x} outside [0, {l}]")));
    }
    let vals = node_values(traj, f, t_index);
    let seg = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[seg - 1], xs[seg]);
    let theta = (x - x0) / (x1 - x0);
    Ok(vals[seg - 1] + theta * (vals[seg] - vals[seg - 1]))
}

/// Largest absolute residual of the integral form of the string equation
///
/// `sum_{x_j < x} x_j (x - x_j) m_j u_j(t) = int_0^t (t-s) [x (f(s) + u(x,s)) - 2 int_0^x u(y,s) dy] ds`
///
/// evaluated at every mass position and at the right end `x = l`, on every
/// grid time. Time integrals use the trapezoid rule; the spatial integral of
/// the piecewise-affine interpolant is exact.
pub fn check_integral_equation(spec: &StringSpec, traj: &Trajectory, f: &Waveform) -> Result<f64> {
    check_same_grid(&traj.grid, &f.grid)?;
    if traj.dimension() != spec.n_masses() {
        return Err(Error::InvalidArgument("trajectory dimension does not match the string".into()));
    }
    let grid = traj.grid;
    let h = grid.dt();
    let xs = spec.positions();
    let lengths = spec.lengths();
    let masses = spec.masses();
    let n_nodes = xs.len();

    let mut worst: f64 = 0.0;
    // running trapezoid sums of g and s*g, one per evaluation point
    let mut g0 = vec![0.0; n_nodes];
    let mut g1 = vec![0.0; n_nodes];
    let mut prev_g = vec![0.0; n_nodes];

    for j in 0..grid.len() {
        let t = grid.time(j);
        let vals = node_values(traj, f, j);
        let mut area = 0.0;
        for i in 1..n_nodes {
            area += 0.5 * lengths[i - 1] * (vals[i - 1] + vals[i]);
            let g = xs[i] * (vals[0] + vals[i]) - 2.0 * area;
            if j > 0 {
                let tp = grid.time(j - 1);
                g0[i] += 0.5 * h * (prev_g[i] + g);
                g1[i] += 0.5 * h * (tp * prev_g[i] + t * g);
            }
            prev_g[i] = g;

            let lhs: f64 = (1..i).map(|p| xs[p] * (xs[i] - xs[p]) * masses[p - 1] * vals[p]).sum();
            let rhs = t * g0[i] - g1[i];
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// One-sided unit-mass Gaussian `2/(w sqrt(2 pi)) exp(-t^2 / 2w^2)` approximating `delta(t)` on `t >= 0`.
pub fn half_gaussian_mollifier(width: f64) -> impl Fn(f64) -> f64 {
    let norm = 2.0 / (width * (2.0 * std::f64::consts::PI).sqrt());
    move |t: f64| norm * (-0.5 * (t / width).powi(2)).exp()
}
