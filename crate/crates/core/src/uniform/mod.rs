//! The string of `N - 1` equal masses `1/N` spaced `1/N` apart on `(0, 1)`.
//!
//! Closed forms for its spectrum (Chebyshev polynomials of the second kind)
//! and its dynamics (Bessel functions), plus the pairings used to watch the
//! discrete objects approach the unit-density string as `N` grows.

mod bessel;
mod quadrature;
mod test_function;

use std::f64::consts::PI;

pub use bessel::bessel_j;
pub use quadrature::{composite, gauss_legendre};
pub use test_function::TestFunction;

use crate::error::{Error, Result};
use crate::forward::{solve_forward_spectral_delta, TimeGrid};
use crate::model::{StringSpec, SystemMatrices};
use crate::spectral::{compute_spectral_data, SpectralData};

/// `c` in `|J_2(s)| <= c / sqrt(s)`, `s > 0`.
pub const BESSEL_TAIL_CONSTANT: f64 = 0.9;

pub fn uniform_spec(n: usize) -> Result<StringSpec> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("uniform string needs n >= 2, got {n}")));
    }
    let h = 1.0 / n as f64;
    StringSpec::new(vec![h; n], vec![h; n - 1])
}

/// `U_m(x)` by `U_0 = 1`, `U_1 = 2x`, `U_m = 2x U_{m-1} - U_{m-2}`.
pub fn chebyshev_u(m: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `sum_{k=1}^{N-1} U_i(x_k) U_j(x_k) (1 - x_k^2)` with `x_k = cos(k pi / N)`.
///
/// Equals `N/2` when `i == j` and `0` otherwise, for `i, j <= N - 2`.
pub fn chebyshev_gram(n: usize, i: usize, j: usize) -> f64 {
    (1..n)
        .map(|k| {
            let x = (k as f64 * PI / n as f64).cos();
            chebyshev_u(i, x) * chebyshev_u(j, x) * (1.0 - x * x)
        })
        .sum()
}

/// Spectral data of [`uniform_spec`] in closed form:
/// `lambda_k = -4 N^2 cos^2(k pi / 2N)`, `phi^k_j = U_{j-1}(-cos(k pi / N))`.
pub fn uniform_eigen(n: usize) -> Result<SpectralData> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("uniform string needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let mut eigenvalues = Vec::with_capacity(n - 1);
    let mut vectors = Vec::with_capacity(n - 1);
    let mut weights = Vec::with_capacity(n - 1);
    for k in 1..n {
        let c = (k as f64 * PI / (2.0 * nf)).cos();
        eigenvalues.push(-4.0 * nf * nf * c * c);
        let x = -(k as f64 * PI / nf).cos();
        let phi: Vec<f64> = (0..n - 1).map(|j| chebyshev_u(j, x)).collect();
        weights.push(phi.iter().map(|p| p * p).sum::<f64>() / nf);
        vectors.push(phi);
    }
    SpectralData::from_parts(eigenvalues, vectors, weights)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// `u^delta_j(t) = (2j/t) J_{2j}(2 N t)`.
pub fn delta_solution(n: usize, j: usize, t: f64) -> Result<f64> {
    if n < 2 || j == 0 || j >= n {
        return Err(Error::OutOfRange(format!("mass index {j} for n = {n}")));
    }
    check_time(t)?;
    Ok(2.0 * j as f64 / t * bessel_j(2 * j as u32, 2.0 * n as f64 * t))
}

/// `r_N(t) = (2/t) J_2(2 N t)`.
pub fn response_uniform(n: usize, t: f64) -> Result<f64> {
    delta_solution(n, 1, t)
}

/// `u^delta_j(t)` from the spectral representation on [`uniform_spec`]; the
/// reference for [`delta_solution`].
pub fn delta_solution_spectral(n: usize, j: usize, t: f64) -> Result<f64> {
    if n < 2 || j == 0 || j >= n {
        return Err(Error::OutOfRange(format!("mass index {j} for n = {n}")));
    }
    check_time(t)?;
    let spec = uniform_spec(n)?;
    let mats = SystemMatrices::from_spec(&spec);
    let data = compute_spectral_data(&mats)?;
    let steps = (8.0 * n as f64 * t).ceil() as usize + 1;
    let grid = TimeGrid::new(t, steps)?;
    let traj = solve_forward_spectral_delta(&mats, &data, grid, spec.l1())?;
    Ok(traj.final_state()[j - 1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadControls {
    /// Largest accepted tail bound.
    pub tol: f64,
    /// Cap on the truncation point in the variable `s = 2 N t`.
    pub max_argument: f64,
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
}

impl Default for QuadControls {
    fn default() -> Self {
        Self { tol: 1e-4, max_argument: 1e6, nodes: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing {
    pub value: f64,
    /// Bound on the discarded tail `int_{t_max}^inf r_N xi`.
    pub tail_bound: f64,
    pub t_max: f64,
}

/// `<r_N, xi> = int_0^inf (2/t) J_2(2Nt) xi(t) dt`, computed as
/// `int_0^S (2/s) J_2(s) xi(s / 2N) ds` and truncated where
/// `4 c sup_{s>=S} |xi| / sqrt(S)` drops below `quad.tol`.
pub fn pair_response(n: usize, xi: &TestFunction, quad: QuadControls) -> Result<Pairing> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("uniform string needs n >= 2, got {n}")));
    }
    if !(quad.tol > 0.0) || quad.nodes == 0 {
        return Err(Error::InvalidArgument("quadrature tolerance and node count must be positive".into()));
    }
    let two_n = 2.0 * n as f64;
    let bound = |s: f64| 4.0 * BESSEL_TAIL_CONSTANT * xi.tail_sup(s / two_n) / s.sqrt();
    let mut s_max = 64.0_f64.min(quad.max_argument);
    while bound(s_max) > quad.tol && s_max < quad.max_argument {
        s_max = (2.0 * s_max).min(quad.max_argument);
    }
    let tail_bound = bound(s_max);
    if tail_bound > quad.tol {
        return Err(Error::Truncation { bound: tail_bound, tol: quad.tol });
    }
    let panel = (two_n * xi.scale() / 4.0).min(1.0);
    let panels = (s_max / panel).ceil() as usize;
    let rule = gauss_legendre(quad.nodes);
    let value = composite(|s| 2.0 * bessel_j(2, s) / s * xi.eval(s / two_n), 0.0, s_max, panels, &rule);
    Ok(Pairing { value, tail_bound, t_max: s_max / two_n })
}

/// `N (<u^delta_1, xi> - xi(0))`: the corrected response `(u_1 - u_0) / (1/N)` paired with `xi`.
pub fn pair_corrected_response(n: usize, xi: &TestFunction, quad: QuadControls) -> Result<f64> {
    let p = pair_response(n, xi, quad)?;
    Ok(n as f64 * (p.value - xi.eval(0.0)))
}

/// `u^delta_1(t), .., u^delta_{N-1}(t)` of the pinned uniform string, summed
/// over the closed-form modes:
/// `u_j = N sum_k phi^k_j sin(s_k t) / (omega_k s_k)`, `s_k = sqrt|lambda_k|`.
pub fn uniform_delta_state(n: usize, t: f64) -> Result<Vec<f64>> {
    check_time(t)?;
    let data = uniform_eigen(n)?;
    let mut u = vec![0.0; n - 1];
    for ((phi, w), s) in data.eigenvectors().iter().zip(data.weights()).zip(data.frequencies()) {
        let c = n as f64 * (s * t).sin() / (w * s);
        for (uj, p) in u.iter_mut().zip(phi) {
            *uj += c * p;
        }
    }
    Ok(u)
}

/// `int_0^1 u^delta(x, t) sin(k x) dx` for the piecewise-affine `u^delta(., t)`
/// through `u(0) = 0`, the mass displacements at `x = j/N` and `u(1) = 0`,
/// integrated exactly on each segment.
pub fn pair_solution_with_sine(n: usize, t: f64, k: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("uniform string needs n >= 2, got {n}")));
    }
    check_time(t)?;
    if k == 0 {
        return Err(Error::InvalidArgument("sine mode must be positive".into()));
    }
    let kf = k as f64;
    let h = 1.0 / n as f64;
    let mut nodes = vec![0.0; n + 1];
    nodes[1..n].copy_from_slice(&uniform_delta_state(n, t)?);
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (ua, ub) = (nodes[i], nodes[i + 1]);
        let slope = (ub - ua) / h;
        total += -(ub * (kf * b).cos() - ua * (kf * a).cos()) / kf + slope * ((kf * b).sin() - (kf * a).sin()) / (kf * kf);
    }
    Ok(total)
}

/// Convergence experiments, one per proposition about the uniform string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proposition {
    /// Closed-form `u^delta_j(t)` against the spectral forward solution.
    DeltaSolution = 1,
    /// `<r_N, xi>` against `xi(0)`.
    Response = 2,
    /// Corrected response against `xi'(0)`.
    CorrectedResponse = 3,
    /// `(u^delta(., t), sin k.)` against `sin(k t)`.
    SineProjection = 4,
}

impl Proposition {
    pub fn from_index(i: u32) -> Result<Self> {
        match i {
            1 => Ok(Self::DeltaSolution),
            2 => Ok(Self::Response),
            3 => Ok(Self::CorrectedResponse),
            4 => Ok(Self::SineProjection),
            _ => Err(Error::InvalidArgument(format!("unknown proposition {i}; expected 1..4"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub xi: TestFunction,
    /// Mass index for the delta-solution experiment.
    pub j: usize,
    pub t: f64,
    /// Sine mode for the projection experiment.
    pub k: u32,
    pub quad: QuadControls,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            xi: TestFunction::Gaussian { center: 0.0, width: 0.3 },
            j: 1,
            t: 0.5,
            k: 1,
            quad: QuadControls::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub target: f64,
    pub value: f64,
    pub abs_error: f64,
}

pub fn sweep(prop: Proposition, ns: &[usize], params: &SweepParams) -> Result<Vec<SweepRow>> {
    ns.iter()
        .map(|&n| {
            let (target, value) = match prop {
                Proposition::DeltaSolution => {
                    (delta_solution_spectral(n, params.j, params.t)?, delta_solution(n, params.j, params.t)?)
                }
                Proposition::Response => (params.xi.eval(0.0), pair_response(n, &params.xi, params.quad)?.value),
                Proposition::CorrectedResponse => {
                    (params.xi.derivative(0.0), pair_corrected_response(n, &params.xi, params.quad)?)
                }
                Proposition::SineProjection => {
                    ((params.k as f64 * params.t).sin(), pair_solution_with_sine(n, params.t, params.k)?)
                }
            };
            Ok(SweepRow { n, target, value, abs_error: (value - target).abs() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_shapes() {
        let s = uniform_spec(2).unwrap();
        assert_eq!(s.lengths(), &[0.5, 0.5]);
        assert_eq!(s.masses(), &[0.5]);
        assert!(uniform_spec(1).is_err());
    }

    #[test]
    fn chebyshev_low_orders() {
        for x in [-0.7, 0.0, 0.3, 1.0] {
            assert_eq!(chebyshev_u(0, x), 1.0);
            assert_eq!(chebyshev_u(1, x), 2.0 * x);
            assert!((chebyshev_u(2, x) - (4.0 * x * x - 1.0)).abs() < 1e-15);
        }
        for m in 0..20 {
            assert!((chebyshev_u(m, 1.0) - (m + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn small_spectra() {
        let d = uniform_eigen(2).unwrap();
        assert!((d.eigenvalues()[0] + 8.0).abs() < 1e-12);
        let d = uniform_eigen(3).unwrap();
        assert!((d.eigenvalues()[0] + 27.0).abs() < 1e-12);
        assert!((d.eigenvalues()[1] + 9.0).abs() < 1e-12);
    }

    #[test]
    fn delta_solution_guards() {
        assert!(delta_solution(4, 0, 0.5).is_err());
        assert!(delta_solution(4, 4, 0.5).is_err());
        assert!(delta_solution(4, 1, 0.0).is_err());
        assert!(delta_solution(4, 2, 1e-6).unwrap().abs() < 1e-12);
    }

    #[test]
    fn response_small_time_slope() {
        let n = 10;
        let t = 1e-4;
        let r = response_uniform(n, t).unwrap();
        assert!((r / t - (n * n) as f64).abs() < 1e-3);
    }

    #[test]
    fn sine_projection_of_zero_state_guards() {
        assert!(pair_solution_with_sine(8, 0.5, 0).is_err());
        assert!(pair_solution_with_sine(1, 0.5, 1).is_err());
        assert!(pair_solution_with_sine(8, -0.5, 1).is_err());
    }
}
