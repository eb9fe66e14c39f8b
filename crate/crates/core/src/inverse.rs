//! Reconstruction of the string from its response function.
//!
//! The connecting operator `C^T = (W^T)^* W^T` is assembled from `r` on
//! `[0, 2T]` alone. Solving `C^T f_1 = r(T - .)` gives the control that steers
//! the system to the first special state `e_1 / m_1`; the three-term relation
//! `m_k (C^T f_k)'' = a_{k-1} C^T f_{k-1} + b_k C^T f_k + a_k C^T f_{k+1}`
//! then produces the remaining controls one mass at a time, and the masses and
//! couplings fall out of inner products of those controls.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::forward::{solve_forward_spectral, TimeGrid, Waveform};
use crate::model::{StringSpec, SystemMatrices};
use crate::spectral::SpectralData;
use crate::tsvd::{truncated_eigen, SketchOptions, TruncatedEigen};

/// `|a_k|` below this aborts the recursion.
pub const COUPLING_GUARD: f64 = 1e-10;

/// Truncation and acceptance parameters for the Krein solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    /// Singular values below `threshold * sigma_max` are discarded.
    pub threshold: f64,
    /// Largest accepted relative residual of a Krein solve.
    pub max_residual: f64,
}

impl Regularization {
    /// For exact synthetic data.
    pub const EXACT: Self = Self { threshold: 1e-8, max_residual: 1e-2 };
    /// For response functions with additive noise.
    pub const NOISY: Self = Self { threshold: 1e-4, max_residual: 0.5 };
}

impl Default for Regularization {
    fn default() -> Self {
        Self::EXACT
    }
}

/// `C^T` sampled on the grid nodes, with trapezoid weights for `int_0^T`.
#[derive(Debug, Clone)]
pub struct DiscretizedConnector {
    grid: TimeGrid,
    kernel: DMatrix<f64>,
    quad_weights: Vec<f64>,
}

/// Builds `c(t, s) = 1/(2 l_1) int_{|t-s|}^{2T-t-s} r(tau) dtau` from `r` sampled on `[0, 2T]`.
///
/// `r` must share the spacing of `grid` and extend at least to `2T`.
pub fn build_connector(r: &Waveform, l1: f64, grid: TimeGrid) -> Result<DiscretizedConnector> {
    if !(l1 > 0.0 && l1.is_finite()) {
        return Err(Error::InvalidArgument(format!("l1 must be positive, got {l1}")));
    }
    let rg = r.grid();
    let h = grid.dt();
    if (rg.dt() - h).abs() > 1e-9 * h {
        return Err(Error::GridMismatch(format!("response spacing {} vs grid spacing {}", rg.dt(), h)));
    }
    let n = grid.n_steps();
    if rg.n_steps() < 2 * n {
        return Err(Error::ResponseTooShort { available: rg.horizon(), required: 2.0 * grid.horizon() });
    }
    let rv = r.values();
    let scale = 0.5 / l1;
    let mut cumulative = vec![0.0; 2 * n + 1];
    for m in 1..=2 * n {
        cumulative[m] = cumulative[m - 1] + 0.5 * h * (rv[m - 1] + rv[m]);
    }
    let kernel = DMatrix::from_fn(n + 1, n + 1, |i, j| {
        let upper = cumulative[2 * n - i - j];
        let lower = cumulative[i.abs_diff(j)];
        scale * (upper - lower)
    });
    Ok(DiscretizedConnector { grid, kernel, quad_weights: grid.trapezoid_weights() })
}

impl DiscretizedConnector {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// `(C f)(t_i) = sum_j c(t_i, t_j) w_j f(t_j)`.
    pub fn apply(&self, f: &Waveform) -> Result<Waveform> {
        if f.grid() != self.grid {
            return Err(Error::GridMismatch("control not on connector grid".into()));
        }
        let wf: Vec<f64> = f.values().iter().zip(&self.quad_weights).map(|(a, w)| a * w).collect();
        let out = &self.kernel * nalgebra::DVector::from_vec(wf);
        Waveform::new(self.grid, out.as_slice().to_vec())
    }

    /// `(C f, g)` in the trapezoid inner product.
    pub fn bilinear(&self, f: &Waveform, g: &Waveform) -> Result<f64> {
        self.apply(f)?.inner(g)
    }

    /// `W^{1/2} K W^{1/2}`, symmetric, same spectrum as the weighted operator.
    pub fn weighted_kernel(&self) -> DMatrix<f64> {
        let sw: Vec<f64> = self.quad_weights.iter().map(|w| w.sqrt()).collect();
        DMatrix::from_fn(self.kernel.nrows(), self.kernel.ncols(), |i, j| sw[i] * self.kernel[(i, j)] * sw[j])
    }

    pub fn factorize(&self, reg: Regularization) -> Result<KreinSolver> {
        let weighted = self.weighted_kernel();
        let eig = truncated_eigen(&weighted, reg.threshold * 1e-2, SketchOptions::default());
        let sv = eig.singular_values();
        if eig.sigma_max() == 0.0 {
            return Err(Error::RankZero);
        }
        let rank = detect_rank(&sv, reg.threshold);
        if rank == 0 {
            return Err(Error::RankZero);
        }
        Ok(KreinSolver {
            grid: self.grid,
            sqrt_w: self.quad_weights.iter().map(|w| w.sqrt()).collect(),
            weighted,
            eig,
            rank,
            reg,
        })
    }
}

/// Count of singular values at or above `threshold * sigma_max`.
///
/// When the cut falls inside a near-continuum (neighbours within a decade of
/// the threshold), the largest relative gap within two decades of the
/// threshold decides instead.
pub fn detect_rank(sv: &[f64], threshold: f64) -> usize {
    let Some(&smax) = sv.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    let cut = threshold * smax;
    let base = sv.iter().take_while(|&&s| s >= cut).count();
    if base == 0 || base == sv.len() {
        return base;
    }
    let ambiguous = sv[base - 1] < 10.0 * cut || sv[base] > 0.1 * cut;
    if !ambiguous {
        return base;
    }
    let (lo, hi) = (1e-2 * cut, 1e2 * cut);
    let mut best = (base, sv[base - 1] / sv[base].max(f64::MIN_POSITIVE));
    for i in 1..sv.len() {
        if sv[i - 1] <= hi && sv[i - 1] >= lo {
            let ratio = sv[i - 1] / sv[i].max(f64::MIN_POSITIVE);
            if ratio > best.1 {
                best = (i, ratio);
            }
        }
    }
    best.0
}

/// Truncated pseudo-inverse of the weighted connector.
#[derive(Debug, Clone)]
pub struct KreinSolver {
    grid: TimeGrid,
    sqrt_w: Vec<f64>,
    weighted: DMatrix<f64>,
    eig: TruncatedEigen,
    rank: usize,
    reg: Regularization,
}

/// Solution of one Krein solve with its diagnostics.
#[derive(Debug, Clone)]
pub struct KreinSolution {
    pub control: Waveform,
    /// `|| C f - rhs || / || rhs ||` in the weighted norm.
    pub residual: f64,
    /// `sigma_max ||f|| / ||rhs||`: amplification relative to the best-conditioned direction.
    pub amplification: f64,
}

impl KreinSolver {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.eig.singular_values()
    }

    /// `sigma_max / sigma_rank`.
    pub fn condition_number(&self) -> f64 {
        let sv = self.eig.singular_values();
        sv[0] / sv[self.rank - 1]
    }

    pub fn solve(&self, rhs: &Waveform) -> Result<KreinSolution> {
        if rhs.grid() != self.grid {
            return Err(Error::GridMismatch("right-hand side not on connector grid".into()));
        }
        let b: Vec<f64> = rhs.values().iter().zip(&self.sqrt_w).map(|(y, s)| y * s).collect();
        let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if b_norm == 0.0 {
            return Ok(KreinSolution { control: Waveform::zeros(self.grid), residual: 0.0, amplification: 0.0 });
        }
        let v = self.eig.vectors();
        let n = b.len();
        let mut g = vec![0.0; n];
        for k in 0..self.rank {
            let col = v.column(k);
            let coeff = col.iter().zip(&b).map(|(a, c)| a * c).sum::<f64>() / self.eig.values()[k];
            for (gi, vi) in g.iter_mut().zip(col.iter()) {
                *gi += coeff * vi;
            }
        }
        let kg = &self.weighted * nalgebra::DVector::from_column_slice(&g);
        let res = kg.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() / b_norm;
        if !(res <= self.reg.max_residual) {
            return Err(Error::Residual { residual: res, limit: self.reg.max_residual });
        }
        let g_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let control: Vec<f64> = g.iter().zip(&self.sqrt_w).map(|(x, s)| x / s).collect();
        Ok(KreinSolution {
            control: Waveform::new(self.grid, control)?,
            residual: res,
            amplification: self.eig.sigma_max() * g_norm / b_norm,
        })
    }
}

/// Minimum-norm truncated solution of `C f = rhs`.
pub fn solve_krein(c: &DiscretizedConnector, rhs: &Waveform, reg: Regularization) -> Result<Waveform> {
    let rhs_zero = rhs.values().iter().all(|&v| v == 0.0);
    if rhs_zero && rhs.grid() == c.grid() {
        return Ok(Waveform::zeros(c.grid()));
    }
    Ok(c.factorize(reg)?.solve(rhs)?.control)
}

/// Second derivative by centred differences, with second-order one-sided
/// stencils at both ends.
pub fn second_derivative(w: &Waveform) -> Result<Waveform> {
    let v = w.values();
    let n = v.len();
    if n < 5 {
        return Err(Error::TooFewNodes { required: 5, got: n });
    }
    let h2 = w.grid().dt().powi(2);
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / h2;
    }
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    Waveform::new(w.grid(), out)
}

#[derive(Debug, Clone, Default)]
pub struct RecoveryDiagnostics {
    /// Relative residual of each Krein solve.
    pub residuals: Vec<f64>,
    /// Amplification of each Krein solve.
    pub conditions: Vec<f64>,
    /// Computed leading singular values of the weighted connector.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `-||f_1||^2 / f_1'(T)`, an estimate of `l_1` from the first control.
    pub l1_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub masses: Vec<f64>,
    /// `a_1..a_{N-1}`.
    pub a: Vec<f64>,
    /// `b_1..b_{N-1}`.
    pub b: Vec<f64>,
    /// `l_1..l_N`, with `l_1` taken from the input.
    pub lengths: Vec<f64>,
    /// `f_1^T..f_{N-1}^T`.
    pub controls: Vec<Waveform>,
    pub diagnostics: RecoveryDiagnostics,
}

impl RecoveryResult {
    pub fn to_spec(&self) -> Result<StringSpec> {
        StringSpec::new(self.lengths.clone(), self.masses.clone())
    }
}

/// Recovers masses and lengths from `r` sampled on `[0, 2T]` and the first
/// segment length `l_1`.
pub fn recover_string(r: &Waveform, l1: f64, grid: TimeGrid, reg: Regularization) -> Result<RecoveryResult> {
    let connector = build_connector(r, l1, grid)?;
    if grid.len() < 5 {
        return Err(Error::TooFewNodes { required: 5, got: grid.len() });
    }
    let solver = connector.factorize(reg)?;
    let rank = solver.rank();
    let n = grid.n_steps();

    let mut diagnostics = RecoveryDiagnostics {
        singular_values: solver.singular_values(),
        rank,
        ..Default::default()
    };

    let rhs1 = Waveform::new(grid, (0..=n).map(|i| r.values()[n - i]).collect())?;
    let rhs_norm = rhs1.inner(&rhs1)?.sqrt();
    let first = solver.solve(&rhs1)?;
    diagnostics.residuals.push(first.residual);
    diagnostics.conditions.push(first.amplification);

    let mut masses = Vec::with_capacity(rank);
    let mut a = Vec::with_capacity(rank);
    let mut b = Vec::with_capacity(rank);
    let mut lengths = vec![l1];
    let mut controls = vec![first.control];
    let mut prev_image: Option<Waveform> = None;
    let mut a_prev = 1.0 / l1;

    for k in 1..=rank {
        let f_k = &controls[k - 1];
        let image = connector.apply(f_k)?;
        let q = image.inner(f_k)?;
        let m_k = 1.0 / q;
        if !(m_k > 0.0 && m_k.is_finite()) {
            return Err(Error::NegativeMass { step: k, value: m_k });
        }
        let d2 = second_derivative(&image)?;
        let b_k = m_k * m_k * d2.inner(f_k)?;
        let a_k = -b_k - a_prev;
        if !(a_k >= COUPLING_GUARD) {
            return Err(Error::SmallCoupling { step: k, value: a_k });
        }
        masses.push(m_k);
        b.push(b_k);
        a.push(a_k);
        lengths.push(1.0 / a_k);

        if k < rank {
            // the a_0 term is absent in the first equation
            let back = if k == 1 { 0.0 } else { a_prev };
            let prev_vals = prev_image.as_ref().map(|w| w.values());
            let next: Vec<f64> = (0..=n)
                .map(|i| {
                    let p = prev_vals.map_or(0.0, |v| v[i]);
                    (m_k * d2.values()[i] - back * p - b_k * image.values()[i]) / a_k
                })
                .collect();
            let next = Waveform::new(grid, next)?;
            if next.inner(&next)?.sqrt() < 1e-12 * rhs_norm {
                return Err(Error::RankInconsistent { step: k, rank });
            }
            let sol = solver.solve(&next)?;
            diagnostics.residuals.push(sol.residual);
            diagnostics.conditions.push(sol.amplification);
            controls.push(sol.control);
        }
        prev_image = Some(image);
        a_prev = a_k;
    }

    let f1 = controls[0].values();
    let h = grid.dt();
    let slope = (3.0 * f1[n] - 4.0 * f1[n - 1] + f1[n - 2]) / (2.0 * h);
    diagnostics.l1_estimate = -controls[0].inner(&controls[0])? / slope;

    Ok(RecoveryResult { masses, a, b, lengths, controls, diagnostics })
}

/// `max_i |(M u^f(T))_i - delta_ik|`: how far `control` lands from the `k`-th
/// special state `d_k = e_k / m_k` (1-based `k`), measured after scaling by `M`.
pub fn special_state_defect(
    mats: &SystemMatrices,
    data: &SpectralData,
    control: &Waveform,
    k: usize,
    l1: f64,
) -> Result<f64> {
    if k == 0 || k > mats.order() {
        return Err(Error::OutOfRange(format!("special state {k}")));
    }
    let traj = solve_forward_spectral(mats, data, control, l1)?;
    Ok(mats
        .masses()
        .iter()
        .zip(traj.final_state())
        .enumerate()
        .map(|(i, (m, u))| (m * u - if i + 1 == k { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max))
}

/// Adds independent `N(0, sigma^2)` noise to every sample.
pub fn with_additive_noise(w: &Waveform, sigma: f64, seed: u64) -> Result<Waveform> {
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(format!("noise level: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = w.values().iter().map(|v| v + normal.sample(&mut rng)).collect();
    Waveform::new(w.grid(), values)
}
