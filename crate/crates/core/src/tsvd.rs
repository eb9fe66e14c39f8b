//! Truncated eigendecomposition of a dense symmetric matrix by randomized
//! subspace iteration.
//!
//! The connecting operator of an `N`-string has numerical rank `N - 1` on a
//! grid of thousands of nodes, so only a thin leading subspace is needed. The
//! sketch width doubles until the retained spectrum is separated from the
//! sketch edge by the oversampling margin, or the sketch covers the whole space.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy)]
pub struct SketchOptions {
    pub initial_width: usize,
    pub oversample: usize,
    pub power_iterations: usize,
    pub seed: u64,
}

impl Default for SketchOptions {
    fn default() -> Self {
        Self { initial_width: 24, oversample: 8, power_iterations: 2, seed: 0x5eed_c0de }
    }
}

/// Leading eigenpairs, ordered by decreasing `|value|`.
#[derive(Debug, Clone)]
pub struct TruncatedEigen {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl TruncatedEigen {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Singular values `|value|`, decreasing.
    pub fn singular_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.abs()).collect()
    }

    pub fn sigma_max(&self) -> f64 {
        self.values.first().map_or(0.0, |v| v.abs())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn orthonormalize(y: DMatrix<f64>) -> DMatrix<f64> {
    y.qr().q()
}

/// Resolves every eigenvalue with `|value| >= rel_floor * sigma_max` of the
/// symmetric matrix `a`.
pub fn truncated_eigen(a: &DMatrix<f64>, rel_floor: f64, opts: SketchOptions) -> TruncatedEigen {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut width = opts.initial_width.max(1).min(n);
    loop {
        let omega = DMatrix::from_fn(n, width, |_, _| StandardNormal.sample(&mut rng));
        let mut q = orthonormalize(a * omega);
        for _ in 0..opts.power_iterations {
            q = orthonormalize(a * &q);
        }
        let aq = a * &q;
        let mut b = q.transpose() * aq;
        // symmetrize against rounding
        for i in 0..width {
            for j in 0..i {
                let m = 0.5 * (b[(i, j)] + b[(j, i)]);
                b[(i, j)] = m;
                b[(j, i)] = m;
            }
        }
        let eig = SymmetricEigen::new(b);
        let mut order: Vec<usize> = (0..width).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].abs().total_cmp(&eig.eigenvalues[i].abs()));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let sigma_max = values.first().map_or(0.0, |v| v.abs());
        let retained = values.iter().filter(|v| v.abs() >= rel_floor * sigma_max).count();

        if retained + opts.oversample <= width || width == n {
            let mut u = DMatrix::zeros(width, width);
            for (c, &i) in order.iter().enumerate() {
                u.set_column(c, &eig.eigenvectors.column(i));
            }
            return TruncatedEigen { values, vectors: q * u };
        }
        width = (2 * width).min(n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_rank_recovered() {
        let n = 300;
        let mut a = DMatrix::zeros(n, n);
        let spectrum = [5.0, -2.0, 1e-3, 1e-6];
        for (k, &lam) in spectrum.iter().enumerate() {
            let v = DMatrix::from_fn(n, 1, |i, _| ((k + 1) as f64 * (i as f64 + 0.5) * std::f64::consts::PI / n as f64).cos());
            let v = &v / v.norm();
            a += lam * &v * v.transpose();
        }
        let te = truncated_eigen(&a, 1e-10, SketchOptions::default());
        let sv = te.singular_values();
        for (got, want) in sv.iter().zip([5.0, 2.0, 1e-3, 1e-6]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(sv[4] < 1e-13);
        assert!(te.values()[1] < 0.0);
    }

    #[test]
    fn full_rank_grows_to_whole_space() {
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 + i as f64 } else { 0.0 });
        let te = truncated_eigen(&a, 1e-8, SketchOptions { initial_width: 4, ..Default::default() });
        assert_eq!(te.len(), n);
        assert!((te.sigma_max() - 40.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let n = 100;
        let a = DMatrix::from_fn(n, n, |i, j| ((i as f64) * 0.1).sin() * ((j as f64) * 0.1).sin());
        let x = truncated_eigen(&a, 1e-8, SketchOptions::default());
        let y = truncated_eigen(&a, 1e-8, SketchOptions::default());
        assert_eq!(x.values(), y.values());
        assert_eq!(x.vectors(), y.vectors());
    }
}
