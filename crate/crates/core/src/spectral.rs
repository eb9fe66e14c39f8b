//! Spectral data of the string: the pencil `A phi = lambda M phi`.
//!
//! Eigenvectors are normalized by the Cauchy data of the difference equation,
//! `phi_1 = 1`, so the weights `omega_k = (M phi^k, phi^k)` carry the
//! information that the response function needs.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::SystemMatrices;

/// Relative eigenvalue gap below which the spectrum is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Eigenvectors whose first symmetric-coordinate component is smaller than
/// this cannot be rescaled to `phi_1 = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SpectralData {
    /// Assembles spectral data from parts; eigenvalues must be ascending and
    /// negative, each vector must start with 1.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 || eigenvectors.len() != n || weights.len() != n {
            return Err(Error::InvalidArgument("spectral data dimensions disagree".into()));
        }
        if eigenvalues.windows(2).any(|w| w[0] >= w[1]) || eigenvalues.iter().any(|&l| !(l < 0.0)) {
            return Err(Error::InvalidArgument("eigenvalues must be negative and strictly ascending".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(Self { eigenvalues, eigenvectors, weights })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `lambda_1 < .. < lambda_{N-1} < 0`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `phi^k`, each with first component 1.
    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    /// `omega_k = (M phi^k, phi^k)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Modal frequencies `sqrt|lambda_k|`.
    pub fn frequencies(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.abs().sqrt()).collect()
    }

    pub fn max_frequency(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs().sqrt()).fold(0.0, f64::max)
    }
}

/// Runs the Cauchy problem `a_n phi_{n+1} + a_{n-1} phi_{n-1} + b_n phi_n = lambda m_n phi_n`,
/// `phi_0 = 0`, `phi_1 = 1`, returning `phi_1..phi_N`.
///
/// The last entry vanishes exactly when `lambda` is an eigenvalue.
pub fn evaluate_polynomials(mats: &SystemMatrices, lambda: f64) -> Vec<f64> {
    let a = mats.couplings();
    let b = mats.diag();
    let m = mats.masses();
    let n = mats.order();
    let mut phi = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    phi.push(cur);
    for i in 0..n {
        // row i+1 (1-based); the a_0 term multiplies phi_0 = 0
        let back = if i == 0 { 0.0 } else { a[i] * prev };
        let next = ((lambda * m[i] - b[i]) * cur - back) / a[i + 1];
        prev = cur;
        cur = next;
        phi.push(cur);
    }
    phi
}

pub fn compute_spectral_data(mats: &SystemMatrices) -> Result<SpectralData> {
    let n = mats.order();
    let inv_sqrt_m: Vec<f64> = mats.masses().iter().map(|m| 1.0 / m.sqrt()).collect();
    let a = mats.stiffness_dense();
    let sym = DMatrix::from_fn(n, n, |i, j| inv_sqrt_m[i] * a[(i, j)] * inv_sqrt_m[j]);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    for k in 0..n.saturating_sub(1) {
        let (l0, l1) = (eigenvalues[k], eigenvalues[k + 1]);
        let gap = (l1 - l0).abs() / l0.abs().max(l1.abs());
        if gap < DEGENERACY_TOL {
            return Err(Error::DegenerateSpectrum { index: k + 1, gap });
        }
    }

    let mut eigenvectors = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (k, &col) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(col);
        if v[0].abs() < NORMALIZATION_TOL {
            return Err(Error::EigenvectorNormalization { index: k + 1, value: v[0] });
        }
        let scale = 1.0 / (v[0] * inv_sqrt_m[0]);
        let mut phi: Vec<f64> = (0..n).map(|i| v[i] * inv_sqrt_m[i] * scale).collect();
        phi[0] = 1.0;
        weights.push(mats.mass_inner(&phi, &phi));
        eigenvectors.push(phi);
    }

    if let Some(&lmax) = eigenvalues.last() {
        if lmax >= 0.0 {
            return Err(Error::InvalidArgument(format!("stiffness not negative definite: lambda = {lmax}")));
        }
    }
    Ok(SpectralData { eigenvalues, eigenvectors, weights })
}

/// `mu(lambda) = sum_{lambda_k < lambda} 1/omega_k`.
pub fn spectral_function(data: &SpectralData, lambda: f64) -> f64 {
    data.eigenvalues
        .iter()
        .zip(&data.weights)
        .filter(|(&l, _)| l < lambda)
        .map(|(_, w)| 1.0 / w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StringSpec;

    fn mats(lengths: Vec<f64>, masses: Vec<f64>) -> SystemMatrices {
        SystemMatrices::from_spec(&StringSpec::new(lengths, masses).unwrap())
    }

    fn uniform(n: usize) -> SystemMatrices {
        let h = 1.0 / n as f64;
        mats(vec![h; n], vec![h; n - 1])
    }

    #[test]
    fn single_mass_polynomials() {
        let m = mats(vec![0.5, 0.5], vec![1.0]);
        let phi = evaluate_polynomials(&m, -4.0);
        assert_eq!(phi, vec![1.0, 0.0]);
        let phi = evaluate_polynomials(&m, 3.7);
        assert_eq!(phi[0], 1.0);
    }

    #[test]
    fn uniform_three_root() {
        let phi = evaluate_polynomials(&uniform(3), -9.0);
        assert!(phi[2].abs() < 1e-12, "{phi:?}");
    }

    #[test]
    fn single_mass_spectrum() {
        let d = compute_spectral_data(&mats(vec![0.5, 0.5], vec![1.0])).unwrap();
        assert!((d.eigenvalues()[0] + 4.0).abs() < 1e-14);
        assert_eq!(d.eigenvectors()[0], vec![1.0]);
        assert!((d.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_two_spectrum() {
        let d = compute_spectral_data(&uniform(2)).unwrap();
        assert!((d.eigenvalues()[0] + 8.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_weights_closed_form() {
        for n in [3usize, 5, 9, 17] {
            let d = compute_spectral_data(&uniform(n)).unwrap();
            for (k, &w) in d.weights().iter().enumerate() {
                let s = ((k + 1) as f64 * std::f64::consts::PI / n as f64).sin();
                let expected = 1.0 / (2.0 * s * s);
                assert!((w - expected).abs() < 1e-9 * expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn spectral_function_steps() {
        let d = compute_spectral_data(&mats(vec![0.5, 0.5], vec![1.0])).unwrap();
        assert!((spectral_function(&d, 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(spectral_function(&d, -10.0), 0.0);
        assert_eq!(spectral_function(&d, d.eigenvalues()[0]), 0.0);

        // uniform N=3: eigenvalues -27, -9; only -27 lies below -20
        let d = compute_spectral_data(&uniform(3)).unwrap();
        assert!((d.eigenvalues()[0] + 27.0).abs() < 1e-10);
        assert!((d.eigenvalues()[1] + 9.0).abs() < 1e-10);
        assert!((spectral_function(&d, -20.0) - 1.5).abs() < 1e-12);
        assert!((spectral_function(&d, 0.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_eigen_relation() {
        let m = mats(vec![0.2, 0.3, 0.1, 0.4], vec![0.5, 1.0, 0.7]);
        let d = compute_spectral_data(&m).unwrap();
        let mut y = vec![0.0; 3];
        for (k, phi) in d.eigenvectors().iter().enumerate() {
            m.apply_stiffness(phi, &mut y);
            for i in 0..3 {
                let lhs = y[i];
                let rhs = d.eigenvalues()[k] * m.masses()[i] * phi[i];
                assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
            }
            let tail = *evaluate_polynomials(&m, d.eigenvalues()[k]).last().unwrap();
            assert!(tail.abs() < 1e-8, "phi_N = {tail}");
        }
    }

    #[test]
    fn from_parts_rejects_bad_input() {
        assert!(SpectralData::from_parts(vec![-1.0, -2.0], vec![vec![1.0]; 2], vec![1.0; 2]).is_err());
        assert!(SpectralData::from_parts(vec![-2.0, 1.0], vec![vec![1.0]; 2], vec![1.0; 2]).is_err());
        assert!(SpectralData::from_parts(vec![-2.0, -1.0], vec![vec![1.0]; 2], vec![1.0, 0.0]).is_err());
        assert!(SpectralData::from_parts(vec![-2.0, -1.0], vec![vec![1.0]; 2], vec![1.0, 2.0]).is_ok());
    }
}
