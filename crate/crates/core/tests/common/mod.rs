#![allow(dead_code)]

use krein_string::forward::{TimeGrid, Waveform};
use krein_string::uniform::bessel_j;
use krein_string::StringSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// String with `segments` lengths and `segments - 1` masses drawn from `[lo, hi]`.
pub fn random_spec(rng: &mut ChaCha8Rng, segments: usize, lo: f64, hi: f64) -> StringSpec {
    let lengths = (0..segments).map(|_| rng.random_range(lo..=hi)).collect();
    let masses = (0..segments - 1).map(|_| rng.random_range(lo..=hi)).collect();
    StringSpec::new(lengths, masses).unwrap()
}

/// Random combination of low sines and a bump, vanishing at t = 0.
pub fn smooth_control(rng: &mut ChaCha8Rng, grid: TimeGrid) -> Waveform {
    let terms: Vec<(f64, f64)> = (0..3).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.5..3.0))).collect();
    let (c, w) = (rng.random_range(0.2..0.8) * grid.horizon(), rng.random_range(0.1..0.3));
    Waveform::sample(grid, |t| {
        let s: f64 = terms.iter().map(|(a, f)| a * (f * t).sin()).sum();
        s + (-((t - c) / w).powi(2)).exp() - (-(c / w).powi(2)).exp()
    })
}

/// Shooting for the fixed-fixed string: `u_0 = 0`, `u_1 = l_1`, then
/// `(u_{j+1} - u_j)/l_{j+1} = (u_j - u_{j-1})/l_j + lambda m_j u_j`. Returns `u_N`.
pub fn shoot(spec: &StringSpec, lambda: f64) -> f64 {
    let (l, m) = (spec.lengths(), spec.masses());
    let (mut prev, mut cur) = (0.0, l[0]);
    for j in 0..m.len() {
        let slope = (cur - prev) / l[j] + lambda * m[j] * cur;
        prev = cur;
        cur += l[j + 1] * slope;
    }
    cur
}

/// Eigenvalues by sign changes of the shooting residual on a fine scan of
/// `[-B, 0]`, refined by bisection.
pub fn bisection_eigenvalues(spec: &StringSpec) -> Vec<f64> {
    let (l, m) = (spec.lengths(), spec.masses());
    let bound = (0..m.len()).map(|j| 2.0 / m[j] * (1.0 / l[j] + 1.0 / l[j + 1])).fold(0.0, f64::max) * 1.01;
    let scan = 200_000;
    let mut roots = Vec::new();
    let mut a = -bound;
    let mut fa = shoot(spec, a);
    for i in 1..=scan {
        let b = -bound + bound * i as f64 / scan as f64;
        let fb = shoot(spec, b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = shoot(spec, mid);
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// `(2j/t) J_{2j}(2Nt)` continued oddly in `j`.
fn free_chain(n: usize, j: i64, t: f64) -> f64 {
    let v = 2.0 * j.unsigned_abs() as f64 / t * bessel_j(2 * j.unsigned_abs() as u32, 2.0 * n as f64 * t);
    if j < 0 { -v } else { v }
}

/// `u^delta_j(t)` on the uniform chain pinned at both ends, by reflecting the
/// free solution across `j = N`: `sum_m [g(2mN + j) - g(2mN - j)]`.
pub fn pinned_chain_images(n: usize, j: usize, t: f64) -> f64 {
    let (n_i, j_i) = (n as i64, j as i64);
    let mut total = free_chain(n, j_i, t);
    for m in 1..200 {
        let a = free_chain(n, 2 * m * n_i + j_i, t);
        let b = free_chain(n, 2 * m * n_i - j_i, t);
        total += a - b;
        if a == 0.0 && b == 0.0 {
            break;
        }
    }
    total
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}
