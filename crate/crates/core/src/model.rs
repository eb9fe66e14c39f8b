//! String specifications and the matrices of the equivalent mass-spring system.
//!
//! A finite Krein-Stieltjes string on `(0, l)` carries `N - 1` point masses
//! `m_1..m_{N-1}` at interior positions `x_1 < .. < x_{N-1}`, separated by
//! massless segments of lengths `l_1..l_N`. With the mass values at the nodes
//! `u_i(t) = u(x_i, t)` the wave problem becomes `M u'' = A u + f e_1 / l_1`
//! where `A` is tridiagonal and negative definite.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::csv::fmt_real;
use crate::error::{Error, Result};

/// Lengths and masses at or below this value are rejected.
pub const MIN_POSITIVE_VALUE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StringSpec {
    lengths: Vec<f64>,
    masses: Vec<f64>,
}

impl StringSpec {
    /// Validates and builds a string from `N` segment lengths and `N - 1` masses.
    pub fn new(lengths: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        for (i, &l) in lengths.iter().enumerate() {
            if !l.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite length l_{}", i + 1)));
            }
            if l <= MIN_POSITIVE_VALUE {
                return Err(Error::NonPositiveLength { index: i + 1, value: l });
            }
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite mass m_{}", i + 1)));
            }
            if m <= MIN_POSITIVE_VALUE {
                return Err(Error::NonPositiveMass { index: i + 1, value: m });
            }
        }
        if lengths.len() != masses.len() + 1 {
            return Err(Error::CountMismatch { lengths: lengths.len(), masses: masses.len() });
        }
        if masses.is_empty() {
            return Err(Error::NoMasses);
        }
        let total: f64 = lengths.iter().sum();
        if !total.is_finite() {
            return Err(Error::InvalidArgument("total length overflows".into()));
        }
        Ok(Self { lengths, masses })
    }

    /// Number of point masses, `N - 1`.
    pub fn n_masses(&self) -> usize {
        self.masses.len()
    }

    /// Number of segments, `N`.
    pub fn n_segments(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Length of the first segment, the coupling of the boundary control.
    pub fn l1(&self) -> f64 {
        self.lengths[0]
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Node positions `x_0 = 0, .., x_N = l`.
    pub fn positions(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.lengths.len() + 1);
        let mut acc = 0.0;
        x.push(acc);
        for &l in &self.lengths {
            acc += l;
            x.push(acc);
        }
        x
    }

    /// Parses the `key=value` text format.
    ///
    /// ```text
    /// # comment
    /// lengths=0.25,0.25,0.25,0.25
    /// masses=0.3,0.5,0.2
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen: HashMap<&str, (usize, Vec<f64>)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "expected key=value".into(),
            })?;
            let key = key.trim();
            if key != "lengths" && key != "masses" {
                return Err(Error::Parse { line: line_no, msg: format!("unknown key '{key}'") });
            }
            if let Some((first, _)) = seen.get(key) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate key '{key}' (first on line {first})"),
                });
            }
            let values = parse_reals(value).map_err(|msg| Error::Parse { line: line_no, msg })?;
            seen.insert(key, (line_no, values));
        }
        let take = |seen: &mut HashMap<&str, (usize, Vec<f64>)>, key: &str| {
            seen.remove(key).map(|(_, v)| v).ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("missing key '{key}'"),
            })
        };
        let lengths = take(&mut seen, "lengths")?;
        let masses = take(&mut seen, "masses")?;
        Self::new(lengths, masses)
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "lengths={}", join(&self.lengths));
        let _ = writeln!(out, "masses={}", join(&self.masses));
        out
    }
}

/// Comma-separated reals; the error is a bare message so callers can attach context.
pub(crate) fn parse_reals(s: &str) -> std::result::Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty value list".into());
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>().map_err(|_| format!("invalid real '{tok}'"))
        })
        .collect()
}

/// Stiffness `A` (symmetric tridiagonal) and mass `M` (diagonal) of order `N - 1`.
///
/// The couplings are stored as `a_0..a_{N-1}` with `a_i = 1/l_{i+1}`; only
/// `a_1..a_{N-2}` appear in `A`, the outer two tie the end masses to the
/// boundary and close the polynomial recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    couplings: Vec<f64>,
    /// Diagonal `b_1..b_{N-1}`.
    diag: Vec<f64>,
    masses: Vec<f64>,
}

impl SystemMatrices {
    pub fn from_spec(spec: &StringSpec) -> Self {
        let l = spec.lengths();
        let n = spec.n_masses();
        let diag = (0..n).map(|i| -(l[i] + l[i + 1]) / (l[i] * l[i + 1])).collect();
        let couplings = l.iter().map(|&li| 1.0 / li).collect();
        Self { couplings, diag, masses: spec.masses().to_vec() }
    }

    /// Builds matrices from couplings `a_0..a_{N-1}`, diagonal and masses.
    pub fn from_parts(couplings: Vec<f64>, diag: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || masses.len() != diag.len() || couplings.len() != diag.len() + 1 {
            return Err(Error::InvalidArgument("inconsistent matrix dimensions".into()));
        }
        Ok(Self { couplings, diag, masses })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Off-diagonal of `A`, `a_1..a_{N-2}`.
    pub fn off_diag(&self) -> &[f64] {
        &self.couplings[1..self.couplings.len() - 1]
    }

    /// All couplings `a_0..a_{N-1}`.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn stiffness_dense(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
            if i + 1 < n {
                a[(i, i + 1)] = self.couplings[i + 1];
                a[(i + 1, i)] = self.couplings[i + 1];
            }
        }
        a
    }

    pub fn mass_dense(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.masses))
    }

    /// `y = A x`.
    pub fn apply_stiffness(&self, x: &[f64], y: &mut [f64]) {
        let n = self.order();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.couplings[i] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.couplings[i + 1] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// Gershgorin bound on `|lambda|` for the pencil `A - lambda M`.
    pub fn frequency_bound_sq(&self) -> f64 {
        let n = self.order();
        (0..n)
            .map(|i| {
                let mut row = self.diag[i].abs();
                if i > 0 {
                    row += self.couplings[i].abs();
                }
                if i + 1 < n {
                    row += self.couplings[i + 1].abs();
                }
                row / self.masses[i]
            })
            .fold(0.0, f64::max)
    }

    /// `(M x, y)`, the inner product of the state space.
    pub fn mass_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.masses.iter().zip(x).zip(y).map(|((m, a), b)| m * a * b).sum()
    }
}
