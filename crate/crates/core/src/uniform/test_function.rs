//! Test functions for distributional pairings, selected by descriptor string.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Smooth test function `xi`.
///
/// Descriptors: `gauss:c,w`, `rcos:c,w`, `sine:k`, `const:v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `exp(-(t - c)^2 / (2 w^2))`.
    Gaussian { center: f64, width: f64 },
    /// `(1 + cos(pi (t - c) / w)) / 2` on `|t - c| < w`, zero elsewhere.
    RaisedCosine { center: f64, width: f64 },
    /// `sin(k t)`.
    Sine { k: f64 },
    Constant { value: f64 },
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Gaussian { center, width } => {
                let z = (t - center) / width;
                (-0.5 * z * z).exp()
            }
            Self::RaisedCosine { center, width } => {
                let z = (t - center) / width;
                if z.abs() < 1.0 { 0.5 * (1.0 + (PI * z).cos()) } else { 0.0 }
            }
            Self::Sine { k } => (k * t).sin(),
            Self::Constant { value } => value,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Self::Gaussian { center, width } => -(t - center) / (width * width) * self.eval(t),
            Self::RaisedCosine { center, width } => {
                let z = (t - center) / width;
                if z.abs() < 1.0 { -0.5 * PI / width * (PI * z).sin() } else { 0.0 }
            }
            Self::Sine { k } => k * (k * t).cos(),
            Self::Constant { .. } => 0.0,
        }
    }

    /// `sup_{s >= t} |xi(s)|`.
    pub fn tail_sup(&self, t: f64) -> f64 {
        match *self {
            Self::Gaussian { center, .. } => {
                if t <= center { 1.0 } else { self.eval(t) }
            }
            Self::RaisedCosine { center, width } => {
                if t <= center {
                    1.0
                } else if t >= center + width {
                    0.0
                } else {
                    self.eval(t)
                }
            }
            Self::Sine { k } => if k == 0.0 { 0.0 } else { 1.0 },
            Self::Constant { value } => value.abs(),
        }
    }

    /// Length over which the function changes appreciably.
    pub fn scale(&self) -> f64 {
        match *self {
            Self::Gaussian { width, .. } | Self::RaisedCosine { width, .. } => width,
            Self::Sine { k } => if k == 0.0 { f64::INFINITY } else { 1.0 / k.abs() },
            Self::Constant { .. } => f64::INFINITY,
        }
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Gaussian { center, width } => write!(f, "gauss:{center},{width}"),
            Self::RaisedCosine { center, width } => write!(f, "rcos:{center},{width}"),
            Self::Sine { k } => write!(f, "sine:{k}"),
            Self::Constant { value } => write!(f, "const:{value}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidArgument(format!("test function `{s}`: {msg}"));
        let (kind, args) = s.trim().split_once(':').ok_or_else(|| bad("expected kind:args"))?;
        let nums = args
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| bad("unparsable number")))
            .collect::<Result<Vec<_>>>()?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite parameter"));
        }
        let pair = |nums: &[f64]| -> Result<(f64, f64)> {
            match nums {
                [c, w] if *w > 0.0 => Ok((*c, *w)),
                [_, _] => Err(bad("width must be positive")),
                _ => Err(bad("expected two parameters")),
            }
        };
        match kind {
            "gauss" => pair(&nums).map(|(center, width)| Self::Gaussian { center, width }),
            "rcos" => pair(&nums).map(|(center, width)| Self::RaisedCosine { center, width }),
            "sine" => match nums[..] {
                [k] => Ok(Self::Sine { k }),
                _ => Err(bad("expected one parameter")),
            },
            "const" => match nums[..] {
                [value] => Ok(Self::Constant { value }),
                _ => Err(bad("expected one parameter")),
            },
            _ => Err(bad("unknown kind")),
        }
    }
}
