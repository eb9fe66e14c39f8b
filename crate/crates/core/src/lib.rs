//! Forward and inverse dynamic problems for finite Krein-Stieltjes strings.
//!
//! A string of point masses joined by massless segments is driven from its
//! left end by a boundary control `f(t)`. This crate
//!
//! * builds the mass-spring system and its spectral data ([`model`], [`spectral`]),
//! * solves the forward problem and computes the response function ([`forward`]),
//! * rebuilds masses and lengths from the response function by solving the
//!   Krein equation for the connecting operator ([`inverse`]),
//! * evaluates the closed forms for the uniform string and the convergence
//!   experiments towards the unit-density string ([`uniform`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod csv;
pub mod error;
pub mod forward;
pub mod inverse;
pub mod model;
pub mod spectral;
pub mod tsvd;
pub mod uniform;

pub use error::{Error, ErrorKind, Result};
pub use forward::{TimeGrid, Trajectory, Waveform};
pub use inverse::{DiscretizedConnector, RecoveryResult, Regularization};

pub use model::{StringSpec, SystemMatrices};
pub use spectral::SpectralData;
