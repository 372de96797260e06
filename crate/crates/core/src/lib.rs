//! Pseudo-spectral laboratory for ground-state dispersion-managed solitons
//! of `omega f = Q(f,f,f)` at zero average dispersion, together with
//! numerical checks of the estimates that control them: the two-sided bound
//! on the ground-state constant, Strichartz and bilinear estimates,
//! quasi-locality of the averaged functional and the tail bootstrap.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bilinear;
pub mod bounds;
pub mod error;
mod fft;
pub mod functionals;
pub mod grid;
pub mod propagator;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod snapshot;
pub mod solver;
pub mod suite;
pub mod tails;

pub use error::{Error, Result};
pub use grid::{Field, Grid, Space};
pub use num_complex::Complex64;
pub use quadrature::QuadratureRule;
