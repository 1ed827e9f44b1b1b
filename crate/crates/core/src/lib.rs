//! Spectral solver for the linear 1D thermoelasticity system with a single
//! pure constant delay.
//!
//! The displacement/temperature problem is rewritten as a first-order system
//! `∂t V + B V(t − τ) = F` for `V = (∂t u, ∂x u, θ)`, expanded in a
//! trigonometric basis, and every 3×3 modal delay equation is solved in closed
//! form through the delayed matrix exponential. The classical (`τ = 0`)
//! problem is solved alongside so the `O(τ)` approach can be measured.
//!
//! Module map:
//!
//! - [`model`]: physical parameters, reduced coefficients, problem data.
//! - [`delayed_exp`]: delayed and classical matrix exponentials.
//! - [`delay_ode`]: closed-form and method-of-steps solvers for `ẋ + M x(t−τ) = f`.
//! - [`modal`]: Fourier basis, modal matrices, Cardano eigenvalues, eigenvectors.
//! - [`thermo`]: projection, modal solves, reconstruction, norms and diagnostics.
//! - [`io`]: configuration, run orchestration and file output.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod delay_ode;
pub mod delayed_exp;
pub mod error;
pub mod io;
pub mod linalg;
pub mod modal;
pub mod model;
pub mod quadrature;
pub mod thermo;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
