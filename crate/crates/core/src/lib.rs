//! Zeroth-order stochastic optimization with Legendre-kernel smoothing.
//!
//! This crate implements a projected-gradient method for minimizing a convex
//! (or strongly convex) function over a convex compact set when only noisy
//! function values are available. Each iteration queries the oracle at two
//! symmetric points `x ± τ r e` (random direction `e` on the unit sphere,
//! random radius `r` on `[-1, 1]`) and forms the gradient surrogate
//!
//! ```text
//! g = n / (2 τ) · (y - y') · K(r) · e
//! ```
//!
//! where `K` is a smoothing kernel built from Legendre polynomials. The
//! kernel cancels low-order Taylor terms of the objective, so the surrogate's
//! bias scales like `τ^(β-1)` for β-Hölder-smooth objectives, which is what
//! lets the method exploit higher-order smoothness.
//!
//! Modules:
//! - [`kernel`]: Legendre smoothing kernels, their moment conditions and the
//!   constants `κ_β`, `κ` that enter schedules and error bounds.
//! - [`geometry`]: feasible sets with closed-form Euclidean projections and
//!   the sphere/interval sampling primitives.
//! - [`oracle`]: objectives with metadata, bounded-second-moment noise
//!   models, and the two-evaluation noisy query with query accounting.
//! - [`optimizer`]: the iteration loop, the step/smoothing schedules, the
//!   regularization wrapper for merely convex problems, and calculators for
//!   the theoretical error bound and the iteration budget `N(ε)`.
//! - [`diagnostics`]: estimators used to verify the method's statistical
//!   properties (bias scaling, second-moment ceiling) empirically.

// validation uses negated comparisons (`!(x > 0.0)`) because they also
// reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod optimizer;
pub mod quad;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
