//! Numerical laboratory for planar nonlocal minimal graphs.
//!
//! A graph `u` over `(0, 1)` with prescribed exterior values is minimized for
//! a discretized fractional-area functional; its nonlocal mean curvature is
//! evaluated either by the graph reduction or directly as a planar
//! principal-value integral. Boundary diagnostics (jumps, vertical tangents,
//! exponents, blow-ups) are built on top.
//!
//! Modules:
//! - [`special`]: kernel primitives `G`, `𝒢` and 1-D quadrature.
//! - [`energy`]: grids, exterior data, discrete graphs and the functional.
//! - [`curvature`]: planar sets, PV curvature, graph curvature, 1-D fractional Laplacian.
//! - [`solver`]: minimization and boundary diagnostics.
//! - [`lab`]: scenario configuration, orchestration and report emission.

// Negated comparisons reject NaN on purpose; reference constants keep all their digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod curvature;
pub mod energy;
mod error;
pub mod lab;
pub mod solver;
pub mod special;

pub use error::Error;
pub use special::FractionalOrder;

pub type Result<T, E = Error> = std::result::Result<T, E>;
