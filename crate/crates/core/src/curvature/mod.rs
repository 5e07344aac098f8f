//! Nonlocal mean curvature: planar sets, graphs over the line, and the
//! 1-D fractional Laplacian.

mod graph;
mod laplacian;
mod planar_set;
mod set2d;

pub use graph::{graph_curvature, interior_curvature, subgraph_of_datum};
pub use laplacian::{fractional_laplacian_1d, fractional_laplacian_1d_with_breakpoints};
pub use planar_set::{FarField, PlanarSet, SetShape};
pub use set2d::{set_curvature_2d, set_curvature_2d_with, CurvatureSample, SetCurvatureOptions};
