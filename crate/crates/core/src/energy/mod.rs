//! Grids, exterior data, discrete graphs and the convex discrete functional.

mod datum;
mod functional;
mod graph;
mod grid;
mod tails;

pub use datum::{Asymptote, Bump, ExteriorDatum};
pub use functional::{discrete_energy, energy_gradient, energy_hessian, hessian_diagonal};
pub use graph::{DiscreteGraph, Problem};
pub use grid::{cells_for_spacing, GridSpec, DEFAULT_CELLS_PER_UNIT, DEFAULT_TRUNCATION};

pub(crate) use datum::validate_perturbation;
pub(crate) use functional::first_variation_row;
