use rayon::prelude::*;

use super::planar_set::PlanarSet;
use crate::energy::{first_variation_row, DiscreteGraph, ExteriorDatum};
use crate::Error;

/// `H[u](x_i) = 2 PV ∫ G((u(x_i) - u(y))/|x_i - y|) |x_i - y|^-(1+s) dy`
/// as a lattice sum over all other nodes plus the far-field tails.
///
/// Defined at every node except the two outermost ones, where it is `NaN`;
/// within a few cells of the grid ends the lattice error grows like `h^-s`.
pub fn graph_curvature(graph: &DiscreteGraph, node_index: usize) -> f64 {
    2.0 * first_variation_row(graph, node_index)
}

/// [`graph_curvature`] at every interior node.
pub fn interior_curvature(graph: &DiscreteGraph) -> Vec<f64> {
    graph
        .grid()
        .interior()
        .into_par_iter()
        .map(|i| graph_curvature(graph, i))
        .collect()
}

/// Subgraph of a function given on all of `ℝ` by an [`ExteriorDatum`]
/// evaluator (interior values included).
pub fn subgraph_of_datum(datum: &ExteriorDatum) -> Result<PlanarSet, Error> {
    let f = datum.clone();
    PlanarSet::subgraph(
        move |x| f.eval(x),
        datum.left_asymptote(),
        datum.right_asymptote(),
        datum.far_radius().max(1.0),
    )
}
