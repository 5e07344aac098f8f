use nalgebra::DMatrix;
use rayon::prelude::*;

use super::graph::DiscreteGraph;
use super::tails::{tail_energy, tail_gradient, tail_hessian};

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn compensated(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// The discrete relative functional
///
/// `F(u) = Σ w_i w_j 𝒢((u_i - u_j)/|x_i - x_j|) |x_i - x_j|^-s + Σ_i w_i T_i(u_i)`
///
/// over unordered pairs with at least one interior node, where `T_i` is the
/// renormalized contribution of the exterior beyond the grid ends.
pub fn discrete_energy(graph: &DiscreteGraph) -> f64 {
    let problem = graph.problem();
    let grid = problem.grid();
    let order = problem.order();
    let pairs = &problem.pairs;
    let u = graph.values();
    let n = grid.len();
    let first = *grid.interior().start();
    let rows: Vec<f64> = grid
        .interior()
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::default();
            let ui = u[i];
            // Each interior-interior pair is counted from its lower index.
            for j in (0..first).chain(i + 1..n) {
                let k = j.abs_diff(i);
                let a = (ui - u[j]) * pairs.inv_dist[k];
                acc.add(grid.weight(j) * pairs.energy[k] * order.kernel_double_primitive(a));
            }
            acc.add(tail_energy(problem, i, ui));
            grid.weight(i) * acc.value()
        })
        .collect();
    compensated(rows)
}

/// `Σ_{j≠i} w_j G((u_i − u_j)/d) d^-(1+s)` plus the tails, with pairs
/// `(i - k, i + k)` summed together before the one-sided remainder.
pub(crate) fn first_variation_row(graph: &DiscreteGraph, i: usize) -> f64 {
    let problem = graph.problem();
    let grid = problem.grid();
    let order = problem.order();
    let pairs = &problem.pairs;
    let u = graph.values();
    let n = grid.len();
    let ui = u[i];
    let reach = i.min(n - 1 - i);
    let mut acc = CompensatedSum::default();
    for k in 1..=reach {
        let (l, r) = (i - k, i + k);
        let gl = grid.weight(l) * order.kernel_primitive((ui - u[l]) * pairs.inv_dist[k]);
        let gr = grid.weight(r) * order.kernel_primitive((ui - u[r]) * pairs.inv_dist[k]);
        acc.add((gl + gr) * pairs.gradient[k]);
    }
    let rest: Box<dyn Iterator<Item = usize>> = if i < n - 1 - i {
        Box::new(i + reach + 1..n)
    } else {
        Box::new(0..i - reach)
    };
    for j in rest {
        let k = j.abs_diff(i);
        let a = (ui - u[j]) * pairs.inv_dist[k];
        acc.add(grid.weight(j) * pairs.gradient[k] * order.kernel_primitive(a));
    }
    acc.add(tail_gradient(problem, i, ui));
    acc.value()
}

/// Exact gradient of [`discrete_energy`] with respect to the interior
/// values: component `i` is `w_i` times half the graph curvature at `i`.
pub fn energy_gradient(graph: &DiscreteGraph) -> Vec<f64> {
    let grid = *graph.grid();
    grid.interior()
        .into_par_iter()
        .map(|i| grid.weight(i) * first_variation_row(graph, i))
        .collect()
}

/// Diagonal of the Hessian of [`discrete_energy`].
pub fn hessian_diagonal(graph: &DiscreteGraph) -> Vec<f64> {
    let problem = graph.problem();
    let grid = *problem.grid();
    let order = problem.order();
    let pairs = &problem.pairs;
    let u = graph.values();
    let n = grid.len();
    grid.interior()
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::default();
            for j in (0..n).filter(|&j| j != i) {
                let k = j.abs_diff(i);
                let a = (u[i] - u[j]) * pairs.inv_dist[k];
                acc.add(grid.weight(j) * pairs.hessian[k] * order.kernel_density(a));
            }
            acc.add(tail_hessian(problem, i, u[i]));
            grid.weight(i) * acc.value()
        })
        .collect()
}

/// Dense Hessian of [`discrete_energy`] over the interior unknowns.
pub fn energy_hessian(graph: &DiscreteGraph) -> DMatrix<f64> {
    let problem = graph.problem();
    let grid = *problem.grid();
    let order = problem.order();
    let pairs = &problem.pairs;
    let u = graph.values();
    let first = *grid.interior().start();
    let m = grid.interior_len();
    let diag = hessian_diagonal(graph);
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|r| {
            let i = first + r;
            (0..m)
                .map(|c| {
                    if c == r {
                        return diag[r];
                    }
                    let j = first + c;
                    let k = j.abs_diff(i);
                    let a = (u[i] - u[j]) * pairs.inv_dist[k];
                    -grid.weight(i) * grid.weight(j) * pairs.hessian[k] * order.kernel_density(a)
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(m, m, |r, c| rows[r][c])
}
