//! Contributions of the exterior beyond the grid ends, where the datum is
//! replaced by its asymptote model.
//!
//! For a node at distance `D₀` from a grid end, the half-line `D ≥ D₀` is
//! mapped onto `(0, 1]` by `D = D₀ w^(-1/s)`. The three kernels then become
//!
//! ```text
//! D^-(1+s) dD = D₀^-s / s            dw
//! D^-s     dD = D₀^(1-s) / s · w^(-1/s) dw
//! D^-(2+s) dD = D₀^-(1+s) / s · w^(1/s) dw
//! ```
//!
//! and each integrand is bounded on `(0, 1]`.

use super::datum::Asymptote;
use super::graph::Problem;
use crate::special::{graded_unit_rule, FractionalOrder};

const LEVELS: usize = 16;

#[derive(Debug, Clone, Copy)]
struct TailNode {
    weight: f64,
    /// `w^(-1/s)`
    stretch: f64,
    /// `w^(1/s)`
    shrink: f64,
}

#[derive(Debug)]
pub(crate) struct TailRule {
    nodes: Vec<TailNode>,
    inv_s: f64,
}

impl TailRule {
    pub fn new(order: &FractionalOrder) -> Self {
        let inv_s = 1.0 / order.s();
        let nodes = graded_unit_rule(LEVELS)
            .into_iter()
            .map(|(w, weight)| TailNode {
                weight,
                stretch: w.powf(-inv_s),
                shrink: w.powf(inv_s),
            })
            .collect();
        Self { nodes, inv_s }
    }
}

/// `(D₀, direction, asymptote)` for both sides of node `i`; `None` at the
/// two outermost nodes, where the half-line starts at the node itself.
fn sides(problem: &Problem, i: usize) -> Option<[(f64, f64, Asymptote); 2]> {
    let grid = problem.grid();
    let (lo, hi) = grid.ends();
    let x = grid.x(i);
    if i == 0 || i + 1 == grid.len() {
        return None;
    }
    let datum = problem.datum();
    Some([
        (x - lo, -1.0, datum.left_asymptote()),
        (hi - x, 1.0, datum.right_asymptote()),
    ])
}

/// Reference level for the renormalized tail energy; moves with vertical
/// shifts of the datum.
fn reference_level(problem: &Problem) -> f64 {
    let d = problem.datum();
    0.5 * (d.left_limit() + d.right_limit())
}

/// `∫ G((u - u₀(y))/|x_i - y|) |x_i - y|^-(1+s) dy` over both tails.
pub(crate) fn tail_gradient(problem: &Problem, i: usize, u: f64) -> f64 {
    let Some(sides) = sides(problem, i) else {
        return f64::NAN;
    };
    let order = problem.order();
    let rule = &problem.tail;
    let x = problem.grid().x(i);
    let mut total = 0.0;
    for (d0, dir, asym) in sides {
        let mut acc = 0.0;
        for n in &rule.nodes {
            let d = d0 * n.stretch;
            acc += n.weight * order.kernel_primitive(asym.quotient(u, x, dir, d));
        }
        total += acc * d0.powf(-order.s()) * rule.inv_s;
    }
    total
}

/// `∫ [𝒢(a) - 𝒢(a_ref)] |x_i - y|^-s dy` over both tails, with `a_ref` the
/// slope towards the reference level.
pub(crate) fn tail_energy(problem: &Problem, i: usize, u: f64) -> f64 {
    let Some(sides) = sides(problem, i) else {
        return f64::NAN;
    };
    let order = problem.order();
    let rule = &problem.tail;
    let x = problem.grid().x(i);
    let level = reference_level(problem);
    let mut total = 0.0;
    for (d0, dir, asym) in sides {
        let mut acc = 0.0;
        for n in &rule.nodes {
            let d = d0 * n.stretch;
            let mid = asym.quotient(0.5 * (u + level), x, dir, d);
            acc += n.weight * n.stretch * order.kernel_double_primitive_increment(mid, (u - level) / d);
        }
        total += acc * d0.powf(1.0 - order.s()) * rule.inv_s;
    }
    total
}

/// Second derivative of [`tail_energy`] in `u`.
pub(crate) fn tail_hessian(problem: &Problem, i: usize, u: f64) -> f64 {
    let Some(sides) = sides(problem, i) else {
        return f64::NAN;
    };
    let order = problem.order();
    let rule = &problem.tail;
    let x = problem.grid().x(i);
    let mut total = 0.0;
    for (d0, dir, asym) in sides {
        let mut acc = 0.0;
        for n in &rule.nodes {
            let d = d0 * n.stretch;
            acc += n.weight * n.shrink * order.kernel_density(asym.quotient(u, x, dir, d));
        }
        total += acc * d0.powf(-1.0 - order.s()) * rule.inv_s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{ExteriorDatum, GridSpec};
    use crate::special::adaptive_quadrature;

    fn problem(s: f64, datum: ExteriorDatum) -> std::sync::Arc<Problem> {
        Problem::new(datum, GridSpec::new(16, 4.0).unwrap(), FractionalOrder::new(s).unwrap()).unwrap()
    }

    #[test]
    fn constant_tail_against_direct_quadrature() {
        for s in [0.1, 0.5, 0.9] {
            let p = problem(s, ExteriorDatum::flat());
            let i = p.grid().interior().next().unwrap() + 3;
            let x = p.grid().x(i);
            let u = 0.8;
            let o = p.order();
            let (lo, hi) = p.grid().ends();
            // Direct: substitute D = D₀ / v on (0, 1) for each side.
            let side = |d0: f64| {
                adaptive_quadrature(
                    |v: f64| {
                        let d = d0 / v;
                        o.kernel_primitive(u / d) * d.powf(-1.0 - s) * d0 / (v * v)
                    },
                    0.0,
                    1.0,
                    1e-13,
                )
                .unwrap()
                .value
            };
            let direct = side(x - lo) + side(hi - x);
            let got = tail_gradient(&p, i, u);
            assert!(((got - direct) / direct).abs() < 1e-9, "s={s}: {got} vs {direct}");
        }
    }

    #[test]
    fn tail_derivatives_are_consistent() {
        let p = problem(0.3, ExteriorDatum::linear(0.7, -0.2));
        let i = p.grid().left_wall() + 5;
        let u = 0.4;
        let step = 1e-5;
        let fd = (tail_energy(&p, i, u + step) - tail_energy(&p, i, u - step)) / (2.0 * step);
        let g = tail_gradient(&p, i, u);
        assert!((fd - g).abs() < 1e-8 * g.abs().max(1.0), "{fd} vs {g}");
        let fd2 = (tail_gradient(&p, i, u + step) - tail_gradient(&p, i, u - step)) / (2.0 * step);
        let hss = tail_hessian(&p, i, u);
        assert!((fd2 - hss).abs() < 1e-7 * hss.abs().max(1.0), "{fd2} vs {hss}");
    }

    #[test]
    fn outermost_nodes_have_no_tail() {
        let p = problem(0.5, ExteriorDatum::flat());
        assert!(tail_gradient(&p, 0, 0.0).is_nan());
        assert!(tail_gradient(&p, p.grid().len() - 1, 0.0).is_nan());
    }
}
